#pragma once

// Brute-force reference implementations used only by tests.

#include "qrc/state_vector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace oracle {

using C = std::complex<double>;

struct Dense {
    std::size_t n = 0;
    std::vector<C> a; ///< row-major n x n

    explicit Dense(std::size_t dim)
      : n(dim)
      , a(dim * dim)
    {
    }
    C& operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
    C operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

inline Dense identity(std::size_t dim)
{
    Dense m(dim);
    for (std::size_t i = 0; i < dim; ++i)
        m(i, i) = 1.0;
    return m;
}

inline Dense from_gate(const qrc::GateMatrix& g)
{
    Dense m(g.dim());
    for (std::size_t r = 0; r < g.dim(); ++r)
        for (std::size_t c = 0; c < g.dim(); ++c)
            m(r, c) = g(r, c);
    return m;
}

/// Textbook Kronecker product: (A (x) B)[(i,k),(j,l)] = A[i,j] B[k,l].
inline Dense kron(const Dense& a, const Dense& b)
{
    Dense m(a.n * b.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j)
            for (std::size_t k = 0; k < b.n; ++k)
                for (std::size_t l = 0; l < b.n; ++l)
                    m(i * b.n + k, j * b.n + l) = a(i, j) * b(k, l);
    return m;
}

inline Dense matmul(const Dense& a, const Dense& b)
{
    Dense m(a.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t k = 0; k < a.n; ++k)
            for (std::size_t j = 0; j < a.n; ++j)
                m(i, j) += a(i, k) * b(k, j);
    return m;
}

/// I (x) ... (x) G (x) ... (x) I with qubit 0 as the leftmost factor.
inline Dense embed_1q(const qrc::GateMatrix& g, int target, int n_qubits)
{
    Dense m = identity(1);
    for (int q = 0; q < n_qubits; ++q)
        m = kron(m, q == target ? from_gate(g) : identity(2));
    return m;
}

/// CNOT as a sum of projector products: |0><0|_c (x) I + |1><1|_c (x) X_t.
inline Dense cnot_matrix(int control, int target, int n_qubits)
{
    Dense p0(2), p1(2), x(2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    x(0, 1) = x(1, 0) = 1.0;
    Dense off = identity(1), on = identity(1);
    for (int q = 0; q < n_qubits; ++q) {
        off = kron(off, q == control ? p0 : identity(2));
        on = kron(on, q == control ? p1 : (q == target ? x : identity(2)));
    }
    Dense m(off.n);
    for (std::size_t i = 0; i < m.a.size(); ++i)
        m.a[i] = off.a[i] + on.a[i];
    return m;
}

inline std::vector<C> matvec(const Dense& m, const std::vector<C>& v)
{
    std::vector<C> out(m.n);
    for (std::size_t r = 0; r < m.n; ++r)
        for (std::size_t c = 0; c < m.n; ++c)
            out[r] += m(r, c) * v[c];
    return out;
}

inline std::vector<C> random_state(int n_qubits, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    std::vector<C> v(std::size_t{1} << n_qubits);
    double norm = 0.0;
    for (auto& z : v) {
        z = C(g(rng), g(rng));
        norm += std::norm(z);
    }
    for (auto& z : v)
        z /= std::sqrt(norm);
    return v;
}

inline double max_diff(std::span<const C> a, std::span<const C> b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Closed-form Ry(theta) = exp(-i theta Y / 2).
inline qrc::GateMatrix ry(double t)
{
    const std::array<C, 4> e{std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2)};
    return qrc::GateMatrix(2, e);
}

/// Closed-form Rz(theta) = exp(-i theta Z / 2).
inline qrc::GateMatrix rz(double t)
{
    const std::array<C, 4> e{std::polar(1.0, -t / 2), 0.0, 0.0, std::polar(1.0, t / 2)};
    return qrc::GateMatrix(2, e);
}

inline qrc::GateMatrix hadamard()
{
    const double s = 1.0 / std::sqrt(2.0);
    const std::array<C, 4> e{s, s, s, -s};
    return qrc::GateMatrix(2, e);
}

/// Dense-matrix simulation of the 4-qubit VQC, independent of the library's circuit runner.
inline std::vector<double> vqc_expectations(
  std::span<const double> angles, int depth, std::span<const double> x, int n_meas)
{
    constexpr int n = 4;
    std::vector<C> psi(16, 0.0);
    psi[0] = 1.0;
    for (int q = 0; q < n; ++q) {
        psi = matvec(embed_1q(hadamard(), q, n), psi);
        psi = matvec(embed_1q(ry(std::atan(x[q])), q, n), psi);
        psi = matvec(embed_1q(rz(std::atan(x[q] * x[q])), q, n), psi);
    }
    const int wiring[8][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}, {2, 0}, {3, 1}};
    for (int b = 0; b < depth; ++b) {
        for (const auto& w : wiring)
            psi = matvec(cnot_matrix(w[0], w[1], n), psi);
        for (int q = 0; q < n; ++q) {
            const double* a = &angles[static_cast<std::size_t>((b * n + q) * 3)];
            psi = matvec(embed_1q(rz(a[0]), q, n), psi);
            psi = matvec(embed_1q(ry(a[1]), q, n), psi);
            psi = matvec(embed_1q(rz(a[2]), q, n), psi);
        }
    }
    std::vector<double> out(static_cast<std::size_t>(n_meas), 0.0);
    for (std::size_t i = 0; i < psi.size(); ++i)
        for (int q = 0; q < n_meas; ++q)
            out[q] += ((i >> (n - 1 - q)) & 1u ? -1.0 : 1.0) * std::norm(psi[i]);
    return out;
}

} // namespace oracle

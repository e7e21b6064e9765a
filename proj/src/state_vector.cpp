#include "qrc/state_vector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qrc {

namespace {

constexpr Complex I{0.0, 1.0};

void check_qubit(int qubit, int n_qubits, const char* what)
{
    if (qubit < 0 || qubit >= n_qubits)
        throw std::invalid_argument(
          std::string(what) + " qubit " + std::to_string(qubit) + " out of range for "
          + std::to_string(n_qubits) + "-qubit register");
}

std::size_t bit_of(int qubit, int n_qubits)
{
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

} // namespace

GateMatrix::GateMatrix(std::size_t dim, std::span<const Complex> entries)
  : dim_(dim)
{
    if (dim != 2 && dim != 4)
        throw std::invalid_argument("GateMatrix dimension must be 2 or 4");
    if (entries.size() != dim * dim)
        throw std::invalid_argument("GateMatrix entry count does not match dimension");
    std::copy(entries.begin(), entries.end(), m_.begin());
}

GateMatrix GateMatrix::identity(std::size_t dim)
{
    std::array<Complex, 16> e{};
    for (std::size_t i = 0; i < dim; ++i)
        e[i * dim + i] = 1.0;
    return GateMatrix(dim, std::span<const Complex>(e.data(), dim * dim));
}

GateMatrix GateMatrix::adjoint() const
{
    GateMatrix out = *this;
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c)
            out(r, c) = std::conj((*this)(c, r));
    return out;
}

GateMatrix GateMatrix::conjugate() const
{
    GateMatrix out = *this;
    for (std::size_t i = 0; i < dim_ * dim_; ++i)
        out.m_[i] = std::conj(m_[i]);
    return out;
}

GateMatrix GateMatrix::operator*(const GateMatrix& rhs) const
{
    if (dim_ != rhs.dim_)
        throw std::invalid_argument("GateMatrix product dimension mismatch");
    GateMatrix out = GateMatrix::identity(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < dim_; ++k)
                acc += (*this)(r, k) * rhs(k, c);
            out(r, c) = acc;
        }
    return out;
}

GateMatrix GateMatrix::operator*(Complex scale) const
{
    GateMatrix out = *this;
    for (std::size_t i = 0; i < dim_ * dim_; ++i)
        out.m_[i] *= scale;
    return out;
}

GateMatrix GateMatrix::operator+(const GateMatrix& rhs) const
{
    if (dim_ != rhs.dim_)
        throw std::invalid_argument("GateMatrix sum dimension mismatch");
    GateMatrix out = *this;
    for (std::size_t i = 0; i < dim_ * dim_; ++i)
        out.m_[i] += rhs.m_[i];
    return out;
}

bool GateMatrix::is_unitary(double tol) const
{
    return (adjoint() * *this).distance(identity(dim_)) <= tol;
}

double GateMatrix::distance(const GateMatrix& other) const
{
    if (dim_ != other.dim_)
        return INFINITY;
    double d = 0.0;
    for (std::size_t i = 0; i < dim_ * dim_; ++i)
        d = std::max(d, std::abs(m_[i] - other.m_[i]));
    return d;
}

bool GateMatrix::equal_up_to_phase(const GateMatrix& other, double tol) const
{
    if (dim_ != other.dim_)
        return false;
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < dim_ * dim_; ++i)
        if (std::abs(other.m_[i]) > std::abs(other.m_[pivot]))
            pivot = i;
    if (std::abs(other.m_[pivot]) == 0.0)
        return distance(other) <= tol;
    Complex phase = m_[pivot] / other.m_[pivot];
    if (std::abs(std::abs(phase) - 1.0) > tol)
        return false;
    return distance(other * phase) <= tol;
}

GateMatrix kron(const GateMatrix& a, const GateMatrix& b)
{
    if (a.dim() != 2 || b.dim() != 2)
        throw std::invalid_argument("kron expects two 2x2 matrices");
    std::array<Complex, 16> e{};
    for (std::size_t ar = 0; ar < 2; ++ar)
        for (std::size_t ac = 0; ac < 2; ++ac)
            for (std::size_t br = 0; br < 2; ++br)
                for (std::size_t bc = 0; bc < 2; ++bc)
                    e[(ar * 2 + br) * 4 + (ac * 2 + bc)] = a(ar, ac) * b(br, bc);
    return GateMatrix(4, e);
}

namespace gates {

GateMatrix hadamard()
{
    const double s = 1.0 / std::numbers::sqrt2;
    const std::array<Complex, 4> e{s, s, s, -s};
    return GateMatrix(2, e);
}

GateMatrix pauli_x()
{
    const std::array<Complex, 4> e{0.0, 1.0, 1.0, 0.0};
    return GateMatrix(2, e);
}

GateMatrix pauli_y()
{
    const std::array<Complex, 4> e{0.0, -I, I, 0.0};
    return GateMatrix(2, e);
}

GateMatrix pauli_z()
{
    const std::array<Complex, 4> e{1.0, 0.0, 0.0, -1.0};
    return GateMatrix(2, e);
}

GateMatrix rot_x(double theta)
{
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const std::array<Complex, 4> e{c, -I * s, -I * s, c};
    return GateMatrix(2, e);
}

GateMatrix rot_y(double theta)
{
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const std::array<Complex, 4> e{c, -s, s, c};
    return GateMatrix(2, e);
}

GateMatrix rot_z(double theta)
{
    const std::array<Complex, 4> e{std::exp(-I * (theta / 2)), 0.0, 0.0, std::exp(I * (theta / 2))};
    return GateMatrix(2, e);
}

GateMatrix x90()
{
    return rot_x(std::numbers::pi / 2);
}

GateMatrix cnot()
{
    const std::array<Complex, 16> e{
      1.0, 0.0, 0.0, 0.0, //
      0.0, 1.0, 0.0, 0.0, //
      0.0, 0.0, 0.0, 1.0, //
      0.0, 0.0, 1.0, 0.0};
    return GateMatrix(4, e);
}

GateMatrix rot_zyz(double alpha, double beta, double gamma)
{
    return rot_z(gamma) * rot_y(beta) * rot_z(alpha);
}

} // namespace gates

StateVector::StateVector(std::vector<Complex> amplitudes)
  : amplitudes_(std::move(amplitudes))
{
    const std::size_t n = amplitudes_.size();
    if (n < 2 || (n & (n - 1)) != 0)
        throw std::invalid_argument("StateVector length must be a power of two >= 2");
    n_qubits_ = std::countr_zero(n);
    if (n_qubits_ > max_qubits)
        throw std::invalid_argument("StateVector exceeds the supported qubit count");
    if (std::abs(norm_squared() - 1.0) > 1e-10)
        throw std::invalid_argument("StateVector amplitudes are not normalised");
}

StateVector::StateVector(unchecked_tag, int n_qubits, std::vector<Complex> amplitudes)
  : n_qubits_(n_qubits)
  , amplitudes_(std::move(amplitudes))
{
}

double StateVector::norm_squared() const
{
    double acc = 0.0;
    for (const Complex& a : amplitudes_)
        acc += std::norm(a);
    return acc;
}

StateVector new_zero_state(int n_qubits)
{
    if (n_qubits < 1 || n_qubits > max_qubits)
        throw std::invalid_argument(
          "n_qubits must be in [1, " + std::to_string(max_qubits) + "], got "
          + std::to_string(n_qubits));
    std::vector<Complex> amps(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amps[0] = 1.0;
    return StateVector(StateVector::unchecked_tag{}, n_qubits, std::move(amps));
}

StateVector apply_1q(StateVector state, const GateMatrix& gate, int target)
{
    check_qubit(target, state.n_qubits_, "target");
    if (gate.dim() != 2)
        throw std::invalid_argument("apply_1q expects a 2x2 gate");
    if (!gate.is_unitary(1e-10))
        throw std::invalid_argument("apply_1q gate is not unitary");

    const std::size_t stride = bit_of(target, state.n_qubits_);
    const Complex g00 = gate(0, 0), g01 = gate(0, 1), g10 = gate(1, 0), g11 = gate(1, 1);
    auto& amps = state.amplitudes_;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride)
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex a0 = amps[i], a1 = amps[i + stride];
            amps[i] = g00 * a0 + g01 * a1;
            amps[i + stride] = g10 * a0 + g11 * a1;
        }
    return state;
}

StateVector apply_cnot(StateVector state, int control, int target)
{
    check_qubit(control, state.n_qubits_, "control");
    check_qubit(target, state.n_qubits_, "target");
    if (control == target)
        throw std::invalid_argument("CNOT control and target must differ");

    const std::size_t cbit = bit_of(control, state.n_qubits_);
    const std::size_t tbit = bit_of(target, state.n_qubits_);
    auto& amps = state.amplitudes_;
    for (std::size_t i = 0; i < amps.size(); ++i)
        if ((i & cbit) && !(i & tbit))
            std::swap(amps[i], amps[i | tbit]);
    return state;
}

double pauli_z_expectation(const StateVector& state, int qubit)
{
    check_qubit(qubit, state.n_qubits(), "measured");
    const std::size_t bit = bit_of(qubit, state.n_qubits());
    double acc = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i)
        acc += (i & bit) ? -std::norm(amps[i]) : std::norm(amps[i]);
    return std::clamp(acc, -1.0, 1.0);
}

GateMatrix gate_matrix(const Gate& gate)
{
    switch (gate.kind) {
    case GateKind::h: return gates::hadamard();
    case GateKind::ry: return gates::rot_y(gate.angles[0]);
    case GateKind::rz: return gates::rot_z(gate.angles[0]);
    case GateKind::rot: return gates::rot_zyz(gate.angles[0], gate.angles[1], gate.angles[2]);
    case GateKind::cnot: return gates::cnot();
    }
    throw std::invalid_argument("unknown gate kind");
}

StateVector run_circuit(const Circuit& circuit, StateVector state)
{
    for (const Gate& g : circuit) {
        if (g.kind == GateKind::cnot)
            state = apply_cnot(std::move(state), g.q0, g.q1);
        else
            state = apply_1q(std::move(state), gate_matrix(g), g.q0);
    }
    return state;
}

} // namespace qrc

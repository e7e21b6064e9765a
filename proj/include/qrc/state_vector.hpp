#pragma once

// Exact statevector simulation for small qubit registers.
//
// Qubit 0 is the most significant bit of the basis index, i.e. the top wire of
// a circuit diagram. All operations take and return states by value; pass an
// rvalue to reuse the amplitude buffer.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qrc {

using Complex = std::complex<double>;

inline constexpr int max_qubits = 12;

/// Dense 2x2 or 4x4 complex matrix, row-major. Used for gates and Kraus operators.
class GateMatrix {
public:
    GateMatrix() = default;

    /// `entries` holds dim*dim values in row-major order; dim must be 2 or 4.
    GateMatrix(std::size_t dim, std::span<const Complex> entries);

    static GateMatrix identity(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    Complex operator()(std::size_t row, std::size_t col) const { return m_[row * dim_ + col]; }
    Complex& operator()(std::size_t row, std::size_t col) { return m_[row * dim_ + col]; }
    const Complex* data() const noexcept { return m_.data(); }

    GateMatrix adjoint() const;
    GateMatrix conjugate() const;
    GateMatrix operator*(const GateMatrix& rhs) const;
    GateMatrix operator*(Complex scale) const;
    GateMatrix operator+(const GateMatrix& rhs) const;

    bool is_unitary(double tol = 1e-12) const;

    /// Max elementwise distance.
    double distance(const GateMatrix& other) const;

    /// True when `*this == phase * other` for some unit-modulus phase.
    bool equal_up_to_phase(const GateMatrix& other, double tol = 1e-12) const;

private:
    std::size_t dim_ = 2;
    std::array<Complex, 16> m_{};
};

/// Kronecker product of two 2x2 matrices (first factor acts on the lower qubit index).
GateMatrix kron(const GateMatrix& a, const GateMatrix& b);

namespace gates {

GateMatrix hadamard();
GateMatrix pauli_x();
GateMatrix pauli_y();
GateMatrix pauli_z();
GateMatrix rot_x(double theta); ///< exp(-i theta X / 2)
GateMatrix rot_y(double theta); ///< exp(-i theta Y / 2)
GateMatrix rot_z(double theta); ///< exp(-i theta Z / 2)
GateMatrix x90();               ///< rot_x(pi/2)
GateMatrix cnot();              ///< control on the first (more significant) qubit

/// rot_z(gamma) * rot_y(beta) * rot_z(alpha); alpha is applied first.
GateMatrix rot_zyz(double alpha, double beta, double gamma);

} // namespace gates

class StateVector {
public:
    /// Takes ownership of `amplitudes`; length must be a power of two and the norm 1.
    explicit StateVector(std::vector<Complex> amplitudes);

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t size() const noexcept { return amplitudes_.size(); }
    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](std::size_t index) const { return amplitudes_[index]; }

    double norm_squared() const;

private:
    struct unchecked_tag {};
    StateVector(unchecked_tag, int n_qubits, std::vector<Complex> amplitudes);

    friend StateVector new_zero_state(int n_qubits);
    friend StateVector apply_1q(StateVector, const GateMatrix&, int);
    friend StateVector apply_cnot(StateVector, int, int);

    int n_qubits_ = 0;
    std::vector<Complex> amplitudes_;
};

/// |0...0> on `n_qubits` qubits; 1 <= n_qubits <= max_qubits.
StateVector new_zero_state(int n_qubits);

StateVector apply_1q(StateVector state, const GateMatrix& gate, int target);
StateVector apply_cnot(StateVector state, int control, int target);

/// <psi| Z_qubit |psi>.
double pauli_z_expectation(const StateVector& state, int qubit);

// Circuit description shared by the statevector and density-matrix backends.

enum class GateKind { h, ry, rz, rot, cnot };

struct Gate {
    GateKind kind;
    int q0 = 0;    ///< target, or control for CNOT
    int q1 = -1;   ///< CNOT target
    std::array<double, 3> angles{}; ///< ry/rz use angles[0]; rot uses (alpha, beta, gamma)

    static Gate h(int q) { return {GateKind::h, q}; }
    static Gate ry(int q, double theta) { return {GateKind::ry, q, -1, {theta, 0.0, 0.0}}; }
    static Gate rz(int q, double theta) { return {GateKind::rz, q, -1, {theta, 0.0, 0.0}}; }
    static Gate rot(int q, double a, double b, double c) { return {GateKind::rot, q, -1, {a, b, c}}; }
    static Gate cx(int control, int target) { return {GateKind::cnot, control, target}; }
};

using Circuit = std::vector<Gate>;

/// Single-qubit unitary of a non-CNOT gate.
GateMatrix gate_matrix(const Gate& gate);

StateVector run_circuit(const Circuit& circuit, StateVector state);

} // namespace qrc

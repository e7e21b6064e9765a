#pragma once

// Density-matrix simulation with per-gate thermal relaxation and depolarization.
//
// Logical gates are compiled to the native set {Rz, X90, CNOT}; only X90 and
// CNOT carry duration and depolarizing error. Rz is a virtual frame change.

#include "qrc/random.hpp"
#include "qrc/state_vector.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qrc {

struct KrausChannel;

class DensityMatrix {
public:
    /// Pure state |psi><psi|.
    explicit DensityMatrix(const StateVector& state);

    /// Row-major entries; must be Hermitian with unit trace (PSD is not checked).
    DensityMatrix(int n_qubits, std::vector<Complex> entries);

    static DensityMatrix zero_state(int n_qubits);
    static DensityMatrix maximally_mixed(int n_qubits);

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t dim() const noexcept { return dim_; }
    Complex operator()(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }
    std::span<const Complex> entries() const noexcept { return entries_; }

    Complex trace() const;
    double purity() const;
    double hermiticity_error() const;
    double min_eigenvalue() const;

    /// Max elementwise distance.
    double distance(const DensityMatrix& other) const;

private:
    DensityMatrix(int n_qubits, std::vector<Complex> entries, bool);

    friend DensityMatrix apply_unitary(DensityMatrix, const GateMatrix&, std::span<const int>);
    friend DensityMatrix apply_channel(const DensityMatrix&, const KrausChannel&, std::span<const int>);

    int n_qubits_ = 0;
    std::size_t dim_ = 0;
    std::vector<Complex> entries_;
};

struct KrausChannel {
    int arity = 1;
    std::vector<GateMatrix> operators;

    /// Validates operator shapes and completeness sum K^dag K = I within `tol`.
    KrausChannel(int arity, std::vector<GateMatrix> operators, double tol = 1e-10);

    /// Max elementwise deviation of sum K^dag K from the identity.
    double completeness_error() const;
};

struct GateDurations {
    double rz = 0.0;          ///< seconds
    double x90 = 20e-9;
    double cnot = 300e-9;
    double measure = 700e-9;
    double reset = 800e-9;

    friend bool operator==(const GateDurations&, const GateDurations&) = default;
};

enum class ChannelOrder { relax_then_depolarize, depolarize_then_relax };

struct NoiseModelParams {
    int n_qubits = 4;
    std::vector<double> t1;           ///< per qubit, seconds
    std::vector<double> t2;           ///< per qubit, seconds
    std::vector<double> p1;           ///< per qubit single-qubit depolarizing probability
    std::vector<double> p2;           ///< n_qubits x n_qubits, [control * n + target]
    GateDurations durations;
    ChannelOrder order = ChannelOrder::relax_then_depolarize;
    std::uint64_t seed = 0;

    double cnot_error(int control, int target) const { return p2[control * n_qubits + target]; }

    /// Throws std::invalid_argument if any field violates its physical range.
    void validate() const;

    /// Distribution means: T1 = 500 us, T2 = 400 us, p1 = 1e-4, p2 = 1e-3.
    static NoiseModelParams mean(int n_qubits = 4);

    /// All error probabilities and durations zero; T1/T2 finite but irrelevant.
    static NoiseModelParams noiseless(int n_qubits = 4);

    friend bool operator==(const NoiseModelParams&, const NoiseModelParams&) = default;
};

/// Per-qubit T1 ~ N(500us, 50us), T2 ~ N(400us, 40us) capped at 2*T1,
/// p1 ~ N(1e-4, 1e-5), and per-pair p2 ~ N(1e-3, 1e-4). Non-positive draws are resampled.
NoiseModelParams sample_noise_model(std::uint64_t seed, int n_qubits = 4);

/// Amplitude damping followed by pure dephasing over `duration` seconds.
KrausChannel thermal_relaxation_channel(double t1, double t2, double duration);

/// (1-p) rho + p I / 2^arity.
KrausChannel depolarizing_channel(double p, int arity);

KrausChannel amplitude_damping_channel(double gamma);

/// Off-diagonal elements scaled by (1 - lambda).
KrausChannel phase_damping_channel(double lambda);

/// Resets a qubit to |0>.
KrausChannel reset_channel();

DensityMatrix apply_unitary(DensityMatrix rho, const GateMatrix& gate, std::span<const int> targets);
DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& channel, std::span<const int> targets);

enum class NativeGate { rz, x90, cnot, measure, reset };

struct NativeOp {
    NativeGate gate;
    int q0 = 0;
    int q1 = -1;
    double angle = 0.0; ///< rz only
};

/// Native-gate program equivalent (up to global phase) to `gate`.
///   H     -> Rz(pi/2) X90 Rz(pi/2)
///   Ry(t) -> X90, Rz(t + pi), X90, Rz(pi)   (listed in application order)
std::vector<NativeOp> compile_native(const Gate& gate);

/// Unitary, then thermal relaxation on every involved qubit for the gate's
/// duration, then depolarization of matching arity (order switchable).
DensityMatrix noisy_apply_gate(DensityMatrix rho, const NativeOp& op, const NoiseModelParams& noise);

/// Reset on all qubits, the compiled circuit, then measurement-time relaxation.
DensityMatrix run_noisy_circuit(const Circuit& circuit, const NoiseModelParams& noise);

/// trace(Z_qubit rho).
double pauli_z_expectation_dm(const DensityMatrix& rho, int qubit);

} // namespace qrc

#include "qrc/density_matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qrc {

namespace {

std::size_t bit_of(int qubit, int n_qubits)
{
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

void check_targets(std::span<const int> targets, int n_qubits)
{
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= n_qubits)
            throw std::invalid_argument("target qubit " + std::to_string(targets[i]) + " out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (targets[i] == targets[j])
                throw std::invalid_argument("duplicate target qubit");
    }
}

// Applies a local 2^k x 2^k operator to the strided vector v[i] = data[i * stride].
// The first target is the most significant bit of the local index.
void apply_local(
  Complex* data, std::size_t stride, int n_qubits, const GateMatrix& m, std::span<const int> targets)
{
    const std::size_t len = std::size_t{1} << n_qubits;
    if (targets.size() == 1) {
        const std::size_t b = bit_of(targets[0], n_qubits);
        const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
        for (std::size_t i = 0; i < len; ++i) {
            if (i & b)
                continue;
            Complex& x0 = data[i * stride];
            Complex& x1 = data[(i | b) * stride];
            const Complex a0 = x0, a1 = x1;
            x0 = m00 * a0 + m01 * a1;
            x1 = m10 * a0 + m11 * a1;
        }
        return;
    }
    const std::size_t b0 = bit_of(targets[0], n_qubits);
    const std::size_t b1 = bit_of(targets[1], n_qubits);
    for (std::size_t i = 0; i < len; ++i) {
        if (i & (b0 | b1))
            continue;
        const std::size_t idx[4] = {i, i | b1, i | b0, i | b0 | b1};
        Complex a[4];
        for (int k = 0; k < 4; ++k)
            a[k] = data[idx[k] * stride];
        for (int r = 0; r < 4; ++r) {
            Complex acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += m(r, k) * a[k];
            data[idx[r] * stride] = acc;
        }
    }
}

// rho <- K rho K^dag, in place.
void conjugate_in_place(
  std::vector<Complex>& rho, std::size_t dim, int n_qubits, const GateMatrix& k, std::span<const int> targets)
{
    for (std::size_t col = 0; col < dim; ++col)
        apply_local(rho.data() + col, dim, n_qubits, k, targets);
    const GateMatrix kc = k.conjugate();
    for (std::size_t row = 0; row < dim; ++row)
        apply_local(rho.data() + row * dim, 1, n_qubits, kc, targets);
}

KrausChannel identity_channel(int arity)
{
    return KrausChannel(arity, {GateMatrix::identity(arity == 1 ? 2 : 4)});
}

double truncated_normal(Rng& rng, double mean, double stddev, double upper = INFINITY)
{
    std::normal_distribution<double> dist(mean, stddev);
    for (;;) {
        const double v = dist(rng);
        if (v > 0.0 && v <= upper)
            return v;
    }
}

} // namespace

DensityMatrix::DensityMatrix(const StateVector& state)
  : n_qubits_(state.n_qubits())
  , dim_(state.size())
  , entries_(dim_ * dim_)
{
    const auto amps = state.amplitudes();
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c)
            entries_[r * dim_ + c] = amps[r] * std::conj(amps[c]);
}

DensityMatrix::DensityMatrix(int n_qubits, std::vector<Complex> entries)
  : DensityMatrix(n_qubits, std::move(entries), true)
{
    if (n_qubits < 1 || n_qubits > max_qubits)
        throw std::invalid_argument("DensityMatrix qubit count out of range");
    if (entries_.size() != dim_ * dim_)
        throw std::invalid_argument("DensityMatrix entry count does not match 4^n_qubits");
    if (hermiticity_error() > 1e-10)
        throw std::invalid_argument("DensityMatrix is not Hermitian");
    if (std::abs(trace() - Complex{1.0, 0.0}) > 1e-10)
        throw std::invalid_argument("DensityMatrix trace is not 1");
}

DensityMatrix::DensityMatrix(int n_qubits, std::vector<Complex> entries, bool)
  : n_qubits_(n_qubits)
  , dim_(std::size_t{1} << n_qubits)
  , entries_(std::move(entries))
{
}

DensityMatrix DensityMatrix::zero_state(int n_qubits)
{
    return DensityMatrix(new_zero_state(n_qubits));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits)
{
    if (n_qubits < 1 || n_qubits > max_qubits)
        throw std::invalid_argument("DensityMatrix qubit count out of range");
    const std::size_t dim = std::size_t{1} << n_qubits;
    std::vector<Complex> e(dim * dim, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < dim; ++i)
        e[i * dim + i] = 1.0 / static_cast<double>(dim);
    return DensityMatrix(n_qubits, std::move(e), true);
}

Complex DensityMatrix::trace() const
{
    Complex acc = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
        acc += entries_[i * dim_ + i];
    return acc;
}

double DensityMatrix::purity() const
{
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    double acc = 0.0;
    for (const Complex& e : entries_)
        acc += std::norm(e);
    return acc;
}

double DensityMatrix::hermiticity_error() const
{
    double err = 0.0;
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = r; c < dim_; ++c)
            err = std::max(err, std::abs(entries_[r * dim_ + c] - std::conj(entries_[c * dim_ + r])));
    return err;
}

double DensityMatrix::min_eigenvalue() const
{
    Eigen::MatrixXcd m(dim_, dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c)
            m(r, c) = entries_[r * dim_ + c];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double DensityMatrix::distance(const DensityMatrix& other) const
{
    if (dim_ != other.dim_)
        return INFINITY;
    double d = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i)
        d = std::max(d, std::abs(entries_[i] - other.entries_[i]));
    return d;
}

KrausChannel::KrausChannel(int arity_, std::vector<GateMatrix> operators_, double tol)
  : arity(arity_)
  , operators(std::move(operators_))
{
    if (arity != 1 && arity != 2)
        throw std::invalid_argument("Kraus channel arity must be 1 or 2");
    if (operators.empty())
        throw std::invalid_argument("Kraus channel needs at least one operator");
    const std::size_t dim = arity == 1 ? 2 : 4;
    for (const auto& k : operators)
        if (k.dim() != dim)
            throw std::invalid_argument("Kraus operator dimension does not match arity");
    if (completeness_error() > tol)
        throw std::invalid_argument("Kraus operators do not satisfy completeness");
}

double KrausChannel::completeness_error() const
{
    const std::size_t dim = operators.front().dim();
    GateMatrix sum = GateMatrix::identity(dim) * 0.0;
    for (const auto& k : operators)
        sum = sum + k.adjoint() * k;
    return sum.distance(GateMatrix::identity(dim));
}

void NoiseModelParams::validate() const
{
    const auto n = static_cast<std::size_t>(n_qubits);
    if (n_qubits < 1 || n_qubits > max_qubits)
        throw std::invalid_argument("noise model qubit count out of range");
    if (t1.size() != n || t2.size() != n || p1.size() != n || p2.size() != n * n)
        throw std::invalid_argument("noise model vector sizes do not match n_qubits");
    for (std::size_t q = 0; q < n; ++q) {
        if (!(t1[q] > 0.0) || !(t2[q] > 0.0))
            throw std::invalid_argument("T1 and T2 must be positive");
        if (t2[q] > 2.0 * t1[q])
            throw std::invalid_argument("T2 must not exceed 2*T1");
        if (!(p1[q] >= 0.0 && p1[q] <= 1.0))
            throw std::invalid_argument("p1 must lie in [0, 1]");
    }
    for (double p : p2)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("p2 must lie in [0, 1]");
    const GateDurations& d = durations;
    for (double t : {d.rz, d.x90, d.cnot, d.measure, d.reset})
        if (!(t >= 0.0))
            throw std::invalid_argument("gate durations must be non-negative");
}

NoiseModelParams NoiseModelParams::mean(int n_qubits)
{
    const auto n = static_cast<std::size_t>(n_qubits);
    NoiseModelParams p;
    p.n_qubits = n_qubits;
    p.t1.assign(n, 500e-6);
    p.t2.assign(n, 400e-6);
    p.p1.assign(n, 1e-4);
    p.p2.assign(n * n, 0.0);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t t = 0; t < n; ++t)
            if (c != t)
                p.p2[c * n + t] = 1e-3;
    return p;
}

NoiseModelParams NoiseModelParams::noiseless(int n_qubits)
{
    NoiseModelParams p = mean(n_qubits);
    std::fill(p.p1.begin(), p.p1.end(), 0.0);
    std::fill(p.p2.begin(), p.p2.end(), 0.0);
    p.durations = GateDurations{0.0, 0.0, 0.0, 0.0, 0.0};
    return p;
}

NoiseModelParams sample_noise_model(std::uint64_t seed, int n_qubits)
{
    NoiseModelParams p = NoiseModelParams::mean(n_qubits);
    p.seed = seed;
    Rng rng = make_rng(seed, RngStream::noise_model);
    const auto n = static_cast<std::size_t>(n_qubits);
    for (std::size_t q = 0; q < n; ++q) {
        p.t1[q] = truncated_normal(rng, 500e-6, 50e-6);
        p.t2[q] = std::min(truncated_normal(rng, 400e-6, 40e-6), 2.0 * p.t1[q]);
    }
    for (std::size_t q = 0; q < n; ++q)
        p.p1[q] = truncated_normal(rng, 1e-4, 1e-5, 1.0);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t t = 0; t < n; ++t)
            if (c != t)
                p.p2[c * n + t] = truncated_normal(rng, 1e-3, 1e-4, 1.0);
    return p;
}

KrausChannel amplitude_damping_channel(double gamma)
{
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("amplitude damping probability must lie in [0, 1]");
    const std::array<Complex, 4> k0{1.0, 0.0, 0.0, std::sqrt(1.0 - gamma)};
    const std::array<Complex, 4> k1{0.0, std::sqrt(gamma), 0.0, 0.0};
    return KrausChannel(1, {GateMatrix(2, k0), GateMatrix(2, k1)});
}

KrausChannel phase_damping_channel(double lambda)
{
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("phase damping probability must lie in [0, 1]");
    return KrausChannel(
      1,
      {GateMatrix::identity(2) * std::sqrt(1.0 - lambda / 2), gates::pauli_z() * std::sqrt(lambda / 2)});
}

KrausChannel reset_channel()
{
    const std::array<Complex, 4> k0{1.0, 0.0, 0.0, 0.0};
    const std::array<Complex, 4> k1{0.0, 1.0, 0.0, 0.0};
    return KrausChannel(1, {GateMatrix(2, k0), GateMatrix(2, k1)});
}

KrausChannel thermal_relaxation_channel(double t1, double t2, double duration)
{
    if (!(t1 > 0.0) || !(t2 > 0.0))
        throw std::invalid_argument("T1 and T2 must be positive");
    if (t2 > 2.0 * t1)
        throw std::invalid_argument("T2 must not exceed 2*T1");
    if (!(duration >= 0.0))
        throw std::invalid_argument("duration must be non-negative");
    if (duration == 0.0)
        return identity_channel(1);

    const double gamma = 1.0 - std::exp(-duration / t1);
    const double dephasing_rate = std::max(0.0, 1.0 / t2 - 1.0 / (2.0 * t1));
    const double lambda = 1.0 - std::exp(-duration * dephasing_rate);

    const KrausChannel ad = amplitude_damping_channel(gamma);
    const KrausChannel pd = phase_damping_channel(lambda);
    std::vector<GateMatrix> ops;
    for (const auto& p : pd.operators)
        for (const auto& a : ad.operators) {
            GateMatrix k = p * a;
            if (k.distance(GateMatrix::identity(2) * 0.0) > 0.0)
                ops.push_back(k);
        }
    return KrausChannel(1, std::move(ops));
}

KrausChannel depolarizing_channel(double p, int arity)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("depolarizing probability must lie in [0, 1]");
    if (arity != 1 && arity != 2)
        throw std::invalid_argument("depolarizing arity must be 1 or 2");
    if (p == 0.0)
        return identity_channel(arity);

    const std::array<GateMatrix, 4> paulis{
      GateMatrix::identity(2), gates::pauli_x(), gates::pauli_y(), gates::pauli_z()};
    const double n_paulis = arity == 1 ? 4.0 : 16.0;
    // Pauli-twirl weight giving (1-p) rho + p I/d for the full mixture.
    const double p_err = p * (n_paulis - 1.0) / n_paulis;
    const double w_err = std::sqrt(p_err / (n_paulis - 1.0));

    std::vector<GateMatrix> ops;
    if (arity == 1) {
        ops.push_back(paulis[0] * std::sqrt(1.0 - p_err));
        for (int i = 1; i < 4; ++i)
            ops.push_back(paulis[i] * w_err);
    } else {
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const double w = (a == 0 && b == 0) ? std::sqrt(1.0 - p_err) : w_err;
                ops.push_back(kron(paulis[a], paulis[b]) * w);
            }
    }
    return KrausChannel(arity, std::move(ops));
}

DensityMatrix apply_unitary(DensityMatrix rho, const GateMatrix& gate, std::span<const int> targets)
{
    check_targets(targets, rho.n_qubits_);
    if (gate.dim() != (std::size_t{1} << targets.size()))
        throw std::invalid_argument("gate dimension does not match target count");
    if (!gate.is_unitary(1e-10))
        throw std::invalid_argument("gate is not unitary");
    conjugate_in_place(rho.entries_, rho.dim_, rho.n_qubits_, gate, targets);
    return rho;
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& channel, std::span<const int> targets)
{
    if (static_cast<int>(targets.size()) != channel.arity)
        throw std::invalid_argument(
          "channel arity " + std::to_string(channel.arity) + " does not match "
          + std::to_string(targets.size()) + " target qubit(s)");
    check_targets(targets, rho.n_qubits_);

    if (channel.operators.size() == 1) {
        DensityMatrix out = rho;
        conjugate_in_place(out.entries_, out.dim_, out.n_qubits_, channel.operators.front(), targets);
        return out;
    }
    std::vector<Complex> acc(rho.entries_.size(), Complex{0.0, 0.0});
    std::vector<Complex> term;
    for (const auto& k : channel.operators) {
        term = rho.entries_;
        conjugate_in_place(term, rho.dim_, rho.n_qubits_, k, targets);
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] += term[i];
    }
    return DensityMatrix(rho.n_qubits_, std::move(acc), true);
}

std::vector<NativeOp> compile_native(const Gate& gate)
{
    using std::numbers::pi;
    const int q = gate.q0;
    auto rz = [q](double a) { return NativeOp{NativeGate::rz, q, -1, a}; };
    const NativeOp x90{NativeGate::x90, q};
    auto ry = [&](double theta, std::vector<NativeOp>& out) {
        out.insert(out.end(), {x90, rz(theta + pi), x90, rz(pi)});
    };

    std::vector<NativeOp> out;
    switch (gate.kind) {
    case GateKind::h:
        out = {rz(pi / 2), x90, rz(pi / 2)};
        break;
    case GateKind::ry:
        ry(gate.angles[0], out);
        break;
    case GateKind::rz:
        out = {rz(gate.angles[0])};
        break;
    case GateKind::rot:
        out.push_back(rz(gate.angles[0]));
        ry(gate.angles[1], out);
        out.push_back(rz(gate.angles[2]));
        break;
    case GateKind::cnot:
        out = {NativeOp{NativeGate::cnot, gate.q0, gate.q1}};
        break;
    }
    return out;
}

namespace {

DensityMatrix relax(DensityMatrix rho, const NoiseModelParams& noise, int q, double duration)
{
    if (duration == 0.0)
        return rho;
    const int t[1] = {q};
    return apply_channel(rho, thermal_relaxation_channel(noise.t1[q], noise.t2[q], duration), t);
}

DensityMatrix depolarize(DensityMatrix rho, double p, std::span<const int> targets)
{
    if (p == 0.0)
        return rho;
    return apply_channel(rho, depolarizing_channel(p, static_cast<int>(targets.size())), targets);
}

} // namespace

DensityMatrix noisy_apply_gate(DensityMatrix rho, const NativeOp& op, const NoiseModelParams& noise)
{
    if (noise.n_qubits != rho.n_qubits())
        throw std::invalid_argument("noise model and register sizes differ");
    const bool relax_first = noise.order == ChannelOrder::relax_then_depolarize;
    const GateDurations& d = noise.durations;

    switch (op.gate) {
    case NativeGate::rz: {
        const int t[1] = {op.q0};
        return apply_unitary(std::move(rho), gates::rot_z(op.angle), t);
    }
    case NativeGate::x90: {
        const int t[1] = {op.q0};
        rho = apply_unitary(std::move(rho), gates::x90(), t);
        if (relax_first)
            return depolarize(relax(std::move(rho), noise, op.q0, d.x90), noise.p1[op.q0], t);
        return relax(depolarize(std::move(rho), noise.p1[op.q0], t), noise, op.q0, d.x90);
    }
    case NativeGate::cnot: {
        const int t[2] = {op.q0, op.q1};
        rho = apply_unitary(std::move(rho), gates::cnot(), t);
        const double p = noise.cnot_error(op.q0, op.q1);
        if (!relax_first)
            rho = depolarize(std::move(rho), p, t);
        rho = relax(std::move(rho), noise, op.q0, d.cnot);
        rho = relax(std::move(rho), noise, op.q1, d.cnot);
        if (relax_first)
            rho = depolarize(std::move(rho), p, t);
        return rho;
    }
    case NativeGate::measure:
        return relax(std::move(rho), noise, op.q0, d.measure);
    case NativeGate::reset: {
        const int t[1] = {op.q0};
        rho = apply_channel(rho, reset_channel(), t);
        return relax(std::move(rho), noise, op.q0, d.reset);
    }
    }
    throw std::invalid_argument("unknown native gate");
}

DensityMatrix run_noisy_circuit(const Circuit& circuit, const NoiseModelParams& noise)
{
    DensityMatrix rho = DensityMatrix::zero_state(noise.n_qubits);
    for (int q = 0; q < noise.n_qubits; ++q)
        rho = noisy_apply_gate(std::move(rho), NativeOp{NativeGate::reset, q}, noise);
    for (const Gate& g : circuit)
        for (const NativeOp& op : compile_native(g))
            rho = noisy_apply_gate(std::move(rho), op, noise);
    for (int q = 0; q < noise.n_qubits; ++q)
        rho = noisy_apply_gate(std::move(rho), NativeOp{NativeGate::measure, q}, noise);
    return rho;
}

double pauli_z_expectation_dm(const DensityMatrix& rho, int qubit)
{
    if (qubit < 0 || qubit >= rho.n_qubits())
        throw std::invalid_argument("measured qubit out of range");
    const std::size_t bit = bit_of(qubit, rho.n_qubits());
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.dim(); ++i)
        acc += (i & bit) ? -rho(i, i).real() : rho(i, i).real();
    return std::clamp(acc, -1.0, 1.0);
}

} // namespace qrc

#include "qrc/vqc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qrc {

namespace {

constexpr std::array<std::pair<int, int>, 8> entangler_wiring{{
  {0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}, {2, 0}, {3, 1},
}};

void check_input(std::span<const double> x)
{
    if (x.size() != vqc_qubits)
        throw std::invalid_argument(
          "VQC input must have " + std::to_string(vqc_qubits) + " entries, got " + std::to_string(x.size()));
}

void check_n_meas(int n_meas)
{
    if (n_meas < 1 || n_meas > vqc_qubits)
        throw std::invalid_argument("measurement count must be in [1, 4]");
}

void append_encoding(Circuit& c, std::span<const double> x)
{
    for (int q = 0; q < vqc_qubits; ++q) {
        c.push_back(Gate::h(q));
        c.push_back(Gate::ry(q, std::atan(x[q])));
        c.push_back(Gate::rz(q, std::atan(x[q] * x[q])));
    }
}

void append_entangler(Circuit& c)
{
    for (auto [control, target] : entangler_wiring)
        c.push_back(Gate::cx(control, target));
}

struct ShotSampler {
    int shots;
    Rng* rng;

    double operator()(double expectation) const
    {
        const double p0 = std::clamp((1.0 + expectation) / 2.0, 0.0, 1.0);
        std::binomial_distribution<int> dist(shots, p0);
        return 2.0 * dist(*rng) / shots - 1.0;
    }
};

// Executes the circuit without touching any counter.
VqcOutput execute(const VqcParams& params, std::span<const double> x, int n_meas, const Backend& backend)
{
    const Circuit circuit = vqc_circuit(params, x);
    VqcOutput out(static_cast<std::size_t>(n_meas));
    if (std::holds_alternative<NoiselessBackend>(backend)) {
        const StateVector psi = run_circuit(circuit, new_zero_state(vqc_qubits));
        for (int q = 0; q < n_meas; ++q)
            out[q] = pauli_z_expectation(psi, q);
        return out;
    }
    const auto& noisy = std::get<NoisyBackend>(backend);
    const DensityMatrix rho = run_noisy_circuit(circuit, noisy.noise);
    for (int q = 0; q < n_meas; ++q)
        out[q] = pauli_z_expectation_dm(rho, q);
    if (noisy.shots > 0) {
        if (!noisy.shot_rng)
            throw std::invalid_argument("finite-shot sampling needs a shot RNG");
        const ShotSampler sample{noisy.shots, noisy.shot_rng.get()};
        for (double& e : out)
            e = sample(e);
    }
    return out;
}

} // namespace

EvalCounter& global_eval_counter()
{
    static EvalCounter counter;
    return counter;
}

VqcParams::VqcParams(int depth)
  : VqcParams(depth, std::vector<double>(count_for_depth(depth > 0 ? depth : 0), 0.0))
{
}

VqcParams::VqcParams(int depth, std::vector<double> angles)
  : depth_(depth)
  , angles_(std::move(angles))
{
    if (depth < 1)
        throw std::invalid_argument("VQC depth must be positive");
    if (angles_.size() != count_for_depth(depth))
        throw std::invalid_argument(
          "VQC of depth " + std::to_string(depth) + " needs " + std::to_string(count_for_depth(depth))
          + " angles, got " + std::to_string(angles_.size()));
}

VqcParams VqcParams::random(int depth, Rng& rng)
{
    std::uniform_real_distribution<double> dist(-std::numbers::pi, std::numbers::pi);
    std::vector<double> angles(count_for_depth(depth));
    for (double& a : angles)
        a = dist(rng);
    return VqcParams(depth, std::move(angles));
}

StateVector encode(std::span<const double> x)
{
    check_input(x);
    Circuit c;
    append_encoding(c, x);
    return run_circuit(c, new_zero_state(vqc_qubits));
}

StateVector entangle_block(StateVector state)
{
    if (state.n_qubits() != vqc_qubits)
        throw std::invalid_argument("entangling block acts on exactly 4 qubits");
    for (auto [control, target] : entangler_wiring)
        state = apply_cnot(std::move(state), control, target);
    return state;
}

Circuit vqc_circuit(const VqcParams& params, std::span<const double> x)
{
    check_input(x);
    Circuit c;
    c.reserve(static_cast<std::size_t>(3 * vqc_qubits + params.depth() * (8 + vqc_qubits)));
    append_encoding(c, x);
    for (int block = 0; block < params.depth(); ++block) {
        append_entangler(c);
        for (int q = 0; q < vqc_qubits; ++q)
            c.push_back(Gate::rot(q, params.angle(block, q, 0), params.angle(block, q, 1), params.angle(block, q, 2)));
    }
    return c;
}

VqcOutput vqc_forward(
  const VqcParams& params, std::span<const double> x, int n_meas, const Backend& backend, EvalCounter& counter)
{
    check_n_meas(n_meas);
    VqcOutput out = execute(params, x, n_meas, backend);
    counter.forward.fetch_add(1, std::memory_order_relaxed);
    return out;
}

Jacobian parameter_shift_jacobian(
  const VqcParams& params, std::span<const double> x, int n_meas, const Backend& backend, EvalCounter& counter)
{
    check_n_meas(n_meas);
    check_input(x);
    constexpr double shift = std::numbers::pi / 2;
    const std::size_t n_params = params.size();
    Jacobian jac{static_cast<std::size_t>(n_meas), n_params, std::vector<double>(n_meas * n_params)};

    VqcParams shifted = params;
    for (std::size_t k = 0; k < n_params; ++k) {
        const double original = params.angles()[k];
        shifted.angles()[k] = original + shift;
        const VqcOutput plus = execute(shifted, x, n_meas, backend);
        shifted.angles()[k] = original - shift;
        const VqcOutput minus = execute(shifted, x, n_meas, backend);
        shifted.angles()[k] = original;
        for (int j = 0; j < n_meas; ++j)
            jac.values[j * n_params + k] = (plus[j] - minus[j]) / 2.0;
    }
    counter.shift.fetch_add(2 * n_params, std::memory_order_relaxed);
    return jac;
}

std::vector<double> vector_jacobian_product(const Jacobian& jac, std::span<const double> upstream)
{
    if (upstream.size() != jac.rows)
        throw std::invalid_argument("upstream gradient length does not match measurement count");
    std::vector<double> grad(jac.cols, 0.0);
    for (std::size_t r = 0; r < jac.rows; ++r)
        for (std::size_t c = 0; c < jac.cols; ++c)
            grad[c] += upstream[r] * jac(r, c);
    return grad;
}

std::vector<double> parameter_shift_gradient(
  const VqcParams& params,
  std::span<const double> x,
  int n_meas,
  std::span<const double> upstream,
  const Backend& backend,
  EvalCounter& counter)
{
    if (upstream.size() != static_cast<std::size_t>(n_meas))
        throw std::invalid_argument("upstream gradient length does not match measurement count");
    return vector_jacobian_product(parameter_shift_jacobian(params, x, n_meas, backend, counter), upstream);
}

} // namespace qrc

#pragma once

// The 4-qubit variational circuit used by every quantum recurrent cell.
//
//   |0> - H - Ry(atan x_i) - Rz(atan x_i^2) - [ CNOT ring x8 - R(a,b,c) ] x depth - <Z>
//
// Gradients with respect to the rotation angles use the parameter-shift rule
// (two circuit executions per angle). Executions are tallied in an EvalCounter.

#include "qrc/density_matrix.hpp"
#include "qrc/random.hpp"
#include "qrc/state_vector.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace qrc {

inline constexpr int vqc_qubits = 4;
inline constexpr int angles_per_rotation = 3;

/// Circuit-execution tally: plain forward passes and parameter-shift executions.
struct EvalCounter {
    std::atomic<std::uint64_t> forward{0};
    std::atomic<std::uint64_t> shift{0};

    std::uint64_t total() const { return forward.load() + shift.load(); }
    void reset()
    {
        forward = 0;
        shift = 0;
    }
};

EvalCounter& global_eval_counter();

/// Rotation angles of one circuit, laid out [block][qubit][alpha, beta, gamma].
class VqcParams {
public:
    /// All angles zero.
    explicit VqcParams(int depth);
    VqcParams(int depth, std::vector<double> angles);

    /// i.i.d. Uniform(-pi, pi).
    static VqcParams random(int depth, Rng& rng);

    static std::size_t count_for_depth(int depth)
    {
        return static_cast<std::size_t>(depth) * vqc_qubits * angles_per_rotation;
    }

    int depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return angles_.size(); }
    std::span<const double> angles() const noexcept { return angles_; }
    std::span<double> angles() noexcept { return angles_; }

    double angle(int block, int qubit, int which) const
    {
        return angles_[(static_cast<std::size_t>(block) * vqc_qubits + qubit) * angles_per_rotation + which];
    }

    friend bool operator==(const VqcParams&, const VqcParams&) = default;

private:
    int depth_;
    std::vector<double> angles_;
};

struct NoiselessBackend {};

struct NoisyBackend {
    NoiseModelParams noise = NoiseModelParams::mean();
    /// 0 means exact expectations from rho; otherwise per-qubit binomial sampling.
    int shots = 0;
    std::shared_ptr<Rng> shot_rng;
};

using Backend = std::variant<NoiselessBackend, NoisyBackend>;

using VqcOutput = std::vector<double>;

/// H, Ry(atan x_i), Rz(atan x_i^2) on each qubit of |0000>.
StateVector encode(std::span<const double> x);

/// CNOTs (0,1) (1,2) (2,3) (3,0) (0,2) (1,3) (2,0) (3,1) in that order.
StateVector entangle_block(StateVector state);

/// Full gate list: encoding, then per block the CNOT cascade and R(a,b,c) on each qubit.
Circuit vqc_circuit(const VqcParams& params, std::span<const double> x);

/// Z expectations of qubits 0..n_meas-1; counts one forward execution.
VqcOutput vqc_forward(
  const VqcParams& params,
  std::span<const double> x,
  int n_meas,
  const Backend& backend = NoiselessBackend{},
  EvalCounter& counter = global_eval_counter());

/// d<Z_j>/d theta_k, row-major n_meas x params.size().
struct Jacobian {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Two shifted executions (+-pi/2) per angle, tallied as shift evaluations.
Jacobian parameter_shift_jacobian(
  const VqcParams& params,
  std::span<const double> x,
  int n_meas,
  const Backend& backend = NoiselessBackend{},
  EvalCounter& counter = global_eval_counter());

/// Vector-Jacobian product upstream^T J.
std::vector<double> vector_jacobian_product(const Jacobian& jac, std::span<const double> upstream);

std::vector<double> parameter_shift_gradient(
  const VqcParams& params,
  std::span<const double> x,
  int n_meas,
  std::span<const double> upstream,
  const Backend& backend = NoiselessBackend{},
  EvalCounter& counter = global_eval_counter());

} // namespace qrc

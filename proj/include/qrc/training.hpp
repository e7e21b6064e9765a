#pragma once

#include "qrc/cells.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qrc {

inline constexpr int default_window = 4;
inline constexpr double train_fraction = 0.67;

struct WindowedDataset {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    std::size_t split_index = 0;

    std::size_t size() const noexcept { return targets.size(); }
};

/// Window k is series[k..k+n) with target (target_series or series)[k+n].
WindowedDataset make_windows(
  std::span<const double> series, int n, std::optional<std::span<const double>> target_series = std::nullopt);

double mse(std::span<const double> predictions, std::span<const double> targets);

struct RmspropConfig {
    double learning_rate = 0.01;
    double alpha = 0.99;
    double eps = 1e-8;
};

struct RmspropState {
    RmspropConfig config;
    std::vector<double> second_moment;
};

struct RmspropResult {
    RmspropState state;
    std::vector<double> params;
};

/// s <- alpha s + (1 - alpha) g^2;  theta <- theta - lr g / (sqrt(s) + eps).
RmspropResult rmsprop_step(RmspropState state, std::vector<double> params, std::span<const double> grads);

enum class Split { train, test, all };

struct Evaluation {
    double mse = 0.0;
    std::vector<double> predictions;
};

Evaluation evaluate(
  const CellWeights& w,
  const WindowedDataset& data,
  Split split,
  const Backend& backend = NoiselessBackend{},
  EvalCounter& counter = global_eval_counter());

struct EpochLog {
    int epoch = 0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    std::uint64_t circuit_evals = 0; ///< cumulative forward + shift executions
    std::uint64_t shift_evals = 0;   ///< cumulative shift executions
    double seconds = 0.0;            ///< cumulative wall time
};

struct TrainingLog {
    std::vector<EpochLog> epochs;
};

/// Per-window RMSprop over the training split in fixed order; after each epoch
/// the train and test MSE are recorded. Updates w in place.
TrainingLog train(
  CellWeights& w,
  const WindowedDataset& data,
  TrainMode mode,
  int epochs,
  const Backend& backend = NoiselessBackend{},
  EvalCounter& counter = global_eval_counter(),
  const RmspropConfig& optimizer = {});

} // namespace qrc

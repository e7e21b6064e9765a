#include "qrc/training.hpp"

#include "qrc/errors.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qrc {

WindowedDataset make_windows(std::span<const double> series, int n, std::optional<std::span<const double>> target_series)
{
    if (n < 1)
        throw std::invalid_argument("window length must be positive");
    const std::size_t len = static_cast<std::size_t>(n);
    if (series.size() <= len)
        throw std::invalid_argument(
          "series of length " + std::to_string(series.size()) + " is too short for windows of " + std::to_string(n));
    const std::span<const double> targets = target_series.value_or(series);
    if (targets.size() != series.size())
        throw std::invalid_argument("target series must match the input series length");

    WindowedDataset d;
    const std::size_t count = series.size() - len;
    d.inputs.reserve(count);
    d.targets.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        d.inputs.emplace_back(series.begin() + static_cast<std::ptrdiff_t>(k),
                              series.begin() + static_cast<std::ptrdiff_t>(k + len));
        d.targets.push_back(targets[k + len]);
    }
    d.split_index = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(count)));
    return d;
}

double mse(std::span<const double> predictions, std::span<const double> targets)
{
    if (predictions.size() != targets.size())
        throw std::invalid_argument("predictions and targets differ in length");
    if (predictions.empty())
        throw std::invalid_argument("mse of an empty set is undefined");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - targets[i];
        acc += d * d;
    }
    return acc / static_cast<double>(predictions.size());
}

RmspropResult rmsprop_step(RmspropState state, std::vector<double> params, std::span<const double> grads)
{
    if (params.size() != grads.size())
        throw std::invalid_argument("parameter and gradient lengths differ");
    if (state.second_moment.empty())
        state.second_moment.assign(params.size(), 0.0);
    if (state.second_moment.size() != params.size())
        throw std::invalid_argument("optimizer state does not match the parameter layout");
    const auto& c = state.config;
    for (std::size_t i = 0; i < params.size(); ++i) {
        double& s = state.second_moment[i];
        s = c.alpha * s + (1.0 - c.alpha) * grads[i] * grads[i];
        params[i] -= c.learning_rate * grads[i] / (std::sqrt(s) + c.eps);
    }
    return {std::move(state), std::move(params)};
}

Evaluation evaluate(
  const CellWeights& w, const WindowedDataset& data, Split split, const Backend& backend, EvalCounter& counter)
{
    std::size_t begin = 0, end = data.size();
    if (split == Split::train)
        end = data.split_index;
    else if (split == Split::test)
        begin = data.split_index;

    Evaluation e;
    e.predictions.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k)
        e.predictions.push_back(rollout(w, data.inputs[k], backend, counter));
    e.mse = e.predictions.empty()
      ? std::numeric_limits<double>::quiet_NaN()
      : mse(e.predictions, std::span(data.targets).subspan(begin, end - begin));
    return e;
}

TrainingLog train(
  CellWeights& w,
  const WindowedDataset& data,
  TrainMode mode,
  int epochs,
  const Backend& backend,
  EvalCounter& counter,
  const RmspropConfig& optimizer)
{
    if (epochs < 0)
        throw std::invalid_argument("epoch count must be non-negative");
    if (epochs > 0 && data.split_index == 0)
        throw std::invalid_argument("training split is empty");

    TrainingLog log;
    const std::uint64_t forward0 = counter.forward.load();
    const std::uint64_t shift0 = counter.shift.load();
    const auto start = std::chrono::steady_clock::now();

    RmspropState opt{optimizer, {}};
    std::vector<double> params = trainable_parameters(w, mode);
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        for (std::size_t k = 0; k < data.split_index; ++k) {
            const LossGradient lg = loss_gradient(w, data.inputs[k], data.targets[k], mode, backend, counter);
            auto step = rmsprop_step(std::move(opt), std::move(params), lg.gradient);
            opt = std::move(step.state);
            params = std::move(step.params);
            if (!std::isfinite(lg.loss))
                throw DivergenceError("training loss became non-finite");
            set_trainable_parameters(w, mode, params);
        }
        EpochLog e;
        e.epoch = epoch;
        e.train_mse = evaluate(w, data, Split::train, backend, counter).mse;
        e.test_mse = evaluate(w, data, Split::test, backend, counter).mse;
        e.shift_evals = counter.shift.load() - shift0;
        e.circuit_evals = counter.forward.load() - forward0 + e.shift_evals;
        e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log.epochs.push_back(e);
    }
    return log;
}

} // namespace qrc

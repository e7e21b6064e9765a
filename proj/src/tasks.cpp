#include "qrc/tasks.hpp"

#include "qrc/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qrc {

namespace {

using PendulumState = std::array<double, 2>; // theta, omega

void validate(const PendulumConfig& cfg)
{
    if (cfg.n_points < 2)
        throw std::invalid_argument("pendulum n_points must be at least 2");
    if (!(cfg.t_end > 0.0))
        throw std::invalid_argument("pendulum t_end must be positive");
    if (cfg.substeps < 1)
        throw std::invalid_argument("pendulum substeps must be positive");
    if (!(cfg.length > 0.0) || !(cfg.mass > 0.0))
        throw std::invalid_argument("pendulum length and mass must be positive");
}

void validate(const BesselConfig& cfg)
{
    if (cfg.order < 0)
        throw std::invalid_argument("Bessel order must be non-negative");
    if (cfg.n_points < 2)
        throw std::invalid_argument("Bessel n_points must be at least 2");
    if (!(cfg.x_start < cfg.x_end))
        throw std::invalid_argument("Bessel grid needs x_start < x_end");
    if (cfg.x_start < 0.0)
        throw std::invalid_argument("Bessel grid must be non-negative");
}

void validate(const NarmaConfig& cfg)
{
    if (cfg.n0 < 1)
        throw std::invalid_argument("NARMA order must be positive");
    if (cfg.length <= cfg.n0)
        throw std::invalid_argument("NARMA length must exceed its order");
    if (!(cfg.period > 0.0))
        throw std::invalid_argument("NARMA input period must be positive");
}

} // namespace

PendulumTrajectory pendulum_trajectory(const PendulumConfig& cfg)
{
    validate(cfg);
    const double damping = cfg.b / cfg.mass;
    const double stiffness = cfg.g / cfg.length;
    auto deriv = [&](const PendulumState& s) -> PendulumState {
        const double restoring = cfg.linearized ? s[0] : std::sin(s[0]);
        return {s[1], -damping * s[1] - stiffness * restoring};
    };

    const double h = cfg.t_end / (static_cast<double>(cfg.n_points - 1) * cfg.substeps);
    PendulumState s{cfg.theta0, cfg.omega0};
    PendulumTrajectory out;
    out.theta.reserve(static_cast<std::size_t>(cfg.n_points));
    out.omega.reserve(static_cast<std::size_t>(cfg.n_points));
    out.theta.push_back(s[0]);
    out.omega.push_back(s[1]);
    for (int k = 1; k < cfg.n_points; ++k) {
        for (int sub = 0; sub < cfg.substeps; ++sub) {
            const PendulumState k1 = deriv(s);
            const PendulumState k2 = deriv({s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1]});
            const PendulumState k3 = deriv({s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1]});
            const PendulumState k4 = deriv({s[0] + h * k3[0], s[1] + h * k3[1]});
            for (int i = 0; i < 2; ++i)
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.theta.push_back(s[0]);
        out.omega.push_back(s[1]);
    }
    return out;
}

std::vector<double> pendulum_series(const PendulumConfig& cfg)
{
    return pendulum_trajectory(cfg).omega;
}

double bessel_series_fn(int order, double x)
{
    if (order < 0)
        throw std::invalid_argument("Bessel order must be non-negative");
    if (!(x >= 0.0))
        throw std::invalid_argument("Bessel argument must be non-negative");

    // Extended precision keeps the alternating sum accurate for x up to a few tens.
    const long double half = static_cast<long double>(x) / 2.0L;
    long double term = 1.0L;
    for (int k = 1; k <= order; ++k)
        term *= half / k;
    long double sum = term;
    const long double q = -half * half;
    for (int m = 0; m < 10000; ++m) {
        term *= q / (static_cast<long double>(m + 1) * static_cast<long double>(m + 1 + order));
        sum += term;
        if (std::fabs(term) < 1e-15L * (1.0L + std::fabs(sum)))
            break;
    }
    return static_cast<double>(sum);
}

std::vector<double> bessel_grid(const BesselConfig& cfg)
{
    validate(cfg);
    std::vector<double> x(static_cast<std::size_t>(cfg.n_points));
    const double step = (cfg.x_end - cfg.x_start) / (cfg.n_points - 1);
    for (int k = 0; k < cfg.n_points; ++k)
        x[k] = cfg.x_start + step * k;
    x.back() = cfg.x_end;
    return x;
}

std::vector<double> bessel_series(const BesselConfig& cfg)
{
    std::vector<double> values = bessel_grid(cfg);
    for (double& v : values)
        v = bessel_series_fn(cfg.order, v);
    return values;
}

std::vector<double> narma_input(const NarmaConfig& cfg)
{
    validate(cfg);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> u(static_cast<std::size_t>(cfg.length));
    for (int t = 1; t <= cfg.length; ++t) {
        const double phase = two_pi * t / cfg.period;
        u[t - 1] = 0.1 * (std::sin(cfg.input_a * phase) * std::sin(cfg.input_b * phase) * std::sin(cfg.input_c * phase) + 1.0);
    }
    return u;
}

std::vector<double> narma_series(const std::vector<double>& u, const NarmaConfig& cfg)
{
    validate(cfg);
    if (u.size() != static_cast<std::size_t>(cfg.length))
        throw std::invalid_argument("NARMA input length does not match the configured length");
    const int n0 = cfg.n0;
    // 1-based views: y(t) = y[t-1].
    std::vector<double> y(u.size(), 0.0);
    auto U = [&](int t) { return u[static_cast<std::size_t>(t - 1)]; };
    auto Y = [&](int t) { return y[static_cast<std::size_t>(t - 1)]; };
    for (int t = n0; t < cfg.length; ++t) {
        double window = 0.0;
        for (int j = 0; j < n0; ++j)
            window += Y(t - j);
        const double next = cfg.alpha * Y(t) + cfg.beta * Y(t) * window + cfg.gamma * U(t - n0 + 1) * U(t) + cfg.delta;
        if (!std::isfinite(next))
            throw DivergenceError("NARMA recurrence diverged at t = " + std::to_string(t + 1));
        y[static_cast<std::size_t>(t)] = next;
    }
    return y;
}

std::string_view to_string(TaskId task)
{
    switch (task) {
    case TaskId::damped_shm: return "damped_shm";
    case TaskId::bessel: return "bessel";
    case TaskId::narma5: return "narma5";
    case TaskId::narma10: return "narma10";
    }
    return "?";
}

TaskId parse_task_id(std::string_view name)
{
    std::string lower(name);
    for (char& ch : lower)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower == "damped_shm") return TaskId::damped_shm;
    if (lower == "bessel") return TaskId::bessel;
    if (lower == "narma5") return TaskId::narma5;
    if (lower == "narma10") return TaskId::narma10;
    throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

bool is_function_approximation(TaskId task)
{
    return task == TaskId::damped_shm || task == TaskId::bessel;
}

TaskSeries task_series(TaskId task, const TaskOverrides& overrides)
{
    TaskSeries out;
    switch (task) {
    case TaskId::damped_shm: out.inputs = pendulum_series(overrides.pendulum.value_or(PendulumConfig{})); break;
    case TaskId::bessel: out.inputs = bessel_series(overrides.bessel.value_or(BesselConfig{})); break;
    case TaskId::narma5:
    case TaskId::narma10: {
        NarmaConfig cfg = overrides.narma.value_or(NarmaConfig{});
        cfg.n0 = task == TaskId::narma5 ? 5 : 10;
        out.inputs = narma_input(cfg);
        out.targets = narma_series(out.inputs, cfg);
        return out;
    }
    }
    out.targets = out.inputs;
    return out;
}

TaskSeries minmax_normalized(TaskSeries series)
{
    if (series.targets.empty())
        throw std::invalid_argument("cannot normalize an empty series");
    const auto [lo, hi] = std::minmax_element(series.targets.begin(), series.targets.end());
    const double low = *lo, span = *hi - *lo;
    if (!(span > 0.0))
        throw std::invalid_argument("cannot normalize a constant series");
    for (auto* v : {&series.inputs, &series.targets})
        for (double& x : *v)
            x = 2.0 * (x - low) / span - 1.0;
    return series;
}

} // namespace qrc

#pragma once

// Benchmark series: damped pendulum angular velocity, Bessel J_2, NARMA5/10.

#include <optional>
#include <string_view>
#include <vector>

namespace qrc {

struct PendulumConfig {
    double g = 9.81;
    double b = 0.15;
    double length = 1.0;
    double mass = 1.0;
    double theta0 = 0.0;
    double omega0 = 3.0;
    double t_end = 10.0;
    int n_points = 100;
    /// RK4 steps per output interval.
    int substeps = 100;
    /// Replace sin(theta) by theta.
    bool linearized = false;

    friend bool operator==(const PendulumConfig&, const PendulumConfig&) = default;
};

/// Angular velocity samples on t_k = k * t_end / (n_points - 1).
std::vector<double> pendulum_series(const PendulumConfig& cfg);

/// Both angle and angular velocity on the same grid.
struct PendulumTrajectory {
    std::vector<double> theta;
    std::vector<double> omega;
};

PendulumTrajectory pendulum_trajectory(const PendulumConfig& cfg);

struct BesselConfig {
    int order = 2;
    double x_start = 0.0;
    double x_end = 20.0;
    int n_points = 100;

    friend bool operator==(const BesselConfig&, const BesselConfig&) = default;
};

/// J_order(x) by power series with term recurrence.
double bessel_series_fn(int order, double x);

std::vector<double> bessel_grid(const BesselConfig& cfg);
std::vector<double> bessel_series(const BesselConfig& cfg);

struct NarmaConfig {
    double alpha = 0.3;
    double beta = 0.05;
    double gamma = 1.5;
    double delta = 0.1;
    int n0 = 5;
    int length = 300;
    double input_a = 2.11;
    double input_b = 3.73;
    double input_c = 4.11;
    double period = 100.0;

    friend bool operator==(const NarmaConfig&, const NarmaConfig&) = default;
};

/// u_t for t = 1..length; element k holds u_{k+1}.
std::vector<double> narma_input(const NarmaConfig& cfg);

/// y_t for t = 1..length with y_t = 0 for t <= n0; element k holds y_{k+1}.
std::vector<double> narma_series(const std::vector<double>& u, const NarmaConfig& cfg);

enum class TaskId { damped_shm, bessel, narma5, narma10 };

std::string_view to_string(TaskId task);
TaskId parse_task_id(std::string_view name);

/// Function approximation (damped SHM, Bessel) or time-series prediction (NARMA).
bool is_function_approximation(TaskId task);

struct TaskOverrides {
    std::optional<PendulumConfig> pendulum;
    std::optional<BesselConfig> bessel;
    std::optional<NarmaConfig> narma;

    friend bool operator==(const TaskOverrides&, const TaskOverrides&) = default;
};

struct TaskSeries {
    std::vector<double> inputs;
    std::vector<double> targets; ///< equals inputs for self-prediction tasks
};

TaskSeries task_series(TaskId task, const TaskOverrides& overrides = {});

/// Affine map sending the target range onto [-1, 1], applied to inputs and targets alike.
TaskSeries minmax_normalized(TaskSeries series);

} // namespace qrc

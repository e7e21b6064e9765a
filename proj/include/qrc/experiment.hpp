#pragma once

// Experiment configuration, single runs, sweeps, and their on-disk artifacts.
//
// A run directory holds config.json (with any sampled noise model pinned),
// loss_log.csv, predictions.csv, checkpoint.json and summary.json.

#include "qrc/cells.hpp"
#include "qrc/density_matrix.hpp"
#include "qrc/tasks.hpp"
#include "qrc/training.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

inline constexpr int config_schema_version = 1;

enum class BackendKind { noiseless, noisy };
enum class NoiseSource { sampled, mean };

struct BackendConfig {
    BackendKind kind = BackendKind::noiseless;
    NoiseSource source = NoiseSource::sampled;
    /// When set, used verbatim instead of `source`.
    std::optional<NoiseModelParams> noise;
    int shots = 0;

    friend bool operator==(const BackendConfig&, const BackendConfig&) = default;
};

struct ExperimentConfig {
    int schema_version = config_schema_version;
    TaskId task = TaskId::narma5;
    ModelKind model = ModelKind::qrnn;
    TrainMode mode = TrainMode::reservoir;
    std::optional<int> depth;
    /// Min-max scale the series to [-1, 1] before windowing; defaults to true for damped SHM only.
    std::optional<bool> normalize;
    int epochs = 100;
    std::uint64_t seed = 0;
    int window = default_window;
    BackendConfig backend;
    TaskOverrides task_overrides;
    std::string output_dir = "run";

    /// Explicit depth, else 2 for function approximation and 4 for NARMA; 0 for classical models.
    int effective_depth() const;
    bool effective_normalize() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Pretty-printed JSON.
std::string config_to_text(const ExperimentConfig& cfg);

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical config text without output_dir, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Replaces a noisy backend's unpinned noise model by the concrete one it resolves to.
ExperimentConfig resolve_noise(ExperimentConfig cfg);

Backend make_backend(const ExperimentConfig& cfg);

WindowedDataset make_dataset(const ExperimentConfig& cfg);

std::string checkpoint_to_text(const CellWeights& w, const ExperimentConfig& cfg);

struct Checkpoint {
    CellWeights weights;
    std::string config_hash;
};

Checkpoint parse_checkpoint(std::string_view text);

struct RunSummary {
    ExperimentConfig config;
    std::vector<EpochLog> reported; ///< epochs 1, 15, 30, 100 where reached
    double final_train_mse = 0.0;
    double final_test_mse = 0.0;
    std::uint64_t circuit_evals = 0;
    std::uint64_t shift_evals = 0;
    double seconds = 0.0;
    std::string error; ///< empty on success
    std::filesystem::path run_dir;

    bool ok() const { return error.empty(); }
};

inline constexpr std::array<int, 4> reported_epochs{1, 15, 30, 100};

/// Trains one model and writes its artifacts into cfg.output_dir.
/// Invalid configs throw; a diverging run is reported through RunSummary::error.
RunSummary run(const ExperimentConfig& cfg);

struct SweepResult {
    std::vector<RunSummary> runs;
    std::filesystem::path table_path;
};

/// Runs every config (each in its own output_dir) on up to `jobs` threads and
/// writes sweep_table.csv into `output_dir`. Failures are isolated per run.
SweepResult sweep(const std::vector<ExperimentConfig>& configs, const std::filesystem::path& output_dir, int jobs = 1);

/// A sweep file holds either an explicit "runs" list or a "grid" over tasks,
/// models, modes and seeds applied to a "base" config.
struct SweepSpec {
    std::vector<ExperimentConfig> configs;
    std::filesystem::path output_dir;
};

SweepSpec parse_sweep(std::string_view text);

/// Sweep table rows: Dataset,Model,Reservoir,Seed,Epoch 1,...,Epoch 100 with "train/test" cells.
std::string sweep_table(const std::vector<RunSummary>& runs);

/// Re-evaluates the checkpoint in `run_dir` and writes `out` (default run_dir/plot_data.csv).
/// Throws NotFoundError when the run artifacts are missing.
std::filesystem::path emit_plot_data(const std::filesystem::path& run_dir, std::optional<std::filesystem::path> out = {});

/// "index,target,prediction,split" rows, one per window.
std::string predictions_csv(const WindowedDataset& data, std::span<const double> predictions);

std::string loss_log_csv(const TrainingLog& log);

/// "index,value" or "index,value,target" rows.
std::string task_csv(const TaskSeries& series, bool with_target);

/// Shortest round-trip decimal form.
std::string format_double(double v);

} // namespace qrc

#include "qrc/errors.hpp"
#include "qrc/experiment.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

namespace fs = std::filesystem;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::string> backend;
    std::optional<int> epochs;
};

void add_override_flags(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--seed", o.seed, "Override the experiment seed");
    cmd->add_option("--output-dir,-o", o.output_dir, "Override the output directory");
    cmd->add_option("--backend", o.backend, "Override the backend kind")->check(CLI::IsMember({"noiseless", "noisy"}));
    cmd->add_option("--epochs", o.epochs, "Override the epoch count")->check(CLI::NonNegativeNumber);
}

void apply(const Overrides& o, qrc::ExperimentConfig& cfg)
{
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.output_dir)
        cfg.output_dir = *o.output_dir;
    if (o.backend)
        cfg.backend.kind = *o.backend == "noisy" ? qrc::BackendKind::noisy : qrc::BackendKind::noiseless;
    if (o.epochs)
        cfg.epochs = *o.epochs;
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw qrc::NotFoundError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string mse_text(double v)
{
    return std::isnan(v) ? "n/a" : qrc::format_double(v);
}

void print_summary(const qrc::RunSummary& s)
{
    std::cout << s.run_dir.string() << ": ";
    if (!s.ok()) {
        std::cout << "error: " << s.error << '\n';
        return;
    }
    std::cout << "train_mse=" << mse_text(s.final_train_mse) << " test_mse=" << mse_text(s.final_test_mse)
              << " circuit_evals=" << s.circuit_evals << " shift_evals=" << s.shift_evals << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum recurrent networks for reservoir computing"};
    app.require_subcommand(1);

    fs::path config_path;
    Overrides run_over;
    auto* run_cmd = app.add_subcommand("run", "Train one model and write its artifacts");
    run_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();
    add_override_flags(run_cmd, run_over);

    fs::path sweep_path;
    std::optional<std::string> sweep_out;
    int jobs = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a list or grid of configs and tabulate them");
    sweep_cmd->add_option("sweep", sweep_path, "Sweep file (JSON)")->required();
    sweep_cmd->add_option("--output-dir,-o", sweep_out, "Override the sweep output directory");
    sweep_cmd->add_option("--jobs,-j", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

    fs::path plot_dir;
    std::optional<fs::path> plot_out;
    auto* plot_cmd = app.add_subcommand("emit-plot-data", "Re-evaluate a finished run into a plot CSV");
    plot_cmd->add_option("run_dir", plot_dir, "Run output directory")->required();
    plot_cmd->add_option("--out", plot_out, "Output CSV path");

    std::string task_name;
    std::optional<fs::path> task_out;
    std::optional<fs::path> task_config;
    auto* gen_cmd = app.add_subcommand("generate-task", "Write a task series as CSV");
    gen_cmd->add_option("task", task_name, "damped_shm, bessel, narma5 or narma10")->required();
    gen_cmd->add_option("--out", task_out, "Output CSV path (default: stdout)");
    gen_cmd->add_option("--config", task_config, "Experiment config whose task_overrides apply");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            qrc::ExperimentConfig cfg = qrc::load_config(config_path);
            apply(run_over, cfg);
            const qrc::RunSummary s = qrc::run(cfg);
            print_summary(s);
            return s.ok() ? 0 : 3;
        }
        if (*sweep_cmd) {
            qrc::SweepSpec spec = qrc::parse_sweep(read_text(sweep_path));
            if (sweep_out) {
                for (auto& c : spec.configs)
                    c.output_dir = (fs::path(*sweep_out) / fs::relative(c.output_dir, spec.output_dir)).string();
                spec.output_dir = *sweep_out;
            }
            const qrc::SweepResult r = qrc::sweep(spec.configs, spec.output_dir, jobs);
            bool all_ok = true;
            for (const auto& s : r.runs) {
                print_summary(s);
                all_ok = all_ok && s.ok();
            }
            std::cout << "table: " << r.table_path.string() << '\n';
            return all_ok ? 0 : 3;
        }
        if (*plot_cmd) {
            std::cout << qrc::emit_plot_data(plot_dir, plot_out).string() << '\n';
            return 0;
        }
        if (*gen_cmd) {
            const qrc::TaskId task = qrc::parse_task_id(task_name);
            qrc::TaskOverrides overrides;
            if (task_config)
                overrides = qrc::load_config(*task_config).task_overrides;
            const std::string csv = qrc::task_csv(qrc::task_series(task, overrides), !qrc::is_function_approximation(task));
            if (task_out) {
                std::ofstream out(*task_out, std::ios::binary);
                if (!out)
                    throw std::runtime_error("cannot write " + task_out->string());
                out << csv;
            } else {
                std::cout << csv;
            }
            return 0;
        }
    } catch (const qrc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qrc::NotFoundError& e) {
        std::cerr << "not found: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero on any failure.

#include "oracles.hpp"

#include "qrc/cells.hpp"
#include "qrc/density_matrix.hpp"
#include "qrc/experiment.hpp"
#include "qrc/tasks.hpp"
#include "qrc/training.hpp"
#include "qrc/vqc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qrc;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool ok, const std::string& id, const std::string& detail)
{
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

constexpr std::array<std::uint64_t, 5> seeds{1, 2, 3, 4, 5};

// ---------------------------------------------------------------------------

void gradient_correctness()
{
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> in(-3.0, 3.0);
    constexpr double h = 1e-5;
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        const VqcParams p = VqcParams::random(2, rng);
        const std::array<double, 4> x{in(rng), in(rng), in(rng), in(rng)};
        EvalCounter counter;
        const Jacobian jac = parameter_shift_jacobian(p, x, 4, NoiselessBackend{}, counter);
        for (std::size_t k = 0; k < p.size(); ++k) {
            VqcParams plus = p, minus = p;
            plus.angles()[k] += h;
            minus.angles()[k] -= h;
            const VqcOutput ep = vqc_forward(plus, x, 4, NoiselessBackend{}, counter);
            const VqcOutput em = vqc_forward(minus, x, 4, NoiselessBackend{}, counter);
            for (std::size_t j = 0; j < 4; ++j)
                worst = std::max(worst, std::abs((ep[j] - em[j]) / (2 * h) - jac(j, k)));
        }
    }
    report(worst <= 1e-6, "1 gradient correctness",
           "max |shift - central FD| over 100 depth-2 draws = " + sci(worst) + " (tol 1e-6)");
}

DensityMatrix random_mixed_state(int n, std::mt19937_64& rng)
{
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Complex> rho(dim * dim, 0.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> weights{u(rng), u(rng), u(rng)};
    double total = weights[0] + weights[1] + weights[2];
    for (double w : weights) {
        const auto psi = oracle::random_state(n, rng);
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                rho[r * dim + c] += w / total * psi[r] * std::conj(psi[c]);
    }
    return DensityMatrix(n, std::move(rho));
}

void simulator_correctness()
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

    double sv_worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto v = oracle::random_state(n, rng);
            for (int q = 0; q < n; ++q) {
                for (const GateMatrix& g :
                     {gates::hadamard(), gates::rot_y(angle(rng)), gates::rot_z(angle(rng)),
                      gates::rot_zyz(angle(rng), angle(rng), angle(rng))}) {
                    const StateVector out = apply_1q(StateVector(v), g, q);
                    const auto want = oracle::matvec(oracle::embed_1q(g, q, n), v);
                    sv_worst = std::max(sv_worst, oracle::max_diff(out.amplitudes(), want));
                }
                for (int t = 0; t < n; ++t) {
                    if (t == q)
                        continue;
                    const StateVector out = apply_cnot(StateVector(v), q, t);
                    const auto want = oracle::matvec(oracle::cnot_matrix(q, t, n), v);
                    sv_worst = std::max(sv_worst, oracle::max_diff(out.amplitudes(), want));
                }
            }
        }
    }

    double completeness = 0.0, trace_err = 0.0, herm_err = 0.0, min_eig = 1.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const NoiseModelParams nm = sample_noise_model(seed, 4);
        std::vector<KrausChannel> channels{
          thermal_relaxation_channel(nm.t1[0], nm.t2[0], nm.durations.x90),
          thermal_relaxation_channel(nm.t1[1], nm.t2[1], nm.durations.cnot),
          thermal_relaxation_channel(nm.t1[2], nm.t2[2], nm.durations.measure),
          depolarizing_channel(nm.p1[0], 1),
          depolarizing_channel(nm.cnot_error(0, 1), 2),
          amplitude_damping_channel(0.3),
          phase_damping_channel(0.6),
          reset_channel()};
        for (const auto& ch : channels) {
            completeness = std::max(completeness, ch.completeness_error());
            const DensityMatrix rho = random_mixed_state(2, rng);
            const std::vector<int> targets = ch.arity == 1 ? std::vector<int>{1} : std::vector<int>{1, 0};
            const DensityMatrix out = apply_channel(rho, ch, targets);
            trace_err = std::max(trace_err, std::abs(out.trace() - Complex(1.0, 0.0)));
            herm_err = std::max(herm_err, out.hermiticity_error());
            min_eig = std::min(min_eig, out.min_eigenvalue());
        }
    }

    double dm_worst = 0.0;
    const NoisyBackend zero_noise{NoiseModelParams::noiseless(4), 0, nullptr};
    for (int trial = 0; trial < 20; ++trial) {
        const VqcParams p = VqcParams::random(2, rng);
        const std::array<double, 4> x{angle(rng), angle(rng), angle(rng), angle(rng)};
        EvalCounter counter;
        const VqcOutput sv = vqc_forward(p, x, 4, NoiselessBackend{}, counter);
        const VqcOutput dm = vqc_forward(p, x, 4, zero_noise, counter);
        for (int q = 0; q < 4; ++q)
            dm_worst = std::max(dm_worst, std::abs(sv[q] - dm[q]));
    }

    const bool ok = sv_worst <= 1e-12 && completeness <= 1e-12 && trace_err <= 1e-12 && herm_err <= 1e-12
      && min_eig >= -1e-12 && dm_worst <= 1e-9;
    report(ok, "2 simulator correctness",
           "statevector vs Kronecker oracle " + sci(sv_worst) + " (tol 1e-12); Kraus completeness " + sci(completeness)
             + ", trace error " + sci(trace_err) + ", Hermiticity " + sci(herm_err) + ", min eigenvalue "
             + sci(min_eig) + "; zero-noise DM vs statevector VQC " + sci(dm_worst) + " (tol 1e-9)");
}

void parameter_accounting()
{
    const std::vector<std::size_t> got{
      quantum_parameter_count(ModelKind::qrnn, 2),  quantum_parameter_count(ModelKind::qgru, 2),
      quantum_parameter_count(ModelKind::qlstm, 2), quantum_parameter_count(ModelKind::qrnn, 4),
      quantum_parameter_count(ModelKind::qgru, 4),  quantum_parameter_count(ModelKind::qlstm, 4),
      recurrent_parameter_count(ModelKind::rnn),    recurrent_parameter_count(ModelKind::gru),
      recurrent_parameter_count(ModelKind::lstm),   head_parameter_count(ModelKind::qrnn),
      head_parameter_count(ModelKind::qgru),        head_parameter_count(ModelKind::qlstm),
      head_parameter_count(ModelKind::lstm)};
    const std::vector<std::size_t> want{24, 72, 144, 48, 144, 288, 40, 120, 160, 4, 4, 5, 6};

    // The counts must also describe the instantiated weights.
    bool shapes = true;
    for (ModelKind k : {ModelKind::qrnn, ModelKind::qgru, ModelKind::qlstm})
        for (int depth : {2, 4}) {
            const CellWeights w = CellWeights::random(k, depth, 1);
            shapes = shapes
              && trainable_parameters(w, TrainMode::full).size() == quantum_parameter_count(k, depth) + head_parameter_count(k)
              && trainable_parameters(w, TrainMode::reservoir).size() == head_parameter_count(k);
        }
    for (ModelKind k : {ModelKind::rnn, ModelKind::gru, ModelKind::lstm})
        shapes = shapes
          && trainable_parameters(CellWeights::random(k, 0, 1), TrainMode::full).size()
               == recurrent_parameter_count(k) + head_parameter_count(k);

    std::string detail = "quantum";
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (i == 6)
            detail += "; classical";
        if (i == 9)
            detail += "; heads";
        detail += ' ' + std::to_string(got[i]);
    }
    report(got == want && shapes, "3 parameter accounting", detail + (shapes ? "" : "; weight shapes disagree"));
}

std::vector<double> reference_narma(const std::vector<double>& u, int n0)
{
    const int len = static_cast<int>(u.size());
    std::map<int, double> y;
    for (int t = 1; t <= len; ++t)
        y[t] = 0.0;
    for (int t = n0; t < len; ++t) {
        double s = 0.0;
        for (int i = 0; i < n0; ++i)
            s += y[t - i];
        y[t + 1] = 0.3 * y[t] + 0.05 * y[t] * s + 1.5 * u[t - n0] * u[t - 1] + 0.1;
    }
    std::vector<double> out;
    for (int t = 1; t <= len; ++t)
        out.push_back(y[t]);
    return out;
}

void narma_generation()
{
    double worst = 0.0;
    bool bounded = true;
    for (int n0 : {5, 10}) {
        NarmaConfig cfg;
        cfg.n0 = n0;
        const std::vector<double> u = narma_input(cfg);
        const std::vector<double> y = narma_series(u, cfg);
        const std::vector<double> ref = reference_narma(u, n0);
        for (std::size_t k = 0; k < y.size(); ++k)
            worst = std::max(worst, std::abs(y[k] - ref[k]));
        bounded = bounded && y.size() == 300
          && std::all_of(u.begin(), u.end(), [](double v) { return v >= 0.0 && v <= 0.2; });
    }
    report(worst <= 1e-15 && bounded, "4 NARMA generation",
           "max deviation from reference recurrence over 300 steps, n0 in {5,10}: " + sci(worst)
             + (bounded ? "; all u_t in [0, 0.2]" : "; input out of range"));
}

// ---------------------------------------------------------------------------

ExperimentConfig base_config(TaskId task, ModelKind model, TrainMode mode, std::uint64_t seed, int epochs)
{
    ExperimentConfig c;
    c.task = task;
    c.model = model;
    c.mode = mode;
    c.seed = seed;
    c.epochs = epochs;
    return c;
}

/// Train MSE after every epoch for a freshly initialised model.
std::vector<double> train_curve(const ExperimentConfig& c)
{
    const ExperimentConfig cfg = resolve_noise(c);
    const WindowedDataset data = make_dataset(cfg);
    CellWeights w = CellWeights::random(cfg.model, cfg.effective_depth(), cfg.seed);
    EvalCounter counter;
    const TrainingLog log = train(w, data, cfg.mode, cfg.epochs, make_backend(cfg), counter);
    std::vector<double> out;
    for (const auto& e : log.epochs)
        out.push_back(e.train_mse);
    return out;
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (double x : v)
        s += (s.empty() ? "" : ", ") + sci(x);
    return "[" + s + "]";
}

void reproduction()
{
    {
        std::vector<double> finals;
        for (auto s : seeds)
            finals.push_back(train_curve(base_config(TaskId::narma5, ModelKind::qrnn, TrainMode::reservoir, s, 100)).back());
        const double m = median(finals);
        report(m <= 1.84e-3, "5a QRNN-Reservoir NARMA5",
               "median train MSE at epoch 100 = " + sci(m) + " (<= 1.84e-3); seeds 1-5 " + join(finals));
    }
    {
        std::vector<double> full, res;
        for (auto s : seeds) {
            full.push_back(train_curve(base_config(TaskId::damped_shm, ModelKind::qrnn, TrainMode::full, s, 100)).back());
            res.push_back(train_curve(base_config(TaskId::damped_shm, ModelKind::qrnn, TrainMode::reservoir, s, 100)).back());
        }
        const double mf = median(full), mr = median(res);
        report(mf <= 6.8e-3 && mf < mr, "5b QRNN-Full damped SHM",
               "median train MSE at epoch 100 = " + sci(mf) + " (<= 6.8e-3), reservoir median " + sci(mr)
                 + " (full must be lower); full " + join(full) + ", reservoir " + join(res));
    }
    std::vector<double> qlstm15, lstm15;
    {
        std::vector<double> finals;
        for (auto s : seeds) {
            const auto curve = train_curve(base_config(TaskId::narma10, ModelKind::qlstm, TrainMode::reservoir, s, 100));
            finals.push_back(curve.back());
            qlstm15.push_back(curve[14]);
        }
        const double m = median(finals);
        report(m <= 2.59e-3, "5c QLSTM-Reservoir NARMA10",
               "median train MSE at epoch 100 = " + sci(m) + " (<= 2.59e-3); seeds 1-5 " + join(finals));
    }
    {
        for (auto s : seeds)
            lstm15.push_back(train_curve(base_config(TaskId::narma10, ModelKind::lstm, TrainMode::reservoir, s, 15)).back());
        const double mq = median(qlstm15), ml = median(lstm15);
        report(mq < ml, "5d QLSTM vs LSTM reservoir NARMA10 epoch 15",
               "median train MSE QLSTM " + sci(mq) + " < LSTM " + sci(ml) + "; QLSTM " + join(qlstm15) + ", LSTM "
                 + join(lstm15));
    }
}

void hardware_counter()
{
    bool ok = true;
    std::string detail;
    for (ModelKind kind : {ModelKind::qrnn, ModelKind::qgru, ModelKind::qlstm}) {
        const ExperimentConfig cfg = base_config(TaskId::narma5, kind, TrainMode::full, 1, 2);
        const WindowedDataset data = make_dataset(cfg);
        const int depth = 2;
        CellWeights full_w = CellWeights::random(kind, depth, 1);
        CellWeights res_w = full_w;
        EvalCounter full_c, res_c;
        const TrainingLog full = train(full_w, data, TrainMode::full, 2, NoiselessBackend{}, full_c);
        const TrainingLog res = train(res_w, data, TrainMode::reservoir, 2, NoiselessBackend{}, res_c);
        const std::uint64_t expected = data.split_index * 2 * quantum_parameter_count(kind, depth);
        const std::uint64_t e1 = full.epochs[0].shift_evals;
        const std::uint64_t e2 = full.epochs[1].shift_evals - full.epochs[0].shift_evals;
        const bool pair_ok = res_c.shift.load() == 0 && res.epochs.back().shift_evals == 0 && e1 == expected && e2 == expected
          && full_c.shift.load() == 2 * expected;
        ok = ok && pair_ok;
        detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(kind)) + " reservoir "
          + std::to_string(res_c.shift.load()) + ", full " + std::to_string(e1) + "/" + std::to_string(e2)
          + " per epoch (expected " + std::to_string(data.split_index) + " x 2 x "
          + std::to_string(quantum_parameter_count(kind, depth)) + " = " + std::to_string(expected) + ")";
    }
    report(ok, "6 hardware-efficiency counter", detail);
}

void noisy_viability()
{
    bool ok = true;
    std::string detail;
    for (std::uint64_t s : {1, 2, 3}) {
        ExperimentConfig c = base_config(TaskId::bessel, ModelKind::qrnn, TrainMode::reservoir, s, 30);
        BesselConfig b;
        b.n_points = 54;
        c.task_overrides.bessel = b;
        const double clean = train_curve(c).back();
        c.backend.kind = BackendKind::noisy;
        c.backend.source = NoiseSource::mean;
        const double noisy = train_curve(c).back();
        ok = ok && noisy <= 10.0 * clean;
        detail += std::string(detail.empty() ? "" : "; ") + "seed " + std::to_string(s) + " noisy " + sci(noisy)
          + " vs noiseless " + sci(clean) + " (ratio " + sci(noisy / clean) + ")";
    }
    report(ok, "7 noisy-mode viability", "Bessel, 50 windows, 30 epochs, mean noise: " + detail + " (ratio <= 10)");
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism()
{
    const fs::path root = fs::temp_directory_path() / "qrc_acceptance_determinism";
    fs::remove_all(root);

    std::vector<ExperimentConfig> configs{
      base_config(TaskId::narma5, ModelKind::qrnn, TrainMode::full, 3, 3),
      base_config(TaskId::narma10, ModelKind::lstm, TrainMode::full, 4, 3),
      base_config(TaskId::damped_shm, ModelKind::qgru, TrainMode::reservoir, 5, 3)};
    ExperimentConfig noisy = base_config(TaskId::bessel, ModelKind::qrnn, TrainMode::reservoir, 6, 2);
    BesselConfig b;
    b.n_points = 30;
    noisy.task_overrides.bessel = b;
    noisy.backend.kind = BackendKind::noisy;
    noisy.backend.source = NoiseSource::sampled;
    noisy.backend.shots = 1000;
    configs.push_back(noisy);

    bool ok = true;
    int files = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::vector<fs::path> dirs;
        for (const char* rep : {"a", "b"}) {
            ExperimentConfig c = configs[i];
            c.output_dir = (root / (std::to_string(i) + rep)).string();
            ok = ok && run(c).ok();
            dirs.push_back(c.output_dir);
        }
        for (const char* name : {"loss_log.csv", "predictions.csv", "checkpoint.json"}) {
            const std::string a = slurp(dirs[0] / name), c = slurp(dirs[1] / name);
            ok = ok && !a.empty() && a == c;
            ++files;
        }
        emit_plot_data(dirs[0]);
        emit_plot_data(dirs[1]);
        ok = ok && slurp(dirs[0] / "plot_data.csv") == slurp(dirs[1] / "plot_data.csv");
        ++files;
    }
    fs::remove_all(root);
    report(ok, "8 determinism",
           std::to_string(files) + " artifacts compared bytewise across reruns of " + std::to_string(configs.size())
             + " configs (including sampled noise with finite shots)");
}

} // namespace

int main()
{
    try {
        gradient_correctness();
        simulator_correctness();
        parameter_accounting();
        narma_generation();
        reproduction();
        hardware_counter();
        noisy_viability();
        determinism();
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance suite aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d criterion line(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}

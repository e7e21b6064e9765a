#include "qrc/experiment.hpp"

#include "qrc/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace qrc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// A JSON value together with its dotted path, for error messages.
class Node {
public:
    Node(const json& value, std::string path)
      : value_(&value)
      , path_(std::move(path))
    {
    }

    const json& value() const { return *value_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_.empty() ? "<root>" : path_, what); }

    void require_object(std::initializer_list<std::string_view> allowed) const
    {
        if (!value_->is_object())
            fail("expected an object");
        for (const auto& [key, _] : value_->items()) {
            bool known = false;
            for (auto a : allowed)
                known = known || key == a;
            if (!known)
                child_path(key).fail("unknown field");
        }
    }

    bool has(std::string_view key) const { return value_->contains(key); }

    Node at(std::string_view key) const
    {
        auto it = value_->find(key);
        if (it == value_->end())
            child_path(key).fail("missing required field");
        return Node(*it, join(key));
    }

    Node operator[](std::size_t i) const { return Node((*value_)[i], path_ + "[" + std::to_string(i) + "]"); }

    double as_double() const
    {
        if (!value_->is_number())
            fail("expected a number");
        return value_->get<double>();
    }

    int as_int() const
    {
        if (!value_->is_number_integer())
            fail("expected an integer");
        const auto v = value_->get<std::int64_t>();
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
            fail("integer out of range");
        return static_cast<int>(v);
    }

    std::uint64_t as_u64() const
    {
        if (!value_->is_number_unsigned())
            fail("expected a non-negative integer");
        return value_->get<std::uint64_t>();
    }

    bool as_bool() const
    {
        if (!value_->is_boolean())
            fail("expected true or false");
        return value_->get<bool>();
    }

    std::string as_string() const
    {
        if (!value_->is_string())
            fail("expected a string");
        return value_->get<std::string>();
    }

    std::vector<double> as_doubles() const
    {
        if (!value_->is_array())
            fail("expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < value_->size(); ++i)
            out.push_back((*this)[i].as_double());
        return out;
    }

    template <class Parse>
    auto parse_with(Parse parse) const
    {
        try {
            return parse(as_string());
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }

private:
    std::string join(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }
    Node child_path(std::string_view key) const { return Node(*value_, join(key)); }

    const json* value_;
    std::string path_;
};

template <class T, class Get>
void read_opt(const Node& n, std::string_view key, T& field, Get get)
{
    if (n.has(key))
        field = get(n.at(key));
}

const auto get_double = [](const Node& n) { return n.as_double(); };
const auto get_int = [](const Node& n) { return n.as_int(); };

std::string_view to_string(ChannelOrder order)
{
    return order == ChannelOrder::relax_then_depolarize ? "relax_then_depolarize" : "depolarize_then_relax";
}

ChannelOrder parse_channel_order(std::string_view s)
{
    if (s == "relax_then_depolarize") return ChannelOrder::relax_then_depolarize;
    if (s == "depolarize_then_relax") return ChannelOrder::depolarize_then_relax;
    throw std::invalid_argument("unknown channel order '" + std::string(s) + "'");
}

json noise_to_json(const NoiseModelParams& p)
{
    return {
      {"n_qubits", p.n_qubits},
      {"t1", p.t1},
      {"t2", p.t2},
      {"p1", p.p1},
      {"p2", p.p2},
      {"durations",
       {{"rz", p.durations.rz},
        {"x90", p.durations.x90},
        {"cnot", p.durations.cnot},
        {"measure", p.durations.measure},
        {"reset", p.durations.reset}}},
      {"order", to_string(p.order)},
      {"seed", p.seed},
    };
}

NoiseModelParams noise_from_json(const Node& n)
{
    n.require_object({"n_qubits", "t1", "t2", "p1", "p2", "durations", "order", "seed"});
    NoiseModelParams p;
    p.n_qubits = n.at("n_qubits").as_int();
    p.t1 = n.at("t1").as_doubles();
    p.t2 = n.at("t2").as_doubles();
    p.p1 = n.at("p1").as_doubles();
    p.p2 = n.at("p2").as_doubles();
    if (n.has("durations")) {
        const Node d = n.at("durations");
        d.require_object({"rz", "x90", "cnot", "measure", "reset"});
        read_opt(d, "rz", p.durations.rz, get_double);
        read_opt(d, "x90", p.durations.x90, get_double);
        read_opt(d, "cnot", p.durations.cnot, get_double);
        read_opt(d, "measure", p.durations.measure, get_double);
        read_opt(d, "reset", p.durations.reset, get_double);
    }
    if (n.has("order"))
        p.order = n.at("order").parse_with(parse_channel_order);
    if (n.has("seed"))
        p.seed = n.at("seed").as_u64();
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        n.fail(e.what());
    }
    return p;
}

json overrides_to_json(const TaskOverrides& o)
{
    json j = json::object();
    if (o.pendulum) {
        const auto& p = *o.pendulum;
        j["pendulum"] = {
          {"g", p.g}, {"b", p.b}, {"length", p.length}, {"mass", p.mass}, {"theta0", p.theta0},
          {"omega0", p.omega0}, {"t_end", p.t_end}, {"n_points", p.n_points}, {"substeps", p.substeps},
          {"linearized", p.linearized}};
    }
    if (o.bessel) {
        const auto& b = *o.bessel;
        j["bessel"] = {{"order", b.order}, {"x_start", b.x_start}, {"x_end", b.x_end}, {"n_points", b.n_points}};
    }
    if (o.narma) {
        const auto& n = *o.narma;
        j["narma"] = {
          {"alpha", n.alpha}, {"beta", n.beta}, {"gamma", n.gamma}, {"delta", n.delta}, {"n0", n.n0},
          {"length", n.length}, {"input_a", n.input_a}, {"input_b", n.input_b}, {"input_c", n.input_c},
          {"period", n.period}};
    }
    return j;
}

TaskOverrides overrides_from_json(const Node& n)
{
    n.require_object({"pendulum", "bessel", "narma"});
    TaskOverrides o;
    if (n.has("pendulum")) {
        const Node p = n.at("pendulum");
        p.require_object({"g", "b", "length", "mass", "theta0", "omega0", "t_end", "n_points", "substeps", "linearized"});
        PendulumConfig c;
        read_opt(p, "g", c.g, get_double);
        read_opt(p, "b", c.b, get_double);
        read_opt(p, "length", c.length, get_double);
        read_opt(p, "mass", c.mass, get_double);
        read_opt(p, "theta0", c.theta0, get_double);
        read_opt(p, "omega0", c.omega0, get_double);
        read_opt(p, "t_end", c.t_end, get_double);
        read_opt(p, "n_points", c.n_points, get_int);
        read_opt(p, "substeps", c.substeps, get_int);
        read_opt(p, "linearized", c.linearized, [](const Node& x) { return x.as_bool(); });
        if (c.n_points < 2)
            p.at("n_points").fail("must be at least 2");
        if (!(c.t_end > 0.0))
            p.at("t_end").fail("must be positive");
        if (c.substeps < 1)
            p.at("substeps").fail("must be positive");
        o.pendulum = c;
    }
    if (n.has("bessel")) {
        const Node b = n.at("bessel");
        b.require_object({"order", "x_start", "x_end", "n_points"});
        BesselConfig c;
        read_opt(b, "order", c.order, get_int);
        read_opt(b, "x_start", c.x_start, get_double);
        read_opt(b, "x_end", c.x_end, get_double);
        read_opt(b, "n_points", c.n_points, get_int);
        if (c.order < 0)
            b.at("order").fail("must be non-negative");
        if (c.n_points < 2)
            b.at("n_points").fail("must be at least 2");
        if (!(c.x_start >= 0.0 && c.x_start < c.x_end))
            b.fail("needs 0 <= x_start < x_end");
        o.bessel = c;
    }
    if (n.has("narma")) {
        const Node m = n.at("narma");
        m.require_object(
          {"alpha", "beta", "gamma", "delta", "n0", "length", "input_a", "input_b", "input_c", "period"});
        NarmaConfig c;
        read_opt(m, "alpha", c.alpha, get_double);
        read_opt(m, "beta", c.beta, get_double);
        read_opt(m, "gamma", c.gamma, get_double);
        read_opt(m, "delta", c.delta, get_double);
        read_opt(m, "n0", c.n0, get_int);
        read_opt(m, "length", c.length, get_int);
        read_opt(m, "input_a", c.input_a, get_double);
        read_opt(m, "input_b", c.input_b, get_double);
        read_opt(m, "input_c", c.input_c, get_double);
        read_opt(m, "period", c.period, get_double);
        if (!(c.period > 0.0))
            m.at("period").fail("must be positive");
        o.narma = c;
    }
    return o;
}

json config_to_json(const ExperimentConfig& cfg)
{
    json j;
    j["schema_version"] = cfg.schema_version;
    j["task"] = to_string(cfg.task);
    j["model"] = to_string(cfg.model);
    j["mode"] = to_string(cfg.mode);
    if (cfg.depth)
        j["depth"] = *cfg.depth;
    if (cfg.normalize)
        j["normalize"] = *cfg.normalize;
    j["epochs"] = cfg.epochs;
    j["seed"] = cfg.seed;
    j["window"] = cfg.window;
    json backend;
    backend["kind"] = cfg.backend.kind == BackendKind::noiseless ? "noiseless" : "noisy";
    if (cfg.backend.noise)
        backend["noise"] = noise_to_json(*cfg.backend.noise);
    else
        backend["noise"] = cfg.backend.source == NoiseSource::mean ? "mean" : "sampled";
    backend["shots"] = cfg.backend.shots;
    j["backend"] = backend;
    j["task_overrides"] = overrides_to_json(cfg.task_overrides);
    j["output_dir"] = cfg.output_dir;
    return j;
}

ExperimentConfig config_from_json(const Node& n, const ExperimentConfig& defaults = {})
{
    n.require_object(
      {"schema_version", "task", "model", "mode", "depth", "normalize", "epochs", "seed", "window", "backend", "task_overrides",
       "output_dir"});
    ExperimentConfig cfg = defaults;
    if (n.has("schema_version")) {
        cfg.schema_version = n.at("schema_version").as_int();
        if (cfg.schema_version != config_schema_version)
            n.at("schema_version").fail("unsupported schema version " + std::to_string(cfg.schema_version));
    }
    if (n.has("task"))
        cfg.task = n.at("task").parse_with(parse_task_id);
    if (n.has("model"))
        cfg.model = n.at("model").parse_with(parse_model_kind);
    if (n.has("mode"))
        cfg.mode = n.at("mode").parse_with(parse_train_mode);
    if (n.has("depth")) {
        cfg.depth = n.at("depth").as_int();
        if (*cfg.depth < 1)
            n.at("depth").fail("must be positive");
    }
    if (n.has("normalize"))
        cfg.normalize = n.at("normalize").as_bool();
    if (n.has("epochs")) {
        cfg.epochs = n.at("epochs").as_int();
        if (cfg.epochs < 0)
            n.at("epochs").fail("must be non-negative");
    }
    if (n.has("seed"))
        cfg.seed = n.at("seed").as_u64();
    if (n.has("window")) {
        cfg.window = n.at("window").as_int();
        if (cfg.window < 1)
            n.at("window").fail("must be positive");
    }
    if (n.has("backend")) {
        const Node b = n.at("backend");
        b.require_object({"kind", "noise", "shots"});
        if (b.has("kind")) {
            const std::string kind = b.at("kind").as_string();
            if (kind == "noiseless")
                cfg.backend.kind = BackendKind::noiseless;
            else if (kind == "noisy")
                cfg.backend.kind = BackendKind::noisy;
            else
                b.at("kind").fail("expected 'noiseless' or 'noisy'");
        }
        if (b.has("noise")) {
            const Node noise = b.at("noise");
            if (noise.value().is_string()) {
                const std::string s = noise.as_string();
                if (s == "sampled")
                    cfg.backend.source = NoiseSource::sampled;
                else if (s == "mean")
                    cfg.backend.source = NoiseSource::mean;
                else
                    noise.fail("expected 'sampled', 'mean' or a noise-model object");
                cfg.backend.noise.reset();
            } else {
                cfg.backend.noise = noise_from_json(noise);
                if (cfg.backend.noise->n_qubits != vqc_qubits)
                    noise.at("n_qubits").fail("the VQC uses 4 qubits");
            }
        }
        if (b.has("shots")) {
            cfg.backend.shots = b.at("shots").as_int();
            if (cfg.backend.shots < 0)
                b.at("shots").fail("must be non-negative");
        }
    }
    if (n.has("task_overrides"))
        cfg.task_overrides = overrides_from_json(n.at("task_overrides"));
    if (n.has("output_dir"))
        cfg.output_dir = n.at("output_dir").as_string();
    return cfg;
}

json parse_json(std::string_view text)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw NotFoundError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

json weights_to_json(const CellWeights& w)
{
    json j;
    j["model"] = to_string(w.kind);
    j["depth"] = w.depth;
    json vqcs = json::array();
    for (const auto& v : w.vqcs)
        vqcs.push_back(std::vector<double>(v.angles().begin(), v.angles().end()));
    j["vqcs"] = vqcs;
    j["recurrent"] = {
      {"gates", w.recurrent.gates},
      {"w_ih", w.recurrent.w_ih},
      {"w_hh", w.recurrent.w_hh},
      {"b_ih", w.recurrent.b_ih},
      {"b_hh", w.recurrent.b_hh}};
    j["head_weights"] = w.head_weights;
    j["head_bias"] = w.head_bias;
    return j;
}

void assign_exact(const Node& n, std::vector<double>& dst)
{
    std::vector<double> v = n.as_doubles();
    if (v.size() != dst.size())
        n.fail("expected " + std::to_string(dst.size()) + " values, got " + std::to_string(v.size()));
    dst = std::move(v);
}

std::string epoch_cell(const RunSummary& s, int epoch)
{
    if (!s.ok())
        return "error";
    for (const auto& e : s.reported) {
        if (e.epoch == epoch) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2e/%.2e", e.train_mse, e.test_mse);
            return buf;
        }
    }
    return "-";
}

std::string dataset_label(TaskId task)
{
    switch (task) {
    case TaskId::damped_shm: return "Damped SHM";
    case TaskId::bessel: return "Bessel";
    case TaskId::narma5: return "NARMA5";
    case TaskId::narma10: return "NARMA10";
    }
    return "?";
}

json epoch_json(const EpochLog& e)
{
    return {
      {"epoch", e.epoch},
      {"train_mse", e.train_mse},
      {"test_mse", e.test_mse},
      {"circuit_evals", e.circuit_evals},
      {"shift_evals", e.shift_evals}};
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

int ExperimentConfig::effective_depth() const
{
    if (!is_quantum(model))
        return 0;
    if (depth)
        return *depth;
    return is_function_approximation(task) ? 2 : 4;
}

bool ExperimentConfig::effective_normalize() const
{
    return normalize.value_or(task == TaskId::damped_shm);
}

std::string config_to_text(const ExperimentConfig& cfg)
{
    return config_to_json(cfg).dump(2) + "\n";
}

ExperimentConfig parse_config(std::string_view text)
{
    const json j = parse_json(text);
    return config_from_json(Node(j, ""));
}

ExperimentConfig load_config(const fs::path& path)
{
    if (!fs::exists(path))
        throw NotFoundError("config file not found: " + path.string());
    return parse_config(read_file(path));
}

void save_config(const ExperimentConfig& cfg, const fs::path& path)
{
    write_file(path, config_to_text(cfg));
}

std::string config_hash(const ExperimentConfig& cfg)
{
    json j = config_to_json(cfg);
    j.erase("output_dir");
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig resolve_noise(ExperimentConfig cfg)
{
    if (cfg.backend.kind == BackendKind::noisy && !cfg.backend.noise)
        cfg.backend.noise = cfg.backend.source == NoiseSource::mean ? NoiseModelParams::mean(vqc_qubits)
                                                                     : sample_noise_model(cfg.seed, vqc_qubits);
    return cfg;
}

Backend make_backend(const ExperimentConfig& cfg)
{
    if (cfg.backend.kind == BackendKind::noiseless)
        return NoiselessBackend{};
    NoisyBackend b;
    b.noise = *resolve_noise(cfg).backend.noise;
    b.shots = cfg.backend.shots;
    if (b.shots > 0)
        b.shot_rng = std::make_shared<Rng>(make_rng(cfg.seed, RngStream::shots));
    return b;
}

WindowedDataset make_dataset(const ExperimentConfig& cfg)
{
    TaskSeries s = task_series(cfg.task, cfg.task_overrides);
    if (cfg.effective_normalize())
        s = minmax_normalized(std::move(s));
    return make_windows(s.inputs, cfg.window, std::span<const double>(s.targets));
}

std::string checkpoint_to_text(const CellWeights& w, const ExperimentConfig& cfg)
{
    json j;
    j["format"] = "qrc-checkpoint";
    j["version"] = 1;
    j["config_hash"] = config_hash(cfg);
    j["weights"] = weights_to_json(w);
    return j.dump(2) + "\n";
}

Checkpoint parse_checkpoint(std::string_view text)
{
    const json j = parse_json(text);
    const Node root(j, "");
    root.require_object({"format", "version", "config_hash", "weights"});
    if (root.at("format").as_string() != "qrc-checkpoint")
        root.at("format").fail("not a checkpoint");
    if (root.at("version").as_int() != 1)
        root.at("version").fail("unsupported checkpoint version");

    const Node n = root.at("weights");
    n.require_object({"model", "depth", "vqcs", "recurrent", "head_weights", "head_bias"});
    const ModelKind kind = n.at("model").parse_with(parse_model_kind);
    const int depth = n.at("depth").as_int();
    CellWeights w;
    try {
        w = CellWeights::zeros(kind, depth);
    } catch (const std::invalid_argument& e) {
        n.at("depth").fail(e.what());
    }
    const Node vqcs = n.at("vqcs");
    if (!vqcs.value().is_array() || vqcs.value().size() != w.vqcs.size())
        vqcs.fail("expected " + std::to_string(w.vqcs.size()) + " circuits");
    for (std::size_t i = 0; i < w.vqcs.size(); ++i) {
        std::vector<double> angles(w.vqcs[i].size());
        assign_exact(vqcs[i], angles);
        w.vqcs[i] = VqcParams(depth, std::move(angles));
    }
    const Node r = n.at("recurrent");
    r.require_object({"gates", "w_ih", "w_hh", "b_ih", "b_hh"});
    if (r.at("gates").as_int() != w.recurrent.gates)
        r.at("gates").fail("gate count does not match the model");
    assign_exact(r.at("w_ih"), w.recurrent.w_ih);
    assign_exact(r.at("w_hh"), w.recurrent.w_hh);
    assign_exact(r.at("b_ih"), w.recurrent.b_ih);
    assign_exact(r.at("b_hh"), w.recurrent.b_hh);
    assign_exact(n.at("head_weights"), w.head_weights);
    w.head_bias = n.at("head_bias").as_double();
    return {std::move(w), root.at("config_hash").as_string()};
}

std::string predictions_csv(const WindowedDataset& data, std::span<const double> predictions)
{
    if (predictions.size() != data.size())
        throw std::invalid_argument("one prediction per window is required");
    std::string out = "index,target,prediction,split\n";
    for (std::size_t k = 0; k < data.size(); ++k) {
        out += std::to_string(k);
        out += ',' + format_double(data.targets[k]);
        out += ',' + format_double(predictions[k]);
        out += k < data.split_index ? ",train\n" : ",test\n";
    }
    return out;
}

std::string loss_log_csv(const TrainingLog& log)
{
    std::string out = "epoch,train_mse,test_mse,circuit_evals,shift_evals\n";
    for (const auto& e : log.epochs) {
        out += std::to_string(e.epoch);
        out += ',' + format_double(e.train_mse);
        out += ',' + format_double(e.test_mse);
        out += ',' + std::to_string(e.circuit_evals);
        out += ',' + std::to_string(e.shift_evals) + '\n';
    }
    return out;
}

std::string task_csv(const TaskSeries& series, bool with_target)
{
    std::string out = with_target ? "index,value,target\n" : "index,value\n";
    for (std::size_t k = 0; k < series.inputs.size(); ++k) {
        out += std::to_string(k) + ',' + format_double(series.inputs[k]);
        if (with_target)
            out += ',' + format_double(series.targets[k]);
        out += '\n';
    }
    return out;
}

RunSummary run(const ExperimentConfig& input)
{
    const ExperimentConfig cfg = resolve_noise(input);
    RunSummary summary;
    summary.config = cfg;
    summary.run_dir = cfg.output_dir;
    fs::create_directories(summary.run_dir);
    save_config(cfg, summary.run_dir / "config.json");

    const auto start = std::chrono::steady_clock::now();
    EvalCounter counter;
    TrainingLog log;
    try {
        const WindowedDataset data = make_dataset(cfg);
        CellWeights w = CellWeights::random(cfg.model, cfg.effective_depth(), cfg.seed);
        const Backend backend = make_backend(cfg);
        log = train(w, data, cfg.mode, cfg.epochs, backend, counter);

        const Evaluation all = evaluate(w, data, Split::all, backend, counter);
        write_file(summary.run_dir / "predictions.csv", predictions_csv(data, all.predictions));
        write_file(summary.run_dir / "checkpoint.json", checkpoint_to_text(w, cfg));
        if (log.epochs.empty()) {
            const std::span<const double> preds(all.predictions);
            const std::span<const double> targets(data.targets);
            summary.final_train_mse = data.split_index > 0
              ? mse(preds.first(data.split_index), targets.first(data.split_index))
              : std::numeric_limits<double>::quiet_NaN();
            summary.final_test_mse = data.split_index < data.size()
              ? mse(preds.subspan(data.split_index), targets.subspan(data.split_index))
              : std::numeric_limits<double>::quiet_NaN();
        } else {
            summary.final_train_mse = log.epochs.back().train_mse;
            summary.final_test_mse = log.epochs.back().test_mse;
        }
    } catch (const DivergenceError& e) {
        summary.error = e.what();
    }
    write_file(summary.run_dir / "loss_log.csv", loss_log_csv(log));

    for (const auto& e : log.epochs)
        for (int r : reported_epochs)
            if (e.epoch == r)
                summary.reported.push_back(e);
    summary.shift_evals = counter.shift.load();
    summary.circuit_evals = counter.forward.load() + summary.shift_evals;
    summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json s;
    s["config"] = config_to_json(cfg);
    s["config_hash"] = config_hash(cfg);
    json epochs = json::array();
    for (const auto& e : summary.reported)
        epochs.push_back(epoch_json(e));
    s["epochs"] = epochs;
    s["final_train_mse"] = summary.final_train_mse;
    s["final_test_mse"] = summary.final_test_mse;
    s["circuit_evals"] = summary.circuit_evals;
    s["shift_evals"] = summary.shift_evals;
    s["seconds"] = summary.seconds;
    s["error"] = summary.ok() ? json(nullptr) : json(summary.error);
    s["artifacts"] = {
      {"config", "config.json"},
      {"loss_log", "loss_log.csv"},
      {"predictions", "predictions.csv"},
      {"checkpoint", "checkpoint.json"}};
    write_file(summary.run_dir / "summary.json", s.dump(2) + "\n");
    return summary;
}

std::string sweep_table(const std::vector<RunSummary>& runs)
{
    std::string out = "Dataset,Model,Reservoir,Seed";
    for (int e : reported_epochs)
        out += ",Epoch " + std::to_string(e);
    out += '\n';
    for (const auto& s : runs) {
        out += dataset_label(s.config.task) + ',' + std::string(to_string(s.config.model)) + ','
          + (s.config.mode == TrainMode::reservoir ? "Yes" : "No") + ',' + std::to_string(s.config.seed);
        for (int e : reported_epochs)
            out += ',' + epoch_cell(s, e);
        out += '\n';
    }
    return out;
}

SweepResult sweep(const std::vector<ExperimentConfig>& configs, const fs::path& output_dir, int jobs)
{
    SweepResult result;
    result.runs.resize(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                result.runs[i] = run(configs[i]);
            } catch (const std::exception& e) {
                RunSummary failed;
                failed.config = configs[i];
                failed.run_dir = configs[i].output_dir;
                failed.error = e.what();
                result.runs[i] = std::move(failed);
            }
        }
    };
    const auto n_threads = static_cast<std::size_t>(std::max(1, jobs));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::min(n_threads, configs.size()); ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    result.table_path = output_dir / "sweep_table.csv";
    write_file(result.table_path, sweep_table(result.runs));
    return result;
}

SweepSpec parse_sweep(std::string_view text)
{
    const json j = parse_json(text);
    const Node root(j, "");
    root.require_object({"schema_version", "output_dir", "runs", "grid", "base"});
    if (root.has("schema_version") && root.at("schema_version").as_int() != config_schema_version)
        root.at("schema_version").fail("unsupported schema version");
    SweepSpec spec;
    spec.output_dir = root.has("output_dir") ? root.at("output_dir").as_string() : "sweep";

    auto run_dir = [&](const ExperimentConfig& c, std::string prefix) {
        return (spec.output_dir
                / (prefix + std::string(to_string(c.task)) + "_" + std::string(to_string(c.model)) + "_"
                   + std::string(to_string(c.mode)) + "_s" + std::to_string(c.seed)))
          .string();
    };

    if (root.has("runs") == root.has("grid"))
        root.fail("a sweep needs exactly one of 'runs' or 'grid'");

    if (root.has("runs")) {
        const Node runs = root.at("runs");
        if (!runs.value().is_array())
            runs.fail("expected an array of configs");
        for (std::size_t i = 0; i < runs.value().size(); ++i) {
            ExperimentConfig c = config_from_json(runs[i]);
            if (!runs[i].has("output_dir"))
                c.output_dir = run_dir(c, std::to_string(i) + "_");
            spec.configs.push_back(std::move(c));
        }
        return spec;
    }

    const ExperimentConfig base = root.has("base") ? config_from_json(root.at("base")) : ExperimentConfig{};
    const Node grid = root.at("grid");
    grid.require_object({"tasks", "models", "modes", "seeds"});
    auto list = [&](std::string_view key) {
        const Node l = grid.at(key);
        if (!l.value().is_array() || l.value().empty())
            l.fail("expected a non-empty array");
        std::vector<Node> items;
        for (std::size_t i = 0; i < l.value().size(); ++i)
            items.push_back(l[i]);
        return items;
    };
    for (const Node& t : list("tasks"))
        for (const Node& m : list("models"))
            for (const Node& md : list("modes"))
                for (const Node& s : list("seeds")) {
                    ExperimentConfig c = base;
                    c.task = t.parse_with(parse_task_id);
                    c.model = m.parse_with(parse_model_kind);
                    c.mode = md.parse_with(parse_train_mode);
                    c.seed = s.as_u64();
                    c.output_dir = run_dir(c, "");
                    spec.configs.push_back(std::move(c));
                }
    return spec;
}

fs::path emit_plot_data(const fs::path& run_dir, std::optional<fs::path> out)
{
    const fs::path config_path = run_dir / "config.json";
    const fs::path checkpoint_path = run_dir / "checkpoint.json";
    for (const auto& p : {config_path, checkpoint_path})
        if (!fs::exists(p))
            throw NotFoundError("missing run artifact: " + p.string());

    const ExperimentConfig cfg = load_config(config_path);
    const Checkpoint ckpt = parse_checkpoint(read_file(checkpoint_path));
    if (ckpt.config_hash != config_hash(cfg))
        throw ConfigError("config_hash", "checkpoint does not belong to " + config_path.string());

    const WindowedDataset data = make_dataset(cfg);
    EvalCounter counter;
    const Evaluation all = evaluate(ckpt.weights, data, Split::all, make_backend(cfg), counter);
    const fs::path target = out.value_or(run_dir / "plot_data.csv");
    write_file(target, predictions_csv(data, all.predictions));
    return target;
}

} // namespace qrc

#include "qrc/cells.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace qrc {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void require_kind(const CellWeights& w, ModelKind kind)
{
    if (w.kind != kind)
        throw std::invalid_argument(
          std::string("cell step for ") + std::string(to_string(kind)) + " called with "
          + std::string(to_string(w.kind)) + " weights");
}

void require_size(std::span<const double> v, std::size_t n, const char* what)
{
    if (v.size() != n)
        throw std::invalid_argument(
          std::string(what) + " must have " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
}

std::array<double, 4> concat(std::span<const double> head3, double tail)
{
    return {head3[0], head3[1], head3[2], tail};
}

int gate_blocks(ModelKind kind)
{
    switch (kind) {
    case ModelKind::rnn: return 1;
    case ModelKind::gru: return 3;
    case ModelKind::lstm: return 4;
    default: return 0;
    }
}

std::vector<double> uniform_vector(std::size_t n, double bound, Rng& rng)
{
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> v(n);
    for (double& x : v)
        x = dist(rng);
    return v;
}

// Quantities of the last step that the gradient needs.
struct FinalStep {
    std::vector<double> h_prev;
    std::vector<double> c_prev;
    double x = 0.0;
};

FinalStep run_to_final_step(
  const CellWeights& w, std::span<const double> window, const Backend& backend, EvalCounter& counter)
{
    FinalStep s;
    CellState state = CellState::zeros(w.kind);
    for (std::size_t t = 0; t + 1 < window.size(); ++t) {
        switch (w.kind) {
        case ModelKind::qrnn: state.h = qrnn_step(w, state.h, window[t], backend, counter); break;
        case ModelKind::qgru: state.h = qgru_step(w, state.h, window[t], backend, counter); break;
        case ModelKind::qlstm: {
            QlstmStep r = qlstm_step(w, state.h, state.c, window[t], backend, counter);
            state.h = std::move(r.h);
            state.c = std::move(r.c);
            break;
        }
        default: throw std::logic_error("run_to_final_step expects a quantum cell");
        }
    }
    s.h_prev = std::move(state.h);
    s.c_prev = std::move(state.c);
    s.x = window.back();
    return s;
}

} // namespace

bool is_quantum(ModelKind kind)
{
    return kind == ModelKind::qrnn || kind == ModelKind::qgru || kind == ModelKind::qlstm;
}

std::string_view to_string(ModelKind kind)
{
    switch (kind) {
    case ModelKind::qrnn: return "QRNN";
    case ModelKind::qgru: return "QGRU";
    case ModelKind::qlstm: return "QLSTM";
    case ModelKind::rnn: return "RNN";
    case ModelKind::gru: return "GRU";
    case ModelKind::lstm: return "LSTM";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view name)
{
    std::string lower(name);
    for (char& ch : lower)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower == "qrnn") return ModelKind::qrnn;
    if (lower == "qgru") return ModelKind::qgru;
    if (lower == "qlstm") return ModelKind::qlstm;
    if (lower == "rnn") return ModelKind::rnn;
    if (lower == "gru") return ModelKind::gru;
    if (lower == "lstm") return ModelKind::lstm;
    throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

std::string_view to_string(TrainMode mode)
{
    return mode == TrainMode::reservoir ? "reservoir" : "full";
}

TrainMode parse_train_mode(std::string_view name)
{
    if (name == "reservoir") return TrainMode::reservoir;
    if (name == "full") return TrainMode::full;
    throw std::invalid_argument("unknown training mode '" + std::string(name) + "'");
}

int vqc_count(ModelKind kind)
{
    switch (kind) {
    case ModelKind::qrnn: return 1;
    case ModelKind::qgru: return 3;
    case ModelKind::qlstm: return 6;
    default: return 0;
    }
}

std::size_t quantum_parameter_count(ModelKind kind, int depth)
{
    return static_cast<std::size_t>(vqc_count(kind)) * VqcParams::count_for_depth(depth);
}

std::size_t recurrent_parameter_count(ModelKind kind)
{
    constexpr std::size_t h = classical_hidden_size, in = 1;
    return static_cast<std::size_t>(gate_blocks(kind)) * h * (h + in + 2);
}

std::size_t head_feature_size(ModelKind kind)
{
    switch (kind) {
    case ModelKind::qrnn:
    case ModelKind::qgru: return quantum_hidden_size;
    case ModelKind::qlstm: return qlstm_cell_size;
    default: return classical_hidden_size;
    }
}

CellWeights CellWeights::zeros(ModelKind kind, int depth)
{
    CellWeights w;
    w.kind = kind;
    if (is_quantum(kind)) {
        if (depth < 1)
            throw std::invalid_argument("quantum cells need a positive VQC depth");
        w.depth = depth;
        w.vqcs.assign(static_cast<std::size_t>(vqc_count(kind)), VqcParams(depth));
    } else {
        const int g = gate_blocks(kind);
        const std::size_t rows = static_cast<std::size_t>(g) * classical_hidden_size;
        w.recurrent = ClassicalRecurrent{
          g,
          std::vector<double>(rows, 0.0),
          std::vector<double>(rows * classical_hidden_size, 0.0),
          std::vector<double>(rows, 0.0),
          std::vector<double>(rows, 0.0)};
    }
    w.head_weights.assign(head_feature_size(kind), 0.0);
    return w;
}

CellWeights CellWeights::random(ModelKind kind, int depth, std::uint64_t seed)
{
    CellWeights w = zeros(kind, depth);
    if (is_quantum(kind)) {
        Rng rng = make_rng(seed, RngStream::quantum_init);
        for (auto& p : w.vqcs)
            p = VqcParams::random(depth, rng);
    } else {
        Rng rng = make_rng(seed, RngStream::classical_init);
        const double bound = 1.0 / std::sqrt(static_cast<double>(classical_hidden_size));
        auto& r = w.recurrent;
        r.w_ih = uniform_vector(r.w_ih.size(), bound, rng);
        r.w_hh = uniform_vector(r.w_hh.size(), bound, rng);
        r.b_ih = uniform_vector(r.b_ih.size(), bound, rng);
        r.b_hh = uniform_vector(r.b_hh.size(), bound, rng);
    }
    Rng head_rng = make_rng(seed, RngStream::head_init);
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.head_weights.size()));
    w.head_weights = uniform_vector(w.head_weights.size(), bound, head_rng);
    w.head_bias = uniform_vector(1, bound, head_rng)[0];
    return w;
}

CellState CellState::zeros(ModelKind kind)
{
    CellState s;
    switch (kind) {
    case ModelKind::qrnn:
    case ModelKind::qgru: s.h.assign(quantum_hidden_size, 0.0); break;
    case ModelKind::qlstm:
        s.h.assign(quantum_hidden_size, 0.0);
        s.c.assign(qlstm_cell_size, 0.0);
        break;
    case ModelKind::rnn:
    case ModelKind::gru: s.h.assign(classical_hidden_size, 0.0); break;
    case ModelKind::lstm:
        s.h.assign(classical_hidden_size, 0.0);
        s.c.assign(classical_hidden_size, 0.0);
        break;
    }
    return s;
}

std::vector<double> qrnn_step(
  const CellWeights& w, std::span<const double> h_prev, double x, const Backend& backend, EvalCounter& counter)
{
    require_kind(w, ModelKind::qrnn);
    require_size(h_prev, quantum_hidden_size, "QRNN hidden state");
    const auto v = concat(h_prev, x);
    std::vector<double> h = vqc_forward(w.vqcs[0], v, quantum_hidden_size, backend, counter);
    for (double& e : h)
        e = std::tanh(e);
    return h;
}

std::vector<double> qgru_step(
  const CellWeights& w, std::span<const double> h_prev, double x, const Backend& backend, EvalCounter& counter)
{
    require_kind(w, ModelKind::qgru);
    require_size(h_prev, quantum_hidden_size, "QGRU hidden state");
    const auto v = concat(h_prev, x);
    const VqcOutput r_pre = vqc_forward(w.vqcs[0], v, quantum_hidden_size, backend, counter);
    const VqcOutput z_pre = vqc_forward(w.vqcs[1], v, quantum_hidden_size, backend, counter);

    // o_t = cat(x_t, r_t * h_{t-1})
    std::array<double, 4> o{x, 0.0, 0.0, 0.0};
    for (int i = 0; i < quantum_hidden_size; ++i)
        o[i + 1] = sigmoid(r_pre[i]) * h_prev[i];
    const VqcOutput cand_pre = vqc_forward(w.vqcs[2], o, quantum_hidden_size, backend, counter);

    std::vector<double> h(quantum_hidden_size);
    for (int i = 0; i < quantum_hidden_size; ++i) {
        const double z = sigmoid(z_pre[i]);
        h[i] = z * h_prev[i] + (1.0 - z) * std::tanh(cand_pre[i]);
    }
    return h;
}

QlstmStep qlstm_step(
  const CellWeights& w,
  std::span<const double> h_prev,
  std::span<const double> c_prev,
  double x,
  const Backend& backend,
  EvalCounter& counter)
{
    require_kind(w, ModelKind::qlstm);
    require_size(h_prev, quantum_hidden_size, "QLSTM hidden state");
    require_size(c_prev, qlstm_cell_size, "QLSTM cell state");
    constexpr int n = qlstm_cell_size;
    const auto v = concat(h_prev, x);
    const VqcOutput f = vqc_forward(w.vqcs[0], v, n, backend, counter);
    const VqcOutput i = vqc_forward(w.vqcs[1], v, n, backend, counter);
    const VqcOutput g = vqc_forward(w.vqcs[2], v, n, backend, counter);
    const VqcOutput o = vqc_forward(w.vqcs[3], v, n, backend, counter);

    QlstmStep out;
    out.c.resize(n);
    std::array<double, 4> gated{};
    for (int k = 0; k < n; ++k) {
        out.c[k] = sigmoid(f[k]) * c_prev[k] + sigmoid(i[k]) * std::tanh(g[k]);
        gated[k] = sigmoid(o[k]) * std::tanh(out.c[k]);
    }
    out.h = vqc_forward(w.vqcs[4], gated, quantum_hidden_size, backend, counter);
    out.y_tilde = vqc_forward(w.vqcs[5], gated, n, backend, counter);
    return out;
}

double linear_head(const CellWeights& w, std::span<const double> features)
{
    require_size(features, w.head_weights.size(), "head input");
    double y = w.head_bias;
    for (std::size_t k = 0; k < features.size(); ++k)
        y += w.head_weights[k] * features[k];
    return y;
}

double rollout(const CellWeights& w, std::span<const double> window, const Backend& backend, EvalCounter& counter)
{
    if (window.empty())
        throw std::invalid_argument("rollout window must not be empty");
    if (!is_quantum(w.kind))
        return classical::rollout(w, window);

    CellState state = CellState::zeros(w.kind);
    std::vector<double> features;
    for (double x : window) {
        switch (w.kind) {
        case ModelKind::qrnn: state.h = qrnn_step(w, state.h, x, backend, counter); break;
        case ModelKind::qgru: state.h = qgru_step(w, state.h, x, backend, counter); break;
        default: {
            QlstmStep r = qlstm_step(w, state.h, state.c, x, backend, counter);
            state.h = std::move(r.h);
            state.c = std::move(r.c);
            features = std::move(r.y_tilde);
        }
        }
    }
    return linear_head(w, w.kind == ModelKind::qlstm ? std::span<const double>(features) : state.h);
}

std::vector<double> trainable_parameters(const CellWeights& w, TrainMode mode)
{
    std::vector<double> p(w.head_weights);
    p.push_back(w.head_bias);
    if (mode == TrainMode::reservoir)
        return p;
    for (const auto& v : w.vqcs)
        p.insert(p.end(), v.angles().begin(), v.angles().end());
    const auto& r = w.recurrent;
    for (const auto* block : {&r.w_ih, &r.w_hh, &r.b_ih, &r.b_hh})
        p.insert(p.end(), block->begin(), block->end());
    return p;
}

void set_trainable_parameters(CellWeights& w, TrainMode mode, std::span<const double> values)
{
    std::size_t expected = w.head_weights.size() + 1;
    if (mode == TrainMode::full) {
        for (const auto& v : w.vqcs)
            expected += v.size();
        expected += w.recurrent.size();
    }
    if (values.size() != expected)
        throw std::invalid_argument(
          "expected " + std::to_string(expected) + " trainable values, got " + std::to_string(values.size()));

    std::size_t pos = 0;
    auto take = [&](std::span<double> dst) {
        std::copy(values.begin() + static_cast<std::ptrdiff_t>(pos),
                  values.begin() + static_cast<std::ptrdiff_t>(pos + dst.size()), dst.begin());
        pos += dst.size();
    };
    take(w.head_weights);
    w.head_bias = values[pos++];
    if (mode == TrainMode::reservoir)
        return;
    for (auto& v : w.vqcs)
        take(v.angles());
    auto& r = w.recurrent;
    for (auto* block : {&r.w_ih, &r.w_hh, &r.b_ih, &r.b_hh})
        take(*block);
}

LossGradient loss_gradient(
  const CellWeights& w,
  std::span<const double> window,
  double target,
  TrainMode mode,
  const Backend& backend,
  EvalCounter& counter)
{
    if (window.empty())
        throw std::invalid_argument("rollout window must not be empty");
    if (!is_quantum(w.kind))
        return classical::loss_gradient(w, window, target, mode);

    const FinalStep s = run_to_final_step(w, window, backend, counter);
    const auto v = concat(s.h_prev, s.x);
    const std::size_t n_head = w.head_weights.size();

    // Final-step forward pass, keeping the VQC pre-activations.
    std::vector<double> features;
    std::vector<std::vector<double>> upstream(w.vqcs.size());
    std::vector<std::array<double, 4>> inputs(w.vqcs.size(), v);
    std::vector<int> n_meas(w.vqcs.size(), quantum_hidden_size);

    LossGradient out;
    auto finish_head = [&](std::span<const double> feats) {
        out.prediction = linear_head(w, feats);
        const double diff = out.prediction - target;
        out.loss = diff * diff;
        return 2.0 * diff;
    };

    switch (w.kind) {
    case ModelKind::qrnn: {
        const VqcOutput e = vqc_forward(w.vqcs[0], v, quantum_hidden_size, backend, counter);
        features.resize(quantum_hidden_size);
        for (int k = 0; k < quantum_hidden_size; ++k)
            features[k] = std::tanh(e[k]);
        const double dy = finish_head(features);
        upstream[0].resize(quantum_hidden_size);
        for (int k = 0; k < quantum_hidden_size; ++k)
            upstream[0][k] = dy * w.head_weights[k] * (1.0 - features[k] * features[k]);
        break;
    }
    case ModelKind::qgru: {
        const VqcOutput r_pre = vqc_forward(w.vqcs[0], v, quantum_hidden_size, backend, counter);
        const VqcOutput z_pre = vqc_forward(w.vqcs[1], v, quantum_hidden_size, backend, counter);
        std::array<double, 4> o{s.x, 0.0, 0.0, 0.0};
        for (int k = 0; k < quantum_hidden_size; ++k)
            o[k + 1] = sigmoid(r_pre[k]) * s.h_prev[k];
        inputs[2] = o;
        const VqcOutput cand_pre = vqc_forward(w.vqcs[2], o, quantum_hidden_size, backend, counter);

        features.resize(quantum_hidden_size);
        std::array<double, 3> z{}, cand{};
        for (int k = 0; k < quantum_hidden_size; ++k) {
            z[k] = sigmoid(z_pre[k]);
            cand[k] = std::tanh(cand_pre[k]);
            features[k] = z[k] * s.h_prev[k] + (1.0 - z[k]) * cand[k];
        }
        const double dy = finish_head(features);
        upstream[0].assign(quantum_hidden_size, 0.0); // reaches the loss only through VQC_3's input
        upstream[1].resize(quantum_hidden_size);
        upstream[2].resize(quantum_hidden_size);
        for (int k = 0; k < quantum_hidden_size; ++k) {
            const double dh = dy * w.head_weights[k];
            upstream[1][k] = dh * (s.h_prev[k] - cand[k]) * z[k] * (1.0 - z[k]);
            upstream[2][k] = dh * (1.0 - z[k]) * (1.0 - cand[k] * cand[k]);
        }
        break;
    }
    default: {
        for (int g = 0; g < 4; ++g)
            n_meas[g] = qlstm_cell_size;
        n_meas[5] = qlstm_cell_size;
        const VqcOutput f = vqc_forward(w.vqcs[0], v, qlstm_cell_size, backend, counter);
        const VqcOutput i = vqc_forward(w.vqcs[1], v, qlstm_cell_size, backend, counter);
        const VqcOutput gg = vqc_forward(w.vqcs[2], v, qlstm_cell_size, backend, counter);
        const VqcOutput o = vqc_forward(w.vqcs[3], v, qlstm_cell_size, backend, counter);
        std::array<double, 4> gated{};
        for (int k = 0; k < qlstm_cell_size; ++k) {
            const double c = sigmoid(f[k]) * s.c_prev[k] + sigmoid(i[k]) * std::tanh(gg[k]);
            gated[k] = sigmoid(o[k]) * std::tanh(c);
        }
        vqc_forward(w.vqcs[4], gated, quantum_hidden_size, backend, counter);
        features = vqc_forward(w.vqcs[5], gated, qlstm_cell_size, backend, counter);
        const double dy = finish_head(features);
        inputs[4] = gated;
        inputs[5] = gated;
        for (int g = 0; g < 5; ++g)
            upstream[g].assign(static_cast<std::size_t>(n_meas[g]), 0.0);
        upstream[5].resize(qlstm_cell_size);
        for (int k = 0; k < qlstm_cell_size; ++k)
            upstream[5][k] = dy * w.head_weights[k];
        break;
    }
    }

    const double dy = 2.0 * (out.prediction - target);
    out.gradient.reserve(n_head + 1 + (mode == TrainMode::full ? quantum_parameter_count(w.kind, w.depth) : 0));
    for (std::size_t k = 0; k < n_head; ++k)
        out.gradient.push_back(dy * features[k]);
    out.gradient.push_back(dy);
    if (mode == TrainMode::reservoir)
        return out;

    for (std::size_t g = 0; g < w.vqcs.size(); ++g) {
        const Jacobian jac = parameter_shift_jacobian(w.vqcs[g], inputs[g], n_meas[g], backend, counter);
        const std::vector<double> grad = vector_jacobian_product(jac, upstream[g]);
        out.gradient.insert(out.gradient.end(), grad.begin(), grad.end());
    }
    return out;
}

} // namespace qrc

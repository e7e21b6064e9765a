#include "qrc/cells.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qrc {

namespace {

constexpr int H = classical_hidden_size;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct StepCache {
    double x = 0.0;
    std::vector<double> h_prev;
    std::vector<double> c_prev;
    std::vector<double> act;     ///< post-activation gate values, G*H
    std::vector<double> gh;      ///< W_hh h_prev + b_hh, G*H (GRU needs the candidate block)
    std::vector<double> h;
    std::vector<double> c;
};

void check_classical(const CellWeights& w)
{
    if (is_quantum(w.kind))
        throw std::invalid_argument("classical cell called with quantum weights");
    const auto& r = w.recurrent;
    const std::size_t rows = static_cast<std::size_t>(r.gates) * H;
    if (r.gates < 1 || r.w_ih.size() != rows || r.w_hh.size() != rows * H || r.b_ih.size() != rows
        || r.b_hh.size() != rows)
        throw std::invalid_argument("classical recurrent weights have inconsistent shapes");
}

StepCache forward_step(const CellWeights& w, const std::vector<double>& h_prev, const std::vector<double>& c_prev, double x)
{
    const auto& r = w.recurrent;
    const std::size_t rows = static_cast<std::size_t>(r.gates) * H;
    StepCache s;
    s.x = x;
    s.h_prev = h_prev;
    s.c_prev = c_prev;
    std::vector<double> gi(rows);
    s.gh.assign(rows, 0.0);
    for (std::size_t row = 0; row < rows; ++row) {
        gi[row] = r.w_ih[row] * x + r.b_ih[row];
        double acc = r.b_hh[row];
        for (int k = 0; k < H; ++k)
            acc += r.w_hh[row * H + k] * h_prev[k];
        s.gh[row] = acc;
    }
    s.act.assign(rows, 0.0);
    s.h.assign(H, 0.0);

    switch (w.kind) {
    case ModelKind::rnn:
        for (int k = 0; k < H; ++k) {
            s.act[k] = std::tanh(gi[k] + s.gh[k]);
            s.h[k] = s.act[k];
        }
        break;
    case ModelKind::gru:
        for (int k = 0; k < H; ++k) {
            const double rg = sigmoid(gi[k] + s.gh[k]);
            const double z = sigmoid(gi[H + k] + s.gh[H + k]);
            const double n = std::tanh(gi[2 * H + k] + rg * s.gh[2 * H + k]);
            s.act[k] = rg;
            s.act[H + k] = z;
            s.act[2 * H + k] = n;
            s.h[k] = (1.0 - z) * n + z * h_prev[k];
        }
        break;
    case ModelKind::lstm:
        s.c.assign(H, 0.0);
        for (int k = 0; k < H; ++k) {
            const double i = sigmoid(gi[k] + s.gh[k]);
            const double f = sigmoid(gi[H + k] + s.gh[H + k]);
            const double g = std::tanh(gi[2 * H + k] + s.gh[2 * H + k]);
            const double o = sigmoid(gi[3 * H + k] + s.gh[3 * H + k]);
            s.act[k] = i;
            s.act[H + k] = f;
            s.act[2 * H + k] = g;
            s.act[3 * H + k] = o;
            s.c[k] = f * c_prev[k] + i * g;
            s.h[k] = o * std::tanh(s.c[k]);
        }
        break;
    default: throw std::logic_error("unreachable");
    }
    return s;
}

std::vector<StepCache> forward_window(const CellWeights& w, std::span<const double> window)
{
    check_classical(w);
    if (window.empty())
        throw std::invalid_argument("rollout window must not be empty");
    std::vector<StepCache> steps;
    steps.reserve(window.size());
    std::vector<double> h(H, 0.0);
    std::vector<double> c(w.kind == ModelKind::lstm ? H : 0, 0.0);
    for (double x : window) {
        steps.push_back(forward_step(w, h, c, x));
        h = steps.back().h;
        c = steps.back().c;
    }
    return steps;
}

} // namespace

CellState classical_step(const CellWeights& w, const CellState& state, double x)
{
    check_classical(w);
    if (state.h.size() != static_cast<std::size_t>(H))
        throw std::invalid_argument("classical hidden state must have 5 entries");
    if (w.kind == ModelKind::lstm && state.c.size() != static_cast<std::size_t>(H))
        throw std::invalid_argument("LSTM cell state must have 5 entries");
    StepCache s = forward_step(w, state.h, state.c, x);
    return CellState{std::move(s.h), std::move(s.c)};
}

namespace classical {

double rollout(const CellWeights& w, std::span<const double> window)
{
    const auto steps = forward_window(w, window);
    return linear_head(w, steps.back().h);
}

LossGradient loss_gradient(const CellWeights& w, std::span<const double> window, double target, TrainMode mode)
{
    const auto steps = forward_window(w, window);
    const auto& r = w.recurrent;
    const std::size_t rows = static_cast<std::size_t>(r.gates) * H;

    LossGradient out;
    out.prediction = linear_head(w, steps.back().h);
    const double diff = out.prediction - target;
    out.loss = diff * diff;
    const double dy = 2.0 * diff;

    out.gradient.reserve(H + 1 + (mode == TrainMode::full ? r.size() : 0));
    for (int k = 0; k < H; ++k)
        out.gradient.push_back(dy * steps.back().h[k]);
    out.gradient.push_back(dy);
    if (mode == TrainMode::reservoir)
        return out;

    std::vector<double> d_w_ih(rows, 0.0), d_w_hh(rows * H, 0.0), d_b_ih(rows, 0.0), d_b_hh(rows, 0.0);
    std::vector<double> dh(H), dc(H, 0.0);
    for (int k = 0; k < H; ++k)
        dh[k] = dy * w.head_weights[k];

    std::vector<double> d_gi(rows), d_gh(rows);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        const StepCache& s = *it;
        std::vector<double> dh_prev(H, 0.0);
        switch (w.kind) {
        case ModelKind::rnn:
            for (int k = 0; k < H; ++k) {
                const double da = dh[k] * (1.0 - s.h[k] * s.h[k]);
                d_gi[k] = da;
                d_gh[k] = da;
            }
            break;
        case ModelKind::gru:
            for (int k = 0; k < H; ++k) {
                const double rg = s.act[k], z = s.act[H + k], n = s.act[2 * H + k];
                const double dn = dh[k] * (1.0 - z);
                const double dz = dh[k] * (s.h_prev[k] - n);
                const double dan = dn * (1.0 - n * n);
                const double dr = dan * s.gh[2 * H + k];
                d_gi[k] = dr * rg * (1.0 - rg);
                d_gi[H + k] = dz * z * (1.0 - z);
                d_gi[2 * H + k] = dan;
                d_gh[k] = d_gi[k];
                d_gh[H + k] = d_gi[H + k];
                d_gh[2 * H + k] = dan * rg;
                dh_prev[k] = dh[k] * z;
            }
            break;
        default:
            for (int k = 0; k < H; ++k) {
                const double i = s.act[k], f = s.act[H + k], g = s.act[2 * H + k], o = s.act[3 * H + k];
                const double tc = std::tanh(s.c[k]);
                const double dct = dc[k] + dh[k] * o * (1.0 - tc * tc);
                d_gi[k] = dct * g * i * (1.0 - i);
                d_gi[H + k] = dct * s.c_prev[k] * f * (1.0 - f);
                d_gi[2 * H + k] = dct * i * (1.0 - g * g);
                d_gi[3 * H + k] = dh[k] * tc * o * (1.0 - o);
                dc[k] = dct * f;
            }
            d_gh = d_gi;
            break;
        }
        for (std::size_t row = 0; row < rows; ++row) {
            d_w_ih[row] += d_gi[row] * s.x;
            d_b_ih[row] += d_gi[row];
            d_b_hh[row] += d_gh[row];
            for (int k = 0; k < H; ++k) {
                d_w_hh[row * H + k] += d_gh[row] * s.h_prev[k];
                dh_prev[k] += r.w_hh[row * H + k] * d_gh[row];
            }
        }
        dh = std::move(dh_prev);
    }

    for (const auto* block : {&d_w_ih, &d_w_hh, &d_b_ih, &d_b_hh})
        out.gradient.insert(out.gradient.end(), block->begin(), block->end());
    return out;
}

} // namespace classical

} // namespace qrc

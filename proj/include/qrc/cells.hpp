#pragma once

// Quantum recurrent cells (QRNN, QGRU, QLSTM) and their classical baselines.
//
// Every model consumes a window of scalars one step at a time, starting from a
// zero state, and maps its final features through a linear head to a single
// prediction. Quantum cells use 3-dimensional hidden states on 4-qubit VQCs;
// classical cells use hidden size 5 with PyTorch-style double biases.

#include "qrc/random.hpp"
#include "qrc/vqc.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

enum class ModelKind { qrnn, qgru, qlstm, rnn, gru, lstm };

enum class TrainMode { reservoir, full };

inline constexpr int quantum_hidden_size = 3;
inline constexpr int qlstm_cell_size = 4;
inline constexpr int classical_hidden_size = 5;

bool is_quantum(ModelKind kind);
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(TrainMode mode);
TrainMode parse_train_mode(std::string_view name);

/// Number of VQCs in the cell: 1, 3, 6 for QRNN, QGRU, QLSTM; 0 for classical kinds.
int vqc_count(ModelKind kind);

std::size_t quantum_parameter_count(ModelKind kind, int depth);

/// Classical recurrent weights: h * (h + i + 2) per gate block (40, 120, 160).
std::size_t recurrent_parameter_count(ModelKind kind);

/// Length of the feature vector fed to the linear head.
std::size_t head_feature_size(ModelKind kind);

/// Head weights plus bias.
inline std::size_t head_parameter_count(ModelKind kind) { return head_feature_size(kind) + 1; }

/// Stacked gate blocks (RNN: h; GRU: r, z, n; LSTM: i, f, g, o), row-major.
struct ClassicalRecurrent {
    int gates = 0;
    std::vector<double> w_ih; ///< (gates*H) x 1
    std::vector<double> w_hh; ///< (gates*H) x H
    std::vector<double> b_ih; ///< gates*H
    std::vector<double> b_hh; ///< gates*H

    std::size_t size() const { return w_ih.size() + w_hh.size() + b_ih.size() + b_hh.size(); }

    friend bool operator==(const ClassicalRecurrent&, const ClassicalRecurrent&) = default;
};

struct CellWeights {
    ModelKind kind = ModelKind::qrnn;
    int depth = 0; ///< VQC depth; 0 for classical kinds
    std::vector<VqcParams> vqcs;
    ClassicalRecurrent recurrent;
    std::vector<double> head_weights;
    double head_bias = 0.0;

    /// All-zero weights of the right shapes.
    static CellWeights zeros(ModelKind kind, int depth);

    /// Quantum angles ~ U(-pi, pi); classical recurrent weights ~ U(-1/sqrt(H), 1/sqrt(H));
    /// head ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)). Each group uses its own seeded stream.
    static CellWeights random(ModelKind kind, int depth, std::uint64_t seed);

    friend bool operator==(const CellWeights&, const CellWeights&) = default;
};

struct CellState {
    std::vector<double> h;
    std::vector<double> c; ///< QLSTM and LSTM only

    static CellState zeros(ModelKind kind);
};

std::vector<double> qrnn_step(
  const CellWeights& w,
  std::span<const double> h_prev,
  double x,
  const Backend& backend = NoiselessBackend{},
  EvalCounter& counter = global_eval_counter());

std::vector<double> qgru_step(
  const CellWeights& w,
  std::span<const double> h_prev,
  double x,
  const Backend& backend = NoiselessBackend{},
  EvalCounter& counter = global_eval_counter());

struct QlstmStep {
    std::vector<double> h;       ///< 3 entries, recurrence only
    std::vector<double> c;       ///< 4 entries
    std::vector<double> y_tilde; ///< 4 entries, head input
};

QlstmStep qlstm_step(
  const CellWeights& w,
  std::span<const double> h_prev,
  std::span<const double> c_prev,
  double x,
  const Backend& backend = NoiselessBackend{},
  EvalCounter& counter = global_eval_counter());

CellState classical_step(const CellWeights& w, const CellState& state, double x);

double linear_head(const CellWeights& w, std::span<const double> features);

/// Zero initial state, one step per window entry, head on the final features.
double rollout(
  const CellWeights& w,
  std::span<const double> window,
  const Backend& backend = NoiselessBackend{},
  EvalCounter& counter = global_eval_counter());

/// Trainable parameters in a flat layout: head weights, head bias, then (full
/// mode only) every VQC's angles in cell order or the classical recurrent
/// blocks (w_ih, w_hh, b_ih, b_hh).
std::vector<double> trainable_parameters(const CellWeights& w, TrainMode mode);
void set_trainable_parameters(CellWeights& w, TrainMode mode, std::span<const double> values);

struct LossGradient {
    double prediction = 0.0;
    double loss = 0.0;                ///< (prediction - target)^2
    std::vector<double> gradient;     ///< d loss / d trainable_parameters(w, mode)
};

/// Squared error of one window and its gradient.
///
/// Quantum cells: every VQC of the final step is differentiated with the
/// parameter-shift rule; credit assignment stops at VQC inputs, so earlier
/// steps and VQCs that only feed another VQC receive zero gradient.
/// Classical cells: exact backpropagation through time over the window.
LossGradient loss_gradient(
  const CellWeights& w,
  std::span<const double> window,
  double target,
  TrainMode mode,
  const Backend& backend = NoiselessBackend{},
  EvalCounter& counter = global_eval_counter());

// Classical baselines, implemented in classical_cells.cpp.
namespace classical {

double rollout(const CellWeights& w, std::span<const double> window);

/// d loss / d (w_ih, w_hh, b_ih, b_hh) and the prediction, via BPTT.
LossGradient loss_gradient(const CellWeights& w, std::span<const double> window, double target, TrainMode mode);

} // namespace classical

} // namespace qrc

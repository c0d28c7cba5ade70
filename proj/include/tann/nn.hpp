#pragma once

// Minimal neural-network engine: layers, losses, forward and backward passes
// with hand-derived gradients, parameter initialization, and a central
// finite-difference oracle. Everything is double precision and every value
// is a plain copyable object.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tann/linalg.hpp"
#include "tann/rng.hpp"

namespace tann::nn {

enum class ActivationKind { ReLU, Sigmoid, Identity };

/// y = W x + b. W is out x in.
struct Dense {
  Matrix weight;
  Vector bias;
  bool operator==(const Dense&) const = default;
};

/// Elementwise activation. On complex (interleaved) signals it acts on real
/// and imaginary parts independently.
struct Activation {
  ActivationKind kind = ActivationKind::Identity;
  bool operator==(const Activation&) const = default;
};

/// Inverted dropout: train-time zeroing with 1/(1-p) rescale, identity at inference.
struct Dropout {
  double p = 0.5;
  bool operator==(const Dropout&) const = default;
};

/// Elman recurrence h_t = tanh(W_ih x_t + W_hh h_{t-1} + b), h_0 = 0.
/// The flat input of width `input_width` is read as `seq_len` steps of
/// W_ih.cols entries each, zero-padded at the tail when shorter. The output
/// is the final hidden state.
struct Recurrent {
  Matrix w_ih;  // hidden x step_width
  Matrix w_hh;  // hidden x hidden
  Vector bias;  // hidden
  std::size_t seq_len = 1;
  std::size_t input_width = 0;

  bool operator==(const Recurrent&) const = default;

  std::size_t hidden_size() const { return w_hh.rows; }
  std::size_t step_width() const { return w_ih.cols; }
};

/// Single-input-channel valid 1D convolution, stride 1. Output is
/// channel-major: out_channels blocks of (width - kernel_width + 1).
struct Conv1D {
  Matrix kernels;  // out_channels x kernel_width
  Vector bias;     // out_channels

  bool operator==(const Conv1D&) const = default;

  std::size_t out_channels() const { return kernels.rows; }
  std::size_t kernel_width() const { return kernels.cols; }
};

/// Complex affine map z -> W z + b. Complex signals travel through the
/// network as interleaved (re, im) doubles; with `real_input` the layer
/// instead reads a plain real vector as having zero imaginary part.
struct ComplexDense {
  ComplexMatrix weight;  // out x in
  ComplexVector bias;    // out
  bool real_input = false;
  bool operator==(const ComplexDense&) const = default;
};

/// Interleaved complex vector -> elementwise modulus.
struct Magnitude {
  bool operator==(const Magnitude&) const = default;
};

using Layer = std::variant<Dense, Activation, Dropout, Recurrent, Conv1D, ComplexDense, Magnitude>;

enum class LossKind { BCE, MSE, CrossEntropy };

std::string to_string(LossKind kind);
LossKind loss_from_string(const std::string& name);
std::string layer_name(const Layer& layer);

struct Network {
  std::vector<Layer> layers;
  LossKind loss = LossKind::MSE;

  /// Input width demanded by the first width-defining layer, if any.
  std::optional<std::size_t> input_width() const;
  /// Output width for a given input width; throws DimensionError naming the
  /// first incompatible layer.
  std::size_t output_width(std::size_t in_width) const;
  std::size_t parameter_count() const;

  bool operator==(const Network&) const = default;
};

/// Mutable views of every parameter tensor, in layer order. Complex tensors
/// appear as interleaved doubles.
std::vector<std::span<double>> parameter_blocks(Network& net);
std::vector<std::span<const double>> parameter_blocks(const Network& net);

/// One flat gradient per parameter block, aligned with parameter_blocks().
struct Gradients {
  std::vector<Vector> blocks;

  static Gradients zeros_like(const Network& net);
  void add(const Gradients& other, double scale = 1.0);
  bool all_zero() const;
};

enum class Mode { Train, Infer };

struct LayerCache {
  Vector input;
  Vector output;
  Vector mask;                 // dropout only, Train mode
  std::vector<Vector> hidden;  // recurrent only: h_0 .. h_T
};

struct ForwardCache {
  Mode mode = Mode::Infer;
  std::vector<LayerCache> layers;
};

struct ForwardResult {
  Vector output;
  ForwardCache cache;
};

/// Train mode draws dropout masks from `rng`; a Dropout layer with p > 0 in
/// Train mode without an rng is a ContractError.
ForwardResult forward(const Network& net, std::span<const double> x, Mode mode, Rng* rng = nullptr);

/// Train-mode forward that reuses the dropout masks recorded in `masks`.
ForwardResult forward_with_masks(const Network& net, std::span<const double> x, const ForwardCache& masks);

/// Infer-mode output only.
Vector predict(const Network& net, std::span<const double> x);

/// Loss of a prediction. CrossEntropy takes raw scores and a target that is
/// either a single class index or a one-hot/probability vector.
double loss_value(LossKind kind, std::span<const double> pred, std::span<const double> target);

/// dLoss/dPred, consistent with loss_value.
Vector loss_gradient(LossKind kind, std::span<const double> pred, std::span<const double> target);

/// Backprop from the loss at the cached output.
Gradients backward(const Network& net, const ForwardCache& cache, std::span<const double> target);

/// Backprop from an arbitrary gradient with respect to the network output.
Gradients backward_from_output(const Network& net, const ForwardCache& cache, std::span<const double> output_grad);

/// As backward_from_output, but adds into an existing buffer shaped by
/// Gradients::zeros_like(net).
void accumulate_backward(const Network& net, const ForwardCache& cache, std::span<const double> output_grad,
                         Gradients& into);

/// Glorot-uniform weights, zero biases. Deterministic in `seed`.
Network init_params(Network net, std::uint64_t seed);

/// Largest |w| the init scheme can produce for a tensor with these fans.
double glorot_bound(std::size_t fan_in, std::size_t fan_out);

/// Central differences of loss_value(forward(...)) with dropout masks frozen
/// to those in `masks` (or no dropout effect when absent and p == 0).
Gradients finite_diff_gradients(const Network& net, std::span<const double> x, std::span<const double> target,
                                double step, const ForwardCache* masks = nullptr);

// Zero-initialized layer constructors.
Dense make_dense(std::size_t in, std::size_t out);
Recurrent make_recurrent(std::size_t step_width, std::size_t seq_len, std::size_t hidden, std::size_t input_width);
Conv1D make_conv1d(std::size_t kernel_width, std::size_t out_channels);
ComplexDense make_complex_dense(std::size_t in, std::size_t out, bool real_input);

/// Dense(in -> hidden) -> ReLU -> Dense(hidden -> 1) -> Sigmoid, BCE loss,
/// all parameters zero.
Network make_mini_nn(std::size_t input_size, std::size_t hidden_size);

/// Label encoded as the target vector the given loss expects for a network
/// with `output_width` outputs.
Vector make_target(LossKind kind, std::size_t label, std::size_t output_width);

/// Class decision from a network output: thresholded single unit or argmax.
std::size_t predicted_class(std::span<const double> output, double threshold = 0.5);

}  // namespace tann::nn

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tann/nn.hpp"

namespace tann::optim {

struct Sgd {
  double lr = 0.01;
};

/// Bias-corrected Adam; defaults are the conventional ones.
struct Adam {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

using OptimizerKind = std::variant<Sgd, Adam>;

std::string to_string(const OptimizerKind& kind);
double learning_rate(const OptimizerKind& kind);

/// Per-network optimizer state. Adam moments are allocated on the first
/// step and shaped like the parameter blocks they track.
class OptimizerState {
 public:
  explicit OptimizerState(OptimizerKind kind);

  const OptimizerKind& kind() const { return kind_; }
  std::uint64_t step_count() const { return step_count_; }
  const std::vector<Vector>& first_moment() const { return first_moment_; }
  const std::vector<Vector>& second_moment() const { return second_moment_; }

  /// One update of every block. Throws ContractError on shape mismatch.
  void step(std::span<const std::span<double>> params, const nn::Gradients& grads);
  void step(nn::Network& net, const nn::Gradients& grads);

 private:
  OptimizerKind kind_;
  std::uint64_t step_count_ = 0;
  std::vector<Vector> first_moment_;
  std::vector<Vector> second_moment_;
};

}  // namespace tann::optim

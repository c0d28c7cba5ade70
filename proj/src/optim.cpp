#include "tann/optim.hpp"

#include <cmath>

#include "tann/errors.hpp"

namespace tann::optim {

std::string to_string(const OptimizerKind& kind) {
  return std::holds_alternative<Sgd>(kind) ? "sgd" : "adam";
}

double learning_rate(const OptimizerKind& kind) {
  return std::visit([](const auto& k) { return k.lr; }, kind);
}

OptimizerState::OptimizerState(OptimizerKind kind) : kind_(kind) {
  if (!(learning_rate(kind_) > 0.0)) throw ContractError("optimizer learning rate must be positive");
}

void OptimizerState::step(std::span<const std::span<double>> params, const nn::Gradients& grads) {
  if (params.size() != grads.blocks.size()) throw ContractError("optimizer: gradient block count mismatch");
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads.blocks[b].size()) throw ContractError("optimizer: gradient block shape mismatch");
  }

  if (const auto* sgd = std::get_if<Sgd>(&kind_)) {
    for (std::size_t b = 0; b < params.size(); ++b)
      for (std::size_t i = 0; i < params[b].size(); ++i) params[b][i] -= sgd->lr * grads.blocks[b][i];
    ++step_count_;
    return;
  }

  const Adam& adam = std::get<Adam>(kind_);
  if (first_moment_.empty()) {
    for (auto block : params) {
      first_moment_.emplace_back(block.size(), 0.0);
      second_moment_.emplace_back(block.size(), 0.0);
    }
  } else if (first_moment_.size() != params.size()) {
    throw ContractError("optimizer: parameter layout changed between steps");
  }
  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const double correction1 = 1.0 - std::pow(adam.beta1, t);
  const double correction2 = 1.0 - std::pow(adam.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    Vector& m = first_moment_[b];
    Vector& v = second_moment_[b];
    const Vector& g = grads.blocks[b];
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
      v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      params[b][i] -= adam.lr * m_hat / (std::sqrt(v_hat) + adam.epsilon);
    }
  }
}

void OptimizerState::step(nn::Network& net, const nn::Gradients& grads) {
  auto blocks = nn::parameter_blocks(net);
  step(blocks, grads);
}

}  // namespace tann::optim

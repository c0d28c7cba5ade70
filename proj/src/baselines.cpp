#include "tann/baselines.hpp"

#include "tann/errors.hpp"

namespace tann::baselines {

namespace {

using nn::Activation;
using nn::ActivationKind;

constexpr std::size_t kTextHidden1 = 1024;
constexpr std::size_t kTextHidden2 = 512;
constexpr std::size_t kTextRnnSteps = 20;
constexpr std::size_t kTextRnnHidden = 128;
constexpr double kDropout = 0.5;

}  // namespace

std::string to_string(ArchKind kind) {
  switch (kind) {
    case ArchKind::SimpleDropoutNN:
      return "simple_dropout_nn";
    case ArchKind::TinyCNN:
      return "tiny_cnn";
    case ArchKind::TinyRNN:
      return "tiny_rnn";
    case ArchKind::ComplexNN:
      return "complex_nn";
    case ArchKind::TextFFN:
      return "text_ffn";
    case ArchKind::TextRNN:
      return "text_rnn";
  }
  return "unknown";
}

ArchKind arch_from_string(const std::string& name) {
  for (ArchKind k : {ArchKind::SimpleDropoutNN, ArchKind::TinyCNN, ArchKind::TinyRNN, ArchKind::ComplexNN,
                     ArchKind::TextFFN, ArchKind::TextRNN}) {
    if (to_string(k) == name) return k;
  }
  throw ContractError("unknown architecture '" + name + "'");
}

bool is_gate_arch(ArchKind kind) { return kind != ArchKind::TextFFN && kind != ArchKind::TextRNN; }

nn::Network make_shape(const ArchSpec& spec) {
  nn::Network net;
  if (is_gate_arch(spec.kind)) {
    if (spec.input_size != 2) throw ContractError(to_string(spec.kind) + " takes exactly 2 inputs");
    net.loss = nn::LossKind::BCE;
  } else {
    if (spec.input_size == 0) throw ContractError("text networks need a non-empty input");
    if (spec.num_classes < 2) throw ContractError("text networks need at least 2 classes");
    net.loss = nn::LossKind::CrossEntropy;
  }

  switch (spec.kind) {
    case ArchKind::SimpleDropoutNN:
      net.layers = {nn::make_dense(2, 4), Activation{ActivationKind::Sigmoid}, nn::Dropout{kDropout},
                    nn::make_dense(4, 1), Activation{ActivationKind::Sigmoid}};
      break;
    case ArchKind::TinyCNN:
      // kernel 2 over 2 inputs leaves one output position.
      net.layers = {nn::make_conv1d(2, 1), Activation{ActivationKind::Sigmoid}, nn::make_dense(1, 1),
                    Activation{ActivationKind::Sigmoid}};
      break;
    case ArchKind::TinyRNN:
      net.layers = {nn::make_recurrent(1, 2, 2, 2), nn::make_dense(2, 1), Activation{ActivationKind::Sigmoid}};
      break;
    case ArchKind::ComplexNN:
      net.layers = {nn::make_complex_dense(2, 2, true), Activation{ActivationKind::ReLU},
                    nn::make_complex_dense(2, 1, false), nn::Magnitude{}};
      net.loss = nn::LossKind::MSE;
      break;
    case ArchKind::TextFFN:
      net.layers.push_back(nn::make_dense(spec.input_size, kTextHidden1));
      net.layers.push_back(Activation{ActivationKind::ReLU});
      if (spec.dropout) net.layers.push_back(nn::Dropout{kDropout});
      net.layers.push_back(nn::make_dense(kTextHidden1, kTextHidden2));
      net.layers.push_back(Activation{ActivationKind::ReLU});
      if (spec.dropout) net.layers.push_back(nn::Dropout{kDropout});
      net.layers.push_back(nn::make_dense(kTextHidden2, spec.num_classes));
      break;
    case ArchKind::TextRNN: {
      const std::size_t step = (spec.input_size + kTextRnnSteps - 1) / kTextRnnSteps;
      net.layers.push_back(nn::make_recurrent(step, kTextRnnSteps, kTextRnnHidden, spec.input_size));
      if (spec.dropout) net.layers.push_back(nn::Dropout{kDropout});
      net.layers.push_back(nn::make_dense(kTextRnnHidden, spec.num_classes));
      break;
    }
  }
  return net;
}

nn::Network make_network(const ArchSpec& spec, std::uint64_t seed) { return nn::init_params(make_shape(spec), seed); }

train::TrainConfig make_comparison_config(ArchKind kind) {
  if (!is_gate_arch(kind)) throw ContractError(to_string(kind) + " has no comparison configuration");
  train::TrainConfig cfg;
  cfg.lr = 0.2;
  cfg.epochs = 10;
  if (kind == ArchKind::ComplexNN) {
    cfg.optimizer = train::OptimizerChoice::Adam;
    cfg.loss = nn::LossKind::MSE;
  } else {
    cfg.optimizer = train::OptimizerChoice::Sgd;
    cfg.loss = nn::LossKind::BCE;
  }
  return cfg;
}

double comparison_dropout_rate(ArchKind kind) {
  if (!is_gate_arch(kind)) throw ContractError(to_string(kind) + " has no comparison configuration");
  return kind == ArchKind::SimpleDropoutNN ? kDropout : 0.0;
}

Trie embed_in_trie(const ArchSpec& spec, std::size_t depth, std::uint64_t seed) {
  if (depth < 1) throw ContractError("embedded trie needs depth >= 1");
  const nn::Network shape = make_shape(spec);
  return build_balanced(depth, seed, [&](std::uint64_t s) { return nn::init_params(shape, s); });
}

}  // namespace tann::baselines

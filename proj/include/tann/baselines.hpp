#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "tann/nn.hpp"
#include "tann/train.hpp"
#include "tann/trie.hpp"

namespace tann::baselines {

/// The four logic-gate comparison networks and the two text classifiers.
enum class ArchKind { SimpleDropoutNN, TinyCNN, TinyRNN, ComplexNN, TextFFN, TextRNN };

std::string to_string(ArchKind kind);
ArchKind arch_from_string(const std::string& name);
bool is_gate_arch(ArchKind kind);

struct ArchSpec {
  ArchKind kind = ArchKind::SimpleDropoutNN;
  std::size_t input_size = 2;
  std::size_t num_classes = 2;
  bool dropout = false;  // TextFFN / TextRNN only
};

/// Layer stack with all parameters zero. Throws ContractError when the
/// sizes do not suit the kind (gate networks take exactly 2 inputs).
nn::Network make_shape(const ArchSpec& spec);

/// make_shape() initialized with `seed`.
nn::Network make_network(const ArchSpec& spec, std::uint64_t seed);

/// Training setup used for the gate comparison: lr 0.2, 10 epochs, SGD + BCE,
/// except ComplexNN which uses Adam + MSE. Text kinds are rejected.
train::TrainConfig make_comparison_config(ArchKind kind);

/// Dropout rate listed for the comparison network (0 when it has none).
double comparison_dropout_rate(ArchKind kind);

/// Balanced trie of `depth` levels with make_network(spec, node seed) at
/// every node.
Trie embed_in_trie(const ArchSpec& spec, std::size_t depth, std::uint64_t seed);

}  // namespace tann::baselines

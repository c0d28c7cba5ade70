#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tann/nn.hpp"

namespace tann {

/// Index into a Trie's arena. Only meaningful for the trie that issued it.
struct NodeId {
  std::size_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

struct TrieNode {
  std::optional<NodeId> left;
  std::optional<NodeId> right;
  nn::Network net;
  std::size_t feature_index = 0;

  bool is_leaf() const { return !left && !right; }
  bool operator==(const TrieNode&) const = default;
};

/// Binary trie stored as an arena. Balanced builds lay nodes out in
/// pre-order, so arena index == pre-order position.
struct Trie {
  std::vector<TrieNode> arena;
  std::optional<NodeId> root;
  std::size_t declared_depth = 0;

  bool empty() const { return !root.has_value(); }
  std::size_t size() const { return arena.size(); }
  TrieNode& node(NodeId id) { return arena.at(id.value); }
  const TrieNode& node(NodeId id) const { return arena.at(id.value); }

  bool operator==(const Trie&) const = default;
};

/// Seed for the node at heap position `position` (root = 1, children of p
/// are 2p and 2p+1). Heap positions do not move when a trie is deepened.
std::uint64_t node_seed(std::uint64_t seed, std::uint64_t position);

/// Balanced trie of 2^depth - 1 nodes; `make_net(node_seed)` supplies each
/// node's network. depth 0 gives the empty trie.
Trie build_balanced(std::size_t depth, std::uint64_t seed, const std::function<nn::Network(std::uint64_t)>& make_net);

/// Balanced trie whose nodes each hold an independently initialized MiniNN.
Trie build_trie(std::size_t input_size, std::size_t hidden_size, std::size_t depth, std::uint64_t seed);

/// Pre-order (node, left subtree, right subtree).
std::vector<NodeId> traverse_trie(const Trie& t);

/// Read entries as bits: 0 steps left, 1 steps right. Routing stops when the
/// bits run out or the needed child is absent.
struct BitConsume {
  bool operator==(const BitConsume&) const = default;
};

/// Read x[node.feature_index]; strictly below `threshold` goes left,
/// otherwise right, until a leaf.
struct FeatureThreshold {
  double threshold = 0.5;
  bool operator==(const FeatureThreshold&) const = default;
};

using RoutingPolicy = std::variant<BitConsume, FeatureThreshold>;

struct RoutePath {
  std::vector<NodeId> visited;

  NodeId terminal() const { return visited.back(); }
};

RoutePath route(const Trie& t, std::span<const double> x, const RoutingPolicy& policy);
NodeId leaf_of(const Trie& t, std::span<const double> x, const RoutingPolicy& policy);

/// feature_index = node depth (root depth 0) mod input_dim.
struct DepthCycling {
  std::size_t input_dim = 1;
};

/// Caller-supplied feature index for every node.
struct ExplicitFeatures {
  std::map<NodeId, std::size_t> features;
};

using FeatureStrategy = std::variant<DepthCycling, ExplicitFeatures>;

Trie assign_feature_indices(Trie t, const FeatureStrategy& strategy);

/// `height` counts nodes on the longest root-to-leaf path (a lone root has
/// height 1). `is_balanced` holds when at every node the heights of the two
/// subtrees differ by at most one.
struct StructuralStats {
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  std::size_t height = 0;
  bool is_balanced = true;

  bool operator==(const StructuralStats&) const = default;
};

StructuralStats structural_stats(const Trie& t);

/// Per-node pass cost t ~ neurons x layers x per-neuron cost.
struct CostModel {
  double neurons = 1;
  double layers = 1;
  double per_neuron_cost = 1;
};

struct CostEstimate {
  double t_node = 0;
  double per_inference = 0;
};

/// per_inference = (nodes on the longest path) x t_node; for a balanced trie
/// that is its height, otherwise the deepest leaf bounds it.
CostEstimate estimate_cost(const Trie& t, const CostModel& cm);

/// Mean of the Infer-mode outputs of every node on the route.
Vector aggregate_path_inference(const Trie& t, std::span<const double> x, const RoutingPolicy& policy);

}  // namespace tann

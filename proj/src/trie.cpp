#include "tann/trie.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "tann/errors.hpp"

namespace tann {

namespace {

struct SubtreeShape {
  std::size_t height = 0;
  bool balanced = true;
};

SubtreeShape shape_of(const Trie& t, std::optional<NodeId> id, std::size_t& nodes, std::size_t& leaves) {
  if (!id) return {};
  const TrieNode& n = t.node(*id);
  ++nodes;
  if (n.is_leaf()) ++leaves;
  const SubtreeShape l = shape_of(t, n.left, nodes, leaves);
  const SubtreeShape r = shape_of(t, n.right, nodes, leaves);
  const std::size_t diff = l.height > r.height ? l.height - r.height : r.height - l.height;
  return {1 + std::max(l.height, r.height), l.balanced && r.balanced && diff <= 1};
}

void preorder(const Trie& t, std::optional<NodeId> id, std::vector<NodeId>& out) {
  if (!id) return;
  out.push_back(*id);
  preorder(t, t.node(*id).left, out);
  preorder(t, t.node(*id).right, out);
}

}  // namespace

std::uint64_t node_seed(std::uint64_t seed, std::uint64_t position) { return seed ^ mix64(position); }

Trie build_balanced(std::size_t depth, std::uint64_t seed, const std::function<nn::Network(std::uint64_t)>& make_net) {
  if (depth > 40) throw ContractError("trie depth " + std::to_string(depth) + " is too large");
  Trie t;
  t.declared_depth = depth;
  if (depth == 0) return t;
  t.arena.reserve((std::size_t{1} << depth) - 1);

  std::function<std::optional<NodeId>(std::size_t, std::uint64_t)> grow = [&](std::size_t remaining,
                                                                               std::uint64_t position) {
    if (remaining == 0) return std::optional<NodeId>{};
    const NodeId id{t.arena.size()};
    t.arena.push_back(TrieNode{std::nullopt, std::nullopt, make_net(node_seed(seed, position)), 0});
    const auto left = grow(remaining - 1, 2 * position);
    const auto right = grow(remaining - 1, 2 * position + 1);
    t.arena[id.value].left = left;
    t.arena[id.value].right = right;
    return std::optional<NodeId>{id};
  };
  t.root = grow(depth, 1);
  return t;
}

Trie build_trie(std::size_t input_size, std::size_t hidden_size, std::size_t depth, std::uint64_t seed) {
  const nn::Network shape = nn::make_mini_nn(input_size, hidden_size);
  return build_balanced(depth, seed, [&](std::uint64_t s) { return nn::init_params(shape, s); });
}

std::vector<NodeId> traverse_trie(const Trie& t) {
  std::vector<NodeId> out;
  out.reserve(t.size());
  preorder(t, t.root, out);
  return out;
}

RoutePath route(const Trie& t, std::span<const double> x, const RoutingPolicy& policy) {
  if (t.empty()) throw StructuralError("cannot route through an empty trie");
  RoutePath path;
  NodeId current = *t.root;
  path.visited.push_back(current);

  if (std::holds_alternative<BitConsume>(policy)) {
    for (double bit : x) {
      if (bit != 0.0 && bit != 1.0) {
        throw ContractError("bit-consume routing needs inputs in {0, 1}, got " + std::to_string(bit));
      }
      const TrieNode& n = t.node(current);
      const std::optional<NodeId> next = bit == 0.0 ? n.left : n.right;
      if (!next) break;
      current = *next;
      path.visited.push_back(current);
    }
    return path;
  }

  const double threshold = std::get<FeatureThreshold>(policy).threshold;
  if (!std::isfinite(threshold)) throw ContractError("routing threshold must be finite");
  while (!t.node(current).is_leaf()) {
    const TrieNode& n = t.node(current);
    if (n.feature_index >= x.size()) {
      throw ContractError("node " + std::to_string(current.value) + " reads feature " +
                          std::to_string(n.feature_index) + " of a " + std::to_string(x.size()) + "-wide input");
    }
    const std::optional<NodeId> next = x[n.feature_index] < threshold ? n.left : n.right;
    if (!next) break;
    current = *next;
    path.visited.push_back(current);
  }
  return path;
}

NodeId leaf_of(const Trie& t, std::span<const double> x, const RoutingPolicy& policy) {
  return route(t, x, policy).terminal();
}

Trie assign_feature_indices(Trie t, const FeatureStrategy& strategy) {
  if (const auto* cycling = std::get_if<DepthCycling>(&strategy)) {
    if (cycling->input_dim == 0) throw ContractError("DepthCycling needs input_dim >= 1");
    std::function<void(std::optional<NodeId>, std::size_t)> walk = [&](std::optional<NodeId> id, std::size_t depth) {
      if (!id) return;
      TrieNode& n = t.node(*id);
      n.feature_index = depth % cycling->input_dim;
      walk(n.left, depth + 1);
      walk(n.right, depth + 1);
    };
    walk(t.root, 0);
    return t;
  }
  const auto& features = std::get<ExplicitFeatures>(strategy).features;
  for (NodeId id : traverse_trie(t)) {
    const auto it = features.find(id);
    if (it == features.end()) throw ContractError("explicit feature map has no entry for node " + std::to_string(id.value));
    t.node(id).feature_index = it->second;
  }
  return t;
}

StructuralStats structural_stats(const Trie& t) {
  StructuralStats stats;
  const SubtreeShape s = shape_of(t, t.root, stats.node_count, stats.leaf_count);
  stats.height = s.height;
  stats.is_balanced = s.balanced;
  return stats;
}

CostEstimate estimate_cost(const Trie& t, const CostModel& cm) {
  if (!(cm.neurons > 0 && cm.layers > 0 && cm.per_neuron_cost >= 0) || !std::isfinite(cm.neurons) ||
      !std::isfinite(cm.layers) || !std::isfinite(cm.per_neuron_cost)) {
    throw ContractError("cost model needs positive neurons and layers and a non-negative finite per-neuron cost");
  }
  CostEstimate est;
  est.t_node = cm.neurons * cm.layers * cm.per_neuron_cost;
  // Balanced: O(h * t). Unbalanced: O(max(h) * t). With node-counted height
  // both are the longest root-to-leaf path.
  est.per_inference = static_cast<double>(structural_stats(t).height) * est.t_node;
  return est;
}

Vector aggregate_path_inference(const Trie& t, std::span<const double> x, const RoutingPolicy& policy) {
  const RoutePath path = route(t, x, policy);
  Vector mean;
  for (NodeId id : path.visited) {
    const Vector out = nn::predict(t.node(id).net, x);
    if (mean.empty()) {
      mean.assign(out.size(), 0.0);
    } else if (out.size() != mean.size()) {
      throw ContractError("nodes on the route disagree on output width");
    }
    for (std::size_t i = 0; i < out.size(); ++i) mean[i] += out[i];
  }
  for (double& v : mean) v /= static_cast<double>(path.visited.size());
  return mean;
}

}  // namespace tann

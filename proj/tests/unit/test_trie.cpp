#include <gtest/gtest.h>

#include <set>

#include "tann/errors.hpp"
#include "tann/trie.hpp"

using namespace tann;

namespace {

Trie chain_of_three() {
  Trie t;
  t.arena.resize(3);
  for (auto& n : t.arena) n.net = nn::make_mini_nn(2, 2);
  t.arena[0].right = NodeId{1};
  t.arena[1].right = NodeId{2};
  t.root = NodeId{0};
  t.declared_depth = 3;
  return t;
}

nn::Network constant_net(double v) {
  nn::Network net;
  net.layers = {nn::Dense{Matrix(1, 2, {0, 0}), {v}}};
  return net;
}

}  // namespace

TEST(Build, SizesForDepthsOneToTen) {
  for (std::size_t d = 1; d <= 10; ++d) {
    const Trie t = build_trie(2, 4, d, 1);
    const StructuralStats s = structural_stats(t);
    EXPECT_EQ(s.node_count, (std::size_t{1} << d) - 1) << d;
    EXPECT_EQ(s.leaf_count, std::size_t{1} << (d - 1)) << d;
    EXPECT_EQ(s.height, d);
    EXPECT_TRUE(s.is_balanced);
  }
}

TEST(Build, DepthZeroIsEmpty) {
  const Trie t = build_trie(2, 20, 0, 1);
  EXPECT_TRUE(t.empty());
  EXPECT_TRUE(traverse_trie(t).empty());
  EXPECT_EQ(structural_stats(t), (StructuralStats{0, 0, 0, true}));
  const Vector x = {0, 1};
  EXPECT_THROW(route(t, x, BitConsume{}), StructuralError);
}

TEST(Build, DepthOneIsRootLeaf) {
  const Trie t = build_trie(2, 20, 1, 1);
  EXPECT_EQ(structural_stats(t), (StructuralStats{1, 1, 1, true}));
  EXPECT_TRUE(t.node(*t.root).is_leaf());
}

TEST(Build, NodesAreIndependentlyInitialized) {
  const Trie t = build_trie(2, 20, 3, 1);
  std::set<Vector> first_weights;
  for (const auto& n : t.arena) first_weights.insert(std::get<nn::Dense>(n.net.layers[0]).weight.data);
  EXPECT_EQ(first_weights.size(), 7u);
  EXPECT_EQ(t, build_trie(2, 20, 3, 1));
  EXPECT_NE(t, build_trie(2, 20, 3, 2));
}

TEST(Build, DeepeningKeepsExistingNodes) {
  const Trie shallow = build_trie(2, 5, 2, 9);
  const Trie deep = build_trie(2, 5, 3, 9);
  // Pre-order: depth 2 is [root, L, R], depth 3 is [root, L, LL, LR, R, RL, RR].
  EXPECT_EQ(shallow.arena[0].net, deep.arena[0].net);
  EXPECT_EQ(shallow.arena[1].net, deep.arena[1].net);
  EXPECT_EQ(shallow.arena[2].net, deep.arena[4].net);
}

TEST(Traverse, PreOrder) {
  const Trie t = build_trie(2, 2, 3, 1);
  const auto order = traverse_trie(t);
  ASSERT_EQ(order.size(), 7u);
  EXPECT_EQ(order[0], *t.root);
  EXPECT_EQ(t.node(order[0]).left, order[1]);
  EXPECT_EQ(t.node(order[1]).left, order[2]);
  EXPECT_EQ(t.node(order[1]).right, order[3]);
  EXPECT_EQ(t.node(order[0]).right, order[4]);
  EXPECT_TRUE(t.node(order[2]).is_leaf());
}

TEST(Route, BitConsumeWalk) {
  const Trie t = build_trie(2, 2, 3, 1);
  const Vector x = {0, 1};
  const RoutePath p = route(t, x, BitConsume{});
  ASSERT_EQ(p.visited.size(), 3u);
  EXPECT_EQ(p.visited[0], *t.root);
  EXPECT_EQ(p.visited[1], *t.node(p.visited[0]).left);
  EXPECT_EQ(p.visited[2], *t.node(p.visited[1]).right);
  EXPECT_TRUE(t.node(p.terminal()).is_leaf());
  for (std::size_t i = 1; i < p.visited.size(); ++i) {
    const TrieNode& parent = t.node(p.visited[i - 1]);
    EXPECT_TRUE(parent.left == p.visited[i] || parent.right == p.visited[i]);
  }
}

TEST(Route, XorInputsReachDistinctLeaves) {
  const Trie t = build_trie(2, 2, 3, 1);
  std::set<NodeId> leaves;
  for (const Vector& x : {Vector{0, 0}, Vector{0, 1}, Vector{1, 0}, Vector{1, 1}}) {
    const NodeId leaf = leaf_of(t, x, BitConsume{});
    EXPECT_TRUE(t.node(leaf).is_leaf());
    leaves.insert(leaf);
  }
  EXPECT_EQ(leaves.size(), 4u);
}

TEST(Route, BitsRunOutEarly) {
  const Trie t = build_trie(2, 2, 5, 1);
  const Vector x = {1, 0};
  EXPECT_EQ(route(t, x, BitConsume{}).visited.size(), 3u);
  EXPECT_FALSE(t.node(leaf_of(t, x, BitConsume{})).is_leaf());
}

TEST(Route, DepthOneAnyPolicyStaysAtRoot) {
  const Trie t = build_trie(2, 2, 1, 1);
  const Vector x = {1, 1};
  EXPECT_EQ(route(t, x, BitConsume{}).visited, std::vector<NodeId>{*t.root});
  EXPECT_EQ(route(t, x, FeatureThreshold{}).visited, std::vector<NodeId>{*t.root});
}

TEST(Route, BitConsumeRejectsNonBits) {
  const Trie t = build_trie(2, 2, 3, 1);
  const Vector x = {0.5, 1};
  EXPECT_THROW(route(t, x, BitConsume{}), ContractError);
}

TEST(Route, ThresholdAlwaysRight) {
  const Trie t = build_trie(2, 2, 3, 1);
  const Vector x = {0.9, 0.0};
  const NodeId leaf = leaf_of(t, x, FeatureThreshold{});
  NodeId rightmost = *t.root;
  while (t.node(rightmost).right) rightmost = *t.node(rightmost).right;
  EXPECT_EQ(leaf, rightmost);
}

TEST(Route, ThresholdEqualityGoesRight) {
  const Trie t = build_trie(2, 2, 3, 1);
  const Vector x = {0.5, 0.0};
  const RoutePath p = route(t, x, FeatureThreshold{0.5});
  EXPECT_EQ(p.visited[1], *t.node(*t.root).right);
}

TEST(Route, IsPure) {
  const Trie t = build_trie(2, 2, 4, 3);
  const Vector x = {1, 0};
  EXPECT_EQ(route(t, x, BitConsume{}).visited, route(build_trie(2, 2, 4, 3), x, BitConsume{}).visited);
}

TEST(Features, DepthCycling) {
  const Trie t = assign_feature_indices(build_trie(2, 2, 3, 1), DepthCycling{2});
  const TrieNode& root = t.node(*t.root);
  EXPECT_EQ(root.feature_index, 0u);
  EXPECT_EQ(t.node(*root.left).feature_index, 1u);
  EXPECT_EQ(t.node(*root.right).feature_index, 1u);
  for (const auto& n : t.arena) {
    if (n.is_leaf()) EXPECT_EQ(n.feature_index, 0u);
  }
}

TEST(Features, ExplicitMap) {
  Trie t = build_trie(2, 2, 3, 1);
  ExplicitFeatures all5;
  for (NodeId id : traverse_trie(t)) all5.features[id] = 5;
  t = assign_feature_indices(t, all5);
  for (const auto& n : t.arena) EXPECT_EQ(n.feature_index, 5u);

  const Vector wide(10, 0.0);
  EXPECT_NO_THROW(route(t, wide, FeatureThreshold{}));
  const Vector narrow(3, 0.0);
  EXPECT_THROW(route(t, narrow, FeatureThreshold{}), ContractError);

  ExplicitFeatures partial;
  partial.features[NodeId{0}] = 1;
  EXPECT_THROW(assign_feature_indices(t, partial), ContractError);
}

TEST(Stats, ChainIsUnbalanced) { EXPECT_EQ(structural_stats(chain_of_three()), (StructuralStats{3, 1, 3, false})); }

TEST(Cost, MiniNnDepthThree) {
  const Trie t = build_trie(2, 20, 3, 1);
  const CostEstimate c = estimate_cost(t, CostModel{21, 2, 1});
  EXPECT_EQ(c.t_node, 42.0);
  EXPECT_EQ(c.per_inference, 126.0);
  const CostEstimate c2 = estimate_cost(t, CostModel{21, 2, 2});
  EXPECT_EQ(c2.t_node, 84.0);
  EXPECT_EQ(c2.per_inference, 252.0);
  const CostEstimate c0 = estimate_cost(t, CostModel{21, 2, 0});
  EXPECT_EQ(c0.t_node, 0.0);
  EXPECT_EQ(c0.per_inference, 0.0);
}

TEST(Cost, DepthOneAndChain) {
  const CostEstimate one = estimate_cost(build_trie(2, 20, 1, 1), CostModel{21, 2, 1});
  EXPECT_EQ(one.per_inference, one.t_node);
  const CostEstimate chain = estimate_cost(chain_of_three(), CostModel{10, 1, 1});
  EXPECT_EQ(chain.per_inference, 30.0);
}

TEST(Aggregate, MeanAlongPath) {
  const Trie zero = build_balanced(3, 1, [](std::uint64_t) { return nn::make_mini_nn(2, 3); });
  const Vector x = {1, 0};
  EXPECT_EQ(aggregate_path_inference(zero, x, BitConsume{}), Vector{0.5});

  Trie two;
  two.arena.resize(2);
  two.arena[0].net = constant_net(0.2);
  two.arena[1].net = constant_net(0.6);
  two.arena[0].right = NodeId{1};
  two.root = NodeId{0};
  // 1 steps right to node 1, then 0 finds no left child and stops there.
  const Vector bits = {1, 0};
  EXPECT_NEAR(aggregate_path_inference(two, bits, BitConsume{})[0], 0.4, 1e-15);

  const Trie single = build_trie(2, 4, 1, 5);
  EXPECT_EQ(aggregate_path_inference(single, x, BitConsume{}), nn::predict(single.arena[0].net, x));
}

TEST(Aggregate, MismatchedWidthsRejected) {
  Trie t;
  t.arena.resize(2);
  t.arena[0].net = constant_net(0.2);
  t.arena[1].net.layers = {nn::Dense{Matrix(2, 2, {0, 0, 0, 0}), {0, 0}}};
  t.arena[0].left = NodeId{1};
  t.root = NodeId{0};
  const Vector x = {0, 0};
  EXPECT_THROW(aggregate_path_inference(t, x, BitConsume{}), ContractError);
}

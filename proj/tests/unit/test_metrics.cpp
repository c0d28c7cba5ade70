#include <gtest/gtest.h>

#include <vector>

#include "tann/errors.hpp"
#include "tann/metrics.hpp"
#include "tann/rng.hpp"

using namespace tann;
using namespace tann::metrics;

namespace {

struct Oracle {
  double accuracy;
  double weighted_f1;
};

// Brute force over a plain list of (truth, pred) pairs.
Oracle brute_force(const std::vector<std::pair<std::size_t, std::size_t>>& pairs, std::size_t k) {
  double correct = 0;
  for (const auto& [t, p] : pairs) correct += t == p;
  double wf1 = 0;
  for (std::size_t c = 0; c < k; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (const auto& [t, p] : pairs) {
      if (t == c && p == c) tp += 1;
      if (t != c && p == c) fp += 1;
      if (t == c && p != c) fn += 1;
    }
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double f1 = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    wf1 += f1 * (tp + fn) / static_cast<double>(pairs.size());
  }
  return {correct / static_cast<double>(pairs.size()), wf1};
}

}  // namespace

TEST(Metrics, MatchesBruteForceOnRandomMatrices) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + rng.below(5);
    const std::size_t n = 1 + rng.below(60);
    std::vector<std::size_t> preds, labels;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back(rng.below(k));
      preds.push_back(rng.below(k));
      pairs.emplace_back(labels.back(), preds.back());
    }
    const ConfusionMatrix cm = confusion(preds, labels, k);
    const Oracle o = brute_force(pairs, k);
    ASSERT_NEAR(accuracy(cm), o.accuracy, 1e-12) << trial;
    ASSERT_NEAR(weighted_f1(cm), o.weighted_f1, 1e-12) << trial;
  }
}

TEST(Metrics, PerfectClassifier) {
  const std::vector<std::size_t> y = {0, 1, 2, 2, 1, 0, 0};
  const ConfusionMatrix cm = confusion(y, y, 3);
  EXPECT_EQ(accuracy(cm), 1.0);
  EXPECT_EQ(weighted_f1(cm), 1.0);
  EXPECT_EQ(macro_f1(cm), 1.0);
}

TEST(Metrics, AbsentClassScoresZero) {
  const std::vector<std::size_t> preds = {0, 0, 0};
  const std::vector<std::size_t> labels = {0, 0, 1};
  const ConfusionMatrix cm = confusion(preds, labels, 3);
  const auto scores = class_scores(cm);
  EXPECT_EQ(scores[2].precision, 0.0);
  EXPECT_EQ(scores[2].recall, 0.0);
  EXPECT_EQ(scores[2].f1, 0.0);
  EXPECT_EQ(scores[1].f1, 0.0);
  EXPECT_NEAR(scores[0].precision, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(scores[0].support, 2u);
}

TEST(Metrics, SummaryAgrees) {
  const std::vector<std::size_t> preds = {0, 1, 1, 0};
  const std::vector<std::size_t> labels = {0, 1, 0, 0};
  const ConfusionMatrix cm = confusion(preds, labels, 2);
  const MetricsReport r = summarize(cm);
  EXPECT_EQ(r.accuracy, accuracy(cm));
  EXPECT_EQ(r.weighted_f1, weighted_f1(cm));
  EXPECT_EQ(r.confusion, cm);
  EXPECT_EQ(cm.total(), 4u);
  EXPECT_EQ(cm.trace(), 3u);
  EXPECT_EQ(cm.at(0, 1), 1u);
}

TEST(Metrics, Errors) {
  const std::vector<std::size_t> a = {0, 1};
  const std::vector<std::size_t> b = {0};
  const std::vector<std::size_t> big = {0, 5};
  EXPECT_THROW(confusion(a, b, 2), ContractError);
  EXPECT_THROW(confusion(big, a, 2), ContractError);
  EXPECT_THROW(accuracy(ConfusionMatrix(2)), ContractError);
}

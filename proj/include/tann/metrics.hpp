#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tann::metrics {

/// counts[t * num_classes + p]: samples of true class t predicted as p.
struct ConfusionMatrix {
  std::size_t num_classes = 0;
  std::vector<std::size_t> counts;

  explicit ConfusionMatrix(std::size_t k = 0) : num_classes(k), counts(k * k, 0) {}

  std::size_t& at(std::size_t truth, std::size_t pred) { return counts[truth * num_classes + pred]; }
  std::size_t at(std::size_t truth, std::size_t pred) const { return counts[truth * num_classes + pred]; }
  std::size_t total() const;
  std::size_t trace() const;

  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassScores {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;
};

struct MetricsReport {
  double accuracy = 0;
  double weighted_f1 = 0;
  double macro_f1 = 0;
  std::vector<ClassScores> per_class;
  double mean_loss = 0;
  ConfusionMatrix confusion;
};

ConfusionMatrix confusion(std::span<const std::size_t> preds, std::span<const std::size_t> labels, std::size_t k);

double accuracy(const ConfusionMatrix& cm);

/// Precision, recall and F1 per class; a zero denominator yields 0.
std::vector<ClassScores> class_scores(const ConfusionMatrix& cm);

/// Support-weighted mean of per-class F1.
double weighted_f1(const ConfusionMatrix& cm);

/// Unweighted mean of per-class F1 (diagnostics only).
double macro_f1(const ConfusionMatrix& cm);

/// Everything except mean_loss, which the caller fills in.
MetricsReport summarize(const ConfusionMatrix& cm);

}  // namespace tann::metrics

#include "tann/metrics.hpp"

#include <string>

#include "tann/errors.hpp"

namespace tann::metrics {

namespace {

void require_samples(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ContractError("metrics need at least one evaluated sample");
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  return n;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < num_classes; ++i) n += at(i, i);
  return n;
}

ConfusionMatrix confusion(std::span<const std::size_t> preds, std::span<const std::size_t> labels, std::size_t k) {
  if (preds.size() != labels.size()) {
    throw ContractError("confusion: " + std::to_string(preds.size()) + " predictions for " +
                        std::to_string(labels.size()) + " labels");
  }
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] >= k || labels[i] >= k) throw ContractError("confusion: class index out of range");
    ++cm.at(labels[i], preds[i]);
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  require_samples(cm);
  return ratio(cm.trace(), cm.total());
}

std::vector<ClassScores> class_scores(const ConfusionMatrix& cm) {
  std::vector<ClassScores> scores(cm.num_classes);
  for (std::size_t c = 0; c < cm.num_classes; ++c) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t o = 0; o < cm.num_classes; ++o) {
      predicted += cm.at(o, c);
      actual += cm.at(c, o);
    }
    ClassScores& s = scores[c];
    s.support = actual;
    s.precision = ratio(cm.at(c, c), predicted);
    s.recall = ratio(cm.at(c, c), actual);
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  }
  return scores;
}

double weighted_f1(const ConfusionMatrix& cm) {
  require_samples(cm);
  double sum = 0.0;
  for (const ClassScores& s : class_scores(cm)) sum += static_cast<double>(s.support) * s.f1;
  return sum / static_cast<double>(cm.total());
}

double macro_f1(const ConfusionMatrix& cm) {
  require_samples(cm);
  if (cm.num_classes == 0) return 0.0;
  double sum = 0.0;
  for (const ClassScores& s : class_scores(cm)) sum += s.f1;
  return sum / static_cast<double>(cm.num_classes);
}

MetricsReport summarize(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.accuracy = accuracy(cm);
  r.weighted_f1 = weighted_f1(cm);
  r.macro_f1 = macro_f1(cm);
  r.per_class = class_scores(cm);
  r.confusion = cm;
  return r;
}

}  // namespace tann::metrics

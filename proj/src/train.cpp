#include "tann/train.hpp"

#include <chrono>
#include <functional>
#include <numeric>

#include "tann/errors.hpp"

namespace tann::train {

namespace {

using Router = std::function<NodeId(std::span<const double>)>;

void check_widths(const std::vector<TrieNode>& nodes, const data::Dataset& data) {
  if (data.empty()) throw ContractError("training needs a non-empty dataset");
  data.validate();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    try {
      nodes[i].net.output_width(data.feature_width);
    } catch (const DimensionError& e) {
      throw ContractError("node " + std::to_string(i) + " cannot take " + std::to_string(data.feature_width) +
                          "-wide features: " + e.what());
    }
  }
}

// Shared loop. `batch` = rows per optimizer step; every row is routed and
// run through its own node, row gradients are averaged over the batch.
std::vector<EpochRecord> run_epochs(std::vector<TrieNode>& nodes, const Router& router, const data::Dataset& data,
                                    const TrainConfig& cfg, std::size_t batch) {
  const optim::OptimizerKind kind = cfg.optimizer_kind();
  std::vector<optim::OptimizerState> optimizers(nodes.size(), optim::OptimizerState(kind));
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochRecord> records;
  records.reserve(cfg.epochs);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) rng.shuffle(std::span<std::size_t>(order));
    EpochRecord rec;
    rec.epoch = epoch;
    rec.sample_losses.reserve(data.size());

    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t rows = std::min(batch, order.size() - start);
      const double row_weight = 1.0 / static_cast<double>(rows);
      std::map<NodeId, nn::Gradients> touched;
      double batch_loss = 0.0;

      for (std::size_t r = 0; r < rows; ++r) {
        const data::Sample& sample = data.samples[order[start + r]];
        const NodeId leaf = router(sample.features);
        nn::Network& net = nodes[leaf.value].net;
        nn::ForwardResult fwd = nn::forward(net, sample.features, nn::Mode::Train, &rng);
        const Vector target = nn::make_target(cfg.loss, sample.label, fwd.output.size());
        const double loss = nn::loss_value(cfg.loss, fwd.output, target);
        Vector out_grad = nn::loss_gradient(cfg.loss, fwd.output, target);
        for (double& g : out_grad) g *= row_weight;

        auto it = touched.find(leaf);
        if (it == touched.end()) it = touched.emplace(leaf, nn::Gradients::zeros_like(net)).first;
        nn::accumulate_backward(net, fwd.cache, out_grad, it->second);

        rec.sample_losses.push_back(loss);
        ++rec.samples_per_leaf[leaf];
        batch_loss += loss;
      }

      if (cfg.step_mode == StepMode::GlobalStep) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
          const auto it = touched.find(NodeId{i});
          optimizers[i].step(nodes[i].net,
                             it != touched.end() ? it->second : nn::Gradients::zeros_like(nodes[i].net));
        }
      } else {
        for (const auto& [id, g] : touched) optimizers[id.value].step(nodes[id.value].net, g);
      }
      rec.last_loss = batch_loss * row_weight;
    }
    rec.mean_loss = std::accumulate(rec.sample_losses.begin(), rec.sample_losses.end(), 0.0) /
                    static_cast<double>(rec.sample_losses.size());
    records.push_back(std::move(rec));
  }
  return records;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

TrainReport<Trie> train_trie(Trie t, const data::Dataset& data, const TrainConfig& cfg, std::size_t batch) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  if (t.empty()) throw StructuralError("cannot train an empty trie");
  check_widths(t.arena, data);
  // Routing never reads parameters, so routing through the trie while its
  // arena is being updated is safe.
  const Router router = [&](std::span<const double> x) { return leaf_of(t, x, cfg.routing); };
  TrainReport<Trie> report;
  report.epochs = run_epochs(t.arena, router, data, cfg, batch);
  report.model = std::move(t);
  report.seconds = elapsed_since(start);
  return report;
}

metrics::MetricsReport score(const data::Dataset& data, double threshold,
                             const std::function<std::pair<Vector, nn::LossKind>(std::span<const double>)>& run) {
  if (data.empty()) throw ContractError("cannot evaluate on an empty dataset");
  std::vector<std::size_t> preds, labels;
  double loss_sum = 0.0;
  for (const data::Sample& s : data.samples) {
    const auto [out, loss] = run(s.features);
    preds.push_back(nn::predicted_class(out, threshold));
    labels.push_back(s.label);
    loss_sum += nn::loss_value(loss, out, nn::make_target(loss, s.label, out.size()));
  }
  metrics::MetricsReport report = metrics::summarize(metrics::confusion(preds, labels, data.num_classes));
  report.mean_loss = loss_sum / static_cast<double>(data.size());
  return report;
}

Vector checked_predict(const nn::Network& net, std::span<const double> x) {
  try {
    return nn::predict(net, x);
  } catch (const DimensionError& e) {
    throw ContractError(std::string("input does not fit the serving network: ") + e.what());
  }
}

}  // namespace

std::string to_string(StepMode mode) { return mode == StepMode::RouteLocal ? "route-local" : "global"; }

StepMode step_mode_from_string(const std::string& name) {
  if (name == "route-local") return StepMode::RouteLocal;
  if (name == "global") return StepMode::GlobalStep;
  throw ContractError("unknown step mode '" + name + "' (expected route-local or global)");
}

std::string to_string(OptimizerChoice choice) { return choice == OptimizerChoice::Sgd ? "sgd" : "adam"; }

OptimizerChoice optimizer_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerChoice::Sgd;
  if (name == "adam") return OptimizerChoice::Adam;
  throw ContractError("unknown optimizer '" + name + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ContractError("epochs must be at least 1");
  if (!(lr > 0.0)) throw ContractError("learning rate must be positive");
  if (batch_size < 1) throw ContractError("batch size must be at least 1");
}

optim::OptimizerKind TrainConfig::optimizer_kind() const {
  if (optimizer == OptimizerChoice::Sgd) return optim::Sgd{lr};
  return optim::Adam{lr, beta1, beta2, epsilon};
}

TrainReport<Trie> train_tann(Trie t, const data::Dataset& data, const TrainConfig& cfg) {
  return train_trie(std::move(t), data, cfg, 1);
}

TrainReport<nn::Network> train_single(nn::Network net, const data::Dataset& data, const TrainConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  std::vector<TrieNode> nodes(1);
  nodes[0].net = std::move(net);
  check_widths(nodes, data);
  TrainReport<nn::Network> report;
  report.epochs = run_epochs(nodes, [](std::span<const double>) { return NodeId{0}; }, data, cfg, 1);
  report.model = std::move(nodes[0].net);
  report.seconds = elapsed_since(start);
  return report;
}

TrainReport<Trie> train_tann_batched(Trie t, const data::Dataset& data, const TrainConfig& cfg) {
  if (cfg.loss != nn::LossKind::CrossEntropy) throw ContractError("batched TANN training uses CrossEntropy loss");
  if (!std::holds_alternative<FeatureThreshold>(cfg.routing)) {
    throw ContractError("batched TANN training routes by feature threshold");
  }
  return train_trie(std::move(t), data, cfg, cfg.batch_size);
}

Vector infer(const Trie& t, std::span<const double> x, const RoutingPolicy& policy) {
  return checked_predict(t.node(leaf_of(t, x, policy)).net, x);
}

metrics::MetricsReport evaluate(const Trie& t, const data::Dataset& data, const RoutingPolicy& policy,
                                double threshold) {
  if (t.empty()) throw StructuralError("cannot evaluate an empty trie");
  return score(data, threshold, [&](std::span<const double> x) {
    const nn::Network& net = t.node(leaf_of(t, x, policy)).net;
    return std::pair{checked_predict(net, x), net.loss};
  });
}

metrics::MetricsReport evaluate(const nn::Network& net, const data::Dataset& data, double threshold) {
  return score(data, threshold, [&](std::span<const double> x) { return std::pair{checked_predict(net, x), net.loss}; });
}

}  // namespace tann::train

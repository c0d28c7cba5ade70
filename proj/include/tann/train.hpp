#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tann/data.hpp"
#include "tann/metrics.hpp"
#include "tann/nn.hpp"
#include "tann/optim.hpp"
#include "tann/trie.hpp"

namespace tann::train {

enum class OptimizerChoice { Sgd, Adam };

/// RouteLocal steps only the optimizer of the node that served the sample.
/// GlobalStep steps every node's optimizer after every sample, feeding zero
/// gradients to the nodes that were not used.
enum class StepMode { RouteLocal, GlobalStep };

std::string to_string(StepMode mode);
StepMode step_mode_from_string(const std::string& name);
std::string to_string(OptimizerChoice choice);
OptimizerChoice optimizer_from_string(const std::string& name);

struct TrainConfig {
  double lr = 0.01;
  std::size_t epochs = 10;
  OptimizerChoice optimizer = OptimizerChoice::Adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  nn::LossKind loss = nn::LossKind::BCE;
  StepMode step_mode = StepMode::RouteLocal;
  RoutingPolicy routing = BitConsume{};
  std::size_t batch_size = 1;
  std::uint64_t seed = 1;
  bool shuffle = false;

  /// Throws ContractError unless epochs >= 1, lr > 0, batch_size >= 1.
  void validate() const;
  optim::OptimizerKind optimizer_kind() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0;
  double last_loss = 0;
  std::map<NodeId, std::size_t> samples_per_leaf;
  std::vector<double> sample_losses;  // in visit order
};

template <class Model>
struct TrainReport {
  std::vector<EpochRecord> epochs;
  Model model;
  double seconds = 0;
};

/// Online training: each sample is routed, then only the serving node's
/// network is run forward, backpropagated and stepped (see StepMode).
TrainReport<Trie> train_tann(Trie t, const data::Dataset& data, const TrainConfig& cfg);

/// The same loop for one standalone network. samples_per_leaf reports
/// everything under NodeId{0}.
TrainReport<nn::Network> train_single(nn::Network net, const data::Dataset& data, const TrainConfig& cfg);

/// Minibatch training with cross-entropy and feature-threshold routing:
/// each batch fills a B x num_classes output block row by row from the
/// rows' leaf networks, takes the mean batch loss, backpropagates each row
/// into its own leaf and steps every touched optimizer once.
TrainReport<Trie> train_tann_batched(Trie t, const data::Dataset& data, const TrainConfig& cfg);

/// Infer-mode output of the node where routing stops.
Vector infer(const Trie& t, std::span<const double> x, const RoutingPolicy& policy);

/// Classification metrics plus mean loss under each serving network's loss.
/// A single output unit is thresholded; wider outputs use argmax.
metrics::MetricsReport evaluate(const Trie& t, const data::Dataset& data, const RoutingPolicy& policy,
                                double threshold = 0.5);
metrics::MetricsReport evaluate(const nn::Network& net, const data::Dataset& data, double threshold = 0.5);

}  // namespace tann::train

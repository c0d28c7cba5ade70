#include "tann/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tann/baselines.hpp"
#include "tann/data.hpp"
#include "tann/errors.hpp"
#include "tann/report.hpp"
#include "tann/train.hpp"
#include "tann/trie.hpp"

namespace tann::cli {

namespace fs = std::filesystem;

namespace {

// Runs fn(0..n-1) on up to `jobs` threads. Every index owns its own result
// slot, so output order never depends on scheduling.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <class T>
std::string join(const std::vector<T>& items) {
  std::ostringstream s;
  for (std::size_t i = 0; i < items.size(); ++i) s << (i ? "," : "") << items[i];
  return s.str();
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }
std::string flag(bool b) { return b ? "true" : "false"; }

RoutingPolicy routing_policy(const std::string& name) {
  if (name == "bits") return BitConsume{};
  if (name == "threshold") return FeatureThreshold{0.5};
  throw ContractError("unknown routing '" + name + "'");
}

// Gate tries route on their two inputs; threshold routing cycles over them.
Trie gate_trie(std::size_t hidden, std::size_t depth, std::uint64_t seed, const std::string& routing) {
  Trie t = build_trie(2, hidden, depth, seed);
  if (routing == "threshold") t = assign_feature_indices(std::move(t), DepthCycling{2});
  return t;
}

train::TrainConfig gate_config(std::size_t epochs, double lr, std::uint64_t seed, const std::string& step_mode,
                               const std::string& routing) {
  train::TrainConfig cfg;
  cfg.lr = lr;
  cfg.epochs = epochs;
  cfg.optimizer = train::OptimizerChoice::Adam;
  cfg.loss = nn::LossKind::BCE;
  cfg.step_mode = train::step_mode_from_string(step_mode);
  cfg.routing = routing_policy(routing);
  cfg.seed = seed;
  return cfg;
}

struct RunResult {
  std::string label;
  std::vector<train::EpochRecord> epochs;
  metrics::MetricsReport metrics;

  double final_loss() const { return epochs.back().mean_loss; }
};

void write_trace(const fs::path& out_dir, const std::string& name, const RunResult& r) {
  write_text_atomically(out_dir / name, trace_csv(r.epochs));
}

std::vector<TracePoint> points_of(const RunResult& r) { return parse_trace_csv(trace_csv(r.epochs)); }

MetricsRow metrics_row(const std::string& model, const std::string& config, std::size_t depth, const RunResult& r) {
  return {model, config, depth, r.final_loss(), r.metrics.accuracy, r.metrics.weighted_f1};
}

void check_accuracy(Outcome& outcome, const std::optional<double>& required, const std::string& what,
                    const RunResult& r) {
  if (required && r.metrics.accuracy < *required) {
    outcome.failures.push_back({"accuracy", what + ": accuracy " + format_real(r.metrics.accuracy) + " < " +
                                                format_real(*required)});
  }
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

ManifestSection manifest_entries(const GateOptions& o) {
  ManifestSection m = {{"gate", quoted(o.gate)},
                       {"depth", std::to_string(o.depth)},
                       {"hidden", std::to_string(o.hidden)},
                       {"epochs", std::to_string(o.epochs)},
                       {"lr", format_real(o.lr)},
                       {"seeds", join(o.seeds)},
                       {"step-mode", quoted(o.step_mode)},
                       {"routing", quoted(o.routing)}};
  if (o.require_accuracy) m.emplace_back("require-accuracy", format_real(*o.require_accuracy));
  m.emplace_back("require-tann-better", flag(o.require_tann_better));
  return m;
}

ManifestSection manifest_entries(const SweepOptions& o) {
  ManifestSection m = {{"gate", quoted(o.gate)},
                       {"depth", join(o.depths)},
                       {"hidden", std::to_string(o.hidden)},
                       {"epochs", std::to_string(o.epochs)},
                       {"lr", format_real(o.lr)},
                       {"seeds", join(o.seeds)},
                       {"step-mode", quoted(o.step_mode)},
                       {"routing", quoted(o.routing)}};
  if (o.require_accuracy) m.emplace_back("require-accuracy", format_real(*o.require_accuracy));
  return m;
}

ManifestSection manifest_entries(const CompareOptions& o) {
  ManifestSection m = {{"gate", quoted(o.gate)},
                       {"arch", quoted(o.arch)},
                       {"depth", std::to_string(o.depth)},
                       {"seed", std::to_string(o.seed)}};
  if (o.epochs) m.emplace_back("epochs", std::to_string(*o.epochs));
  if (o.lr) m.emplace_back("lr", format_real(*o.lr));
  return m;
}

ManifestSection manifest_entries(const TextOptions& o) {
  ManifestSection m = {{"path", quoted(o.data.string())},
                       {"format", quoted(o.format)},
                       {"model", quoted(o.model)},
                       {"dropout", flag(o.dropout)},
                       {"depth", join(o.depths)},
                       {"epochs", std::to_string(o.epochs)},
                       {"lr", format_real(o.lr)},
                       {"batch", std::to_string(o.batch)},
                       {"seed", std::to_string(o.seed)},
                       {"max-features", std::to_string(o.max_features)},
                       {"split", format_real(o.split)}};
  if (o.require_accuracy) m.emplace_back("require-accuracy", format_real(*o.require_accuracy));
  return m;
}

ManifestSection manifest_entries(const CostOptions& o) {
  return {{"depth", std::to_string(o.depth)},
          {"neurons", format_real(o.neurons)},
          {"layers", format_real(o.layers)},
          {"per-neuron-cost", format_real(o.per_neuron_cost)}};
}

void write_manifest(const fs::path& out_dir, const std::string& command, const ManifestSection& entries,
                    const std::vector<std::pair<std::string, ManifestSection>>& extra) {
  std::ostringstream s;
  s << "command = " << quoted(command) << "\n\n[" << command << "]\n";
  for (const auto& [k, v] : entries) s << k << " = " << v << "\n";
  for (const auto& [name, section] : extra) {
    s << "\n[" << command << "." << name << "]\n";
    for (const auto& [k, v] : section) s << k << " = " << v << "\n";
  }
  write_text_atomically(out_dir / "manifest.ini", s.str());
}

void write_failures(const fs::path& out_dir, const std::string& command, const Outcome& outcome) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["failures"] = nlohmann::json::array();
  for (const Failure& f : outcome.failures) j["failures"].push_back({{"check", f.check}, {"detail", f.detail}});
  write_text_atomically(out_dir / "failures.json", j.dump(2) + "\n");
}

std::string manifest_command(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot read manifest " + manifest.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '[') break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    };
    trim(key);
    trim(value);
    if (key == "command") return value;
  }
  throw FormatError(manifest.string() + ": no 'command' entry");
}

Outcome run_gate(const GateOptions& o, const fs::path& out_dir, std::size_t jobs) {
  const data::Dataset ds = data::gate_dataset(data::gate_from_string(o.gate));
  const std::size_t n = o.seeds.size();
  std::vector<RunResult> tann(n), single(n);

  parallel_for(n, jobs, [&](std::size_t i) {
    const std::uint64_t seed = o.seeds[i];
    const train::TrainConfig cfg = gate_config(o.epochs, o.lr, seed, o.step_mode, o.routing);
    const Trie t = gate_trie(o.hidden, o.depth, seed, o.routing);
    // The standalone network starts from the same parameters as the root.
    const nn::Network root = t.node(*t.root).net;
    auto tr = train::train_tann(t, ds, cfg);
    tann[i] = {"tann seed " + std::to_string(seed), tr.epochs, train::evaluate(tr.model, ds, cfg.routing)};
    auto sr = train::train_single(root, ds, cfg);
    single[i] = {"single seed " + std::to_string(seed), sr.epochs, train::evaluate(sr.model, ds)};
  });

  fs::create_directories(out_dir);
  Outcome outcome;
  std::vector<MetricsRow> rows;
  std::vector<PlotSeries> series;
  std::vector<double> tann_final, single_final;
  double tann_min_acc = 1, single_min_acc = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string s = std::to_string(o.seeds[i]);
    write_trace(out_dir, "trace_tann_seed" + s + ".csv", tann[i]);
    write_trace(out_dir, "trace_single_seed" + s + ".csv", single[i]);
    rows.push_back(metrics_row("tann", o.gate + "-seed" + s, o.depth, tann[i]));
    rows.push_back(metrics_row("single", o.gate + "-seed" + s, 0, single[i]));
    series.push_back({tann[i].label, points_of(tann[i])});
    series.push_back({single[i].label, points_of(single[i])});
    tann_final.push_back(tann[i].final_loss());
    single_final.push_back(single[i].final_loss());
    tann_min_acc = std::min(tann_min_acc, tann[i].metrics.accuracy);
    single_min_acc = std::min(single_min_acc, single[i].metrics.accuracy);
    check_accuracy(outcome, o.require_accuracy, "tann seed " + s, tann[i]);
  }
  const double tann_med = median(tann_final), single_med = median(single_final);
  std::ostringstream summary;
  summary << "model,depth,seeds,median_final_loss,min_accuracy\n"
          << "tann," << o.depth << "," << n << "," << format_real(tann_med) << "," << format_real(tann_min_acc) << "\n"
          << "single,0," << n << "," << format_real(single_med) << "," << format_real(single_min_acc) << "\n";
  write_text_atomically(out_dir / "summary.csv", summary.str());
  write_text_atomically(out_dir / "metrics.csv", metrics_csv(rows));
  write_text_atomically(out_dir / "loss.svg", loss_plot_svg(series, o.gate + " training loss"));
  write_manifest(out_dir, "gate", manifest_entries(o));

  if (o.require_tann_better && !(tann_med < single_med)) {
    outcome.failures.push_back({"tann-better", "median final loss tann " + format_real(tann_med) +
                                                   " is not below single " + format_real(single_med)});
  }
  std::ostringstream report;
  report << o.gate << " over " << n << " seeds, " << o.epochs << " epochs\n"
         << "  tann (depth " << o.depth << ")  median final loss " << format_real(tann_med) << ", min accuracy "
         << tann_min_acc << "\n"
         << "  single net      median final loss " << format_real(single_med) << ", min accuracy "
         << single_min_acc << "\n";
  outcome.report = report.str();
  return outcome;
}

Outcome run_depth_sweep(SweepOptions o, const fs::path& out_dir, std::size_t jobs) {
  Outcome outcome;
  if (o.depths.empty()) throw ContractError("depth list is empty");
  std::vector<std::size_t> unique;
  for (std::size_t d : o.depths) {
    if (d == 0) throw ContractError("depth must be at least 1");
    if (std::find(unique.begin(), unique.end(), d) != unique.end()) {
      outcome.warnings.push_back("depth " + std::to_string(d) + " listed more than once; running it once");
    } else {
      unique.push_back(d);
    }
  }
  o.depths = unique;

  const data::Dataset ds = data::gate_dataset(data::gate_from_string(o.gate));
  const std::size_t per_depth = o.seeds.size();
  std::vector<RunResult> runs(o.depths.size() * per_depth);
  parallel_for(runs.size(), jobs, [&](std::size_t i) {
    const std::size_t depth = o.depths[i / per_depth];
    const std::uint64_t seed = o.seeds[i % per_depth];
    const train::TrainConfig cfg = gate_config(o.epochs, o.lr, seed, o.step_mode, o.routing);
    auto r = train::train_tann(gate_trie(o.hidden, depth, seed, o.routing), ds, cfg);
    runs[i] = {"depth " + std::to_string(depth), r.epochs, train::evaluate(r.model, ds, cfg.routing)};
  });

  fs::create_directories(out_dir);
  std::vector<MetricsRow> rows;
  std::vector<PlotSeries> series;
  std::ostringstream summary, report;
  summary << "depth,seeds,median_final_loss,min_accuracy\n";
  report << o.gate << " depth sweep, " << o.epochs << " epochs, " << per_depth << " seeds\n";
  for (std::size_t di = 0; di < o.depths.size(); ++di) {
    const std::size_t depth = o.depths[di];
    std::vector<double> finals;
    double min_acc = 1;
    for (std::size_t si = 0; si < per_depth; ++si) {
      const RunResult& r = runs[di * per_depth + si];
      const std::string s = std::to_string(o.seeds[si]);
      write_trace(out_dir, "trace_depth" + std::to_string(depth) + "_seed" + s + ".csv", r);
      rows.push_back(metrics_row("tann", o.gate + "-seed" + s, depth, r));
      finals.push_back(r.final_loss());
      min_acc = std::min(min_acc, r.metrics.accuracy);
      check_accuracy(outcome, o.require_accuracy, "depth " + std::to_string(depth) + " seed " + s, r);
    }
    series.push_back({runs[di * per_depth].label, points_of(runs[di * per_depth])});
    summary << depth << "," << per_depth << "," << format_real(median(finals)) << "," << format_real(min_acc) << "\n";
    report << "  depth " << depth << "  median final loss " << format_real(median(finals)) << ", min accuracy "
           << min_acc << "\n";
  }
  write_text_atomically(out_dir / "summary.csv", summary.str());
  write_text_atomically(out_dir / "metrics.csv", metrics_csv(rows));
  write_text_atomically(out_dir / "loss.svg", loss_plot_svg(series, o.gate + " loss by trie depth"));
  write_manifest(out_dir, "depth-sweep", manifest_entries(o));
  outcome.report = report.str();
  return outcome;
}

Outcome run_compare(const CompareOptions& o, const fs::path& out_dir, std::size_t jobs) {
  using baselines::ArchKind;
  std::vector<ArchKind> archs;
  if (o.arch == "all") {
    archs = {ArchKind::SimpleDropoutNN, ArchKind::TinyCNN, ArchKind::TinyRNN, ArchKind::ComplexNN};
  } else {
    archs = {baselines::arch_from_string(o.arch)};
    if (!baselines::is_gate_arch(archs[0])) throw ContractError(o.arch + " is not a comparison architecture");
  }
  if (o.depth == 0) throw ContractError("depth must be at least 1");
  const data::Dataset ds = data::gate_dataset(data::gate_from_string(o.gate));

  std::vector<train::TrainConfig> configs;
  for (ArchKind k : archs) {
    train::TrainConfig cfg = baselines::make_comparison_config(k);
    if (o.epochs) cfg.epochs = *o.epochs;
    if (o.lr) cfg.lr = *o.lr;
    cfg.seed = o.seed;
    cfg.routing = BitConsume{};
    configs.push_back(cfg);
  }

  // Run 2a is the standalone network, 2a+1 the same network in every node.
  std::vector<RunResult> runs(2 * archs.size());
  parallel_for(runs.size(), jobs, [&](std::size_t i) {
    const baselines::ArchSpec spec{archs[i / 2]};
    const train::TrainConfig& cfg = configs[i / 2];
    if (i % 2 == 0) {
      auto r = train::train_single(baselines::make_network(spec, node_seed(o.seed, 1)), ds, cfg);
      runs[i] = {to_string(spec.kind) + " standalone", r.epochs, train::evaluate(r.model, ds)};
    } else {
      auto r = train::train_tann(baselines::embed_in_trie(spec, o.depth, o.seed), ds, cfg);
      runs[i] = {to_string(spec.kind) + " tann", r.epochs, train::evaluate(r.model, ds, cfg.routing)};
    }
  });

  fs::create_directories(out_dir);
  std::vector<MetricsRow> rows;
  std::vector<PlotSeries> series;
  std::vector<std::pair<std::string, ManifestSection>> resolved;
  std::ostringstream summary, report;
  summary << "arch,variant,depth,optimizer,loss,lr,epochs,dropout,final_loss,accuracy\n";
  report << o.gate << " comparison, seed " << o.seed << "\n";
  for (std::size_t a = 0; a < archs.size(); ++a) {
    const std::string name = to_string(archs[a]);
    const train::TrainConfig& cfg = configs[a];
    const double dropout = baselines::comparison_dropout_rate(archs[a]);
    resolved.push_back({name,
                        {{"optimizer", quoted(train::to_string(cfg.optimizer))},
                         {"loss", quoted(nn::to_string(cfg.loss))},
                         {"lr", format_real(cfg.lr)},
                         {"epochs", std::to_string(cfg.epochs)},
                         {"dropout", format_real(dropout)},
                         {"depth", std::to_string(o.depth)}}});
    for (std::size_t v = 0; v < 2; ++v) {
      const RunResult& r = runs[2 * a + v];
      const std::string variant = v == 0 ? "standalone" : "tann";
      const std::size_t depth = v == 0 ? 0 : o.depth;
      write_trace(out_dir, "trace_" + name + "_" + variant + ".csv", r);
      rows.push_back(metrics_row(name, variant, depth, r));
      series.push_back({r.label, points_of(r)});
      summary << name << "," << variant << "," << depth << "," << train::to_string(cfg.optimizer) << ","
              << nn::to_string(cfg.loss) << "," << format_real(cfg.lr) << "," << cfg.epochs << ","
              << format_real(dropout) << "," << format_real(r.final_loss()) << ","
              << format_real(r.metrics.accuracy) << "\n";
      report << "  " << r.label << "  final loss " << format_real(r.final_loss()) << ", accuracy "
             << r.metrics.accuracy << "\n";
    }
  }
  write_text_atomically(out_dir / "summary.csv", summary.str());
  write_text_atomically(out_dir / "metrics.csv", metrics_csv(rows));
  write_text_atomically(out_dir / "loss.svg", loss_plot_svg(series, o.gate + " architecture comparison"));
  write_manifest(out_dir, "compare", manifest_entries(o), resolved);
  Outcome outcome;
  outcome.report = report.str();
  return outcome;
}

Outcome run_text(TextOptions o, const fs::path& out_dir, std::size_t jobs) {
  Outcome outcome;
  if (o.depths.empty()) throw ContractError("depth list is empty");
  std::vector<std::size_t> unique;
  for (std::size_t d : o.depths) {
    if (d == 0) throw ContractError("depth must be at least 1");
    if (std::find(unique.begin(), unique.end(), d) == unique.end()) {
      unique.push_back(d);
    } else {
      outcome.warnings.push_back("depth " + std::to_string(d) + " listed more than once; running it once");
    }
  }
  o.depths = unique;
  o.data = fs::absolute(o.data);
  if (!fs::exists(o.data)) throw IoError("no such corpus: " + o.data.string());

  const data::RawCorpus corpus =
      o.format == "dirs" ? data::load_dir_per_class(o.data) : data::load_labeled_lines(o.data);
  for (const std::string& w : corpus.warnings) outcome.warnings.push_back(w);

  // Split document indices first so the vocabulary only sees training text.
  data::Dataset index_ds;
  index_ds.num_classes = 1;
  index_ds.feature_width = 1;
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) index_ds.samples.push_back({Vector{double(i)}, 0});
  const auto [train_idx, test_idx] = data::train_test_split(index_ds, o.split, o.seed);
  const auto subset = [&](const data::Dataset& idx) {
    data::RawCorpus c;
    c.classes = corpus.classes;
    for (const auto& s : idx.samples) c.docs.push_back(corpus.docs[static_cast<std::size_t>(s.features[0])]);
    return c;
  };
  data::VectorizerConfig vcfg;
  vcfg.max_features = o.max_features;
  const data::RawCorpus train_docs = subset(train_idx), test_docs = subset(test_idx);
  const data::Vocab vocab = data::build_vocab(train_docs, vcfg);
  const data::Dataset train_ds = data::vectorize(train_docs, vocab, vcfg);
  const data::Dataset test_ds = data::vectorize(test_docs, vocab, vcfg);
  const std::size_t width = vocab.size();

  const baselines::ArchSpec spec{o.model == "rnn" ? baselines::ArchKind::TextRNN : baselines::ArchKind::TextFFN,
                                 width, corpus.classes.size(), o.dropout};
  train::TrainConfig cfg;
  cfg.lr = o.lr;
  cfg.epochs = o.epochs;
  cfg.optimizer = train::OptimizerChoice::Adam;
  cfg.loss = nn::LossKind::CrossEntropy;
  cfg.routing = FeatureThreshold{0.5};
  cfg.batch_size = o.batch;
  cfg.seed = o.seed;
  cfg.shuffle = true;

  std::vector<RunResult> runs(o.depths.size());
  parallel_for(runs.size(), jobs, [&](std::size_t i) {
    Trie t = assign_feature_indices(baselines::embed_in_trie(spec, o.depths[i], o.seed), DepthCycling{width});
    auto r = train::train_tann_batched(std::move(t), train_ds, cfg);
    runs[i] = {"depth " + std::to_string(o.depths[i]), r.epochs, train::evaluate(r.model, test_ds, cfg.routing)};
  });

  fs::create_directories(out_dir);
  const std::string model = "tann-" + to_string(spec.kind);
  const std::string config = to_lower(o.data.stem().string()) + "-seed" + std::to_string(o.seed);
  std::vector<MetricsRow> rows;
  std::vector<PlotSeries> series;
  std::ostringstream report;
  report << model << " on " << o.data.filename().string() << ": " << train_ds.size() << " train / "
         << test_ds.size() << " test documents, " << width << " features\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    write_trace(out_dir, "trace_depth" + std::to_string(o.depths[i]) + ".csv", runs[i]);
    rows.push_back(metrics_row(model, config, o.depths[i], runs[i]));
    series.push_back({runs[i].label, points_of(runs[i])});
    check_accuracy(outcome, o.require_accuracy, "depth " + std::to_string(o.depths[i]), runs[i]);
    report << "  depth " << o.depths[i] << "  held-out accuracy " << runs[i].metrics.accuracy << ", weighted F1 "
           << runs[i].metrics.weighted_f1 << "\n";
  }
  write_text_atomically(out_dir / "metrics.csv", metrics_csv(rows));
  write_text_atomically(out_dir / "loss.svg", loss_plot_svg(series, model + " training loss"));

  const nn::Network shape = baselines::make_shape(spec);
  std::vector<std::string> layers;
  for (const auto& l : shape.layers) layers.push_back(nn::layer_name(l));
  write_manifest(out_dir, "text", manifest_entries(o),
                 {{"resolved",
                   {{"classes", quoted(join(corpus.classes))},
                    {"features", std::to_string(width)},
                    {"train-documents", std::to_string(train_ds.size())},
                    {"test-documents", std::to_string(test_ds.size())},
                    {"node-layers", quoted(join(layers))},
                    {"optimizer", quoted("adam")},
                    {"loss", quoted(nn::to_string(cfg.loss))},
                    {"routing", quoted("threshold")}}}});
  outcome.report = report.str();
  return outcome;
}

Outcome run_cost(const CostOptions& o, const fs::path& out_dir) {
  if (o.depth == 0 || !(o.neurons > 0) || !(o.layers > 0) || !(o.per_neuron_cost > 0)) {
    throw ContractError("cost parameters must be positive");
  }
  const Trie t = build_balanced(o.depth, 0, [](std::uint64_t) { return nn::Network{}; });
  const CostEstimate c = estimate_cost(t, CostModel{o.neurons, o.layers, o.per_neuron_cost});
  fs::create_directories(out_dir);
  std::ostringstream csv;
  csv << "depth,neurons,layers,per_neuron_cost,t_node,per_inference\n"
      << o.depth << "," << format_real(o.neurons) << "," << format_real(o.layers) << ","
      << format_real(o.per_neuron_cost) << "," << format_real(c.t_node) << "," << format_real(c.per_inference)
      << "\n";
  write_text_atomically(out_dir / "cost.csv", csv.str());
  write_manifest(out_dir, "cost", manifest_entries(o));
  Outcome outcome;
  outcome.report = "t_node = " + format_real(c.t_node) + "\nper_inference = " + format_real(c.per_inference) + "\n";
  return outcome;
}

void run_plot(const std::vector<fs::path>& traces, const fs::path& output, const std::string& title) {
  if (traces.empty()) throw ContractError("plot needs at least one trace");
  std::vector<PlotSeries> series;
  for (const fs::path& p : traces) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read trace " + p.string());
    const std::string text(std::istreambuf_iterator<char>(in), {});
    auto points = parse_trace_csv(text);
    if (points.empty()) throw ContractError("trace " + p.string() + " has no epochs");
    series.push_back({p.stem().string(), std::move(points)});
  }
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  write_text_atomically(output, loss_plot_svg(series, title));
}

}  // namespace tann::cli

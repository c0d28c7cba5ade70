// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any of them fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tann/cli.hpp"
#include "tann/metrics.hpp"
#include "tann/nn.hpp"
#include "tann/optim.hpp"
#include "tann/report.hpp"
#include "tann/rng.hpp"
#include "tann/train.hpp"
#include "tann/trie.hpp"
#include "testing.hpp"

namespace fs = std::filesystem;
using namespace tann;

namespace {

const fs::path kWork = fs::temp_directory_path() / "tann_acceptance";

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tann");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// section -> key -> value, quotes stripped.
std::map<std::string, std::map<std::string, std::string>> read_ini(const fs::path& p) {
  std::map<std::string, std::map<std::string, std::string>> ini;
  std::istringstream in(slurp(p));
  std::string line, section;
  const auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.find(']') - 1);
      continue;
    }
    const auto eq = line.find('=');
    if (eq != std::string::npos) ini[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return ini;
}

std::string fmt(double v) { return format_real(v); }

Verdict gradient_soundness() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  std::size_t checked = 0;
  for (std::size_t family = 0; family < testing_util::kFamilyCount; ++family) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto inst = testing_util::random_instance(family, 1000 + seed);
      Rng rng(seed);
      const auto fwd = nn::forward(inst.net, inst.x, nn::Mode::Train, &rng);
      const auto analytic = nn::backward(inst.net, fwd.cache, inst.target);
      const auto numeric = nn::finite_diff_gradients(inst.net, inst.x, inst.target, 1e-5, &fwd.cache);
      worst = std::max(worst, testing_util::max_relative_error(analytic, numeric));
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 10.0, std::to_string(checked) + " networks, max relative error " + fmt(worst) +
                                           ", " + fmt(secs) + " s"};
}

Verdict optimizer_oracle() {
  // Hand-expanded updates for a single scalar parameter starting at 0 (SGD
  // starts at 1): Adam step 1 with g = 1, step 2 with g = 0.
  const double lr = 0.001, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double sgd_expected = 1.0 - 0.2 * 0.5;
  const double adam1 = -lr * 1.0 / (1.0 + eps);
  const double m2 = b1 * (1 - b1), v2 = b2 * (1 - b2);
  const double adam2 = adam1 - lr * (m2 / (1 - b1 * b1)) / (std::sqrt(v2 / (1 - b2 * b2)) + eps);

  Vector p = {1.0};
  std::vector<std::span<double>> params = {p};
  optim::OptimizerState sgd(optim::Sgd{0.2});
  sgd.step(params, nn::Gradients{{Vector{0.5}}});
  const double sgd_err = std::abs(p[0] - sgd_expected);

  p[0] = 0.0;
  optim::OptimizerState adam(optim::Adam{lr, b1, b2, eps});
  adam.step(params, nn::Gradients{{Vector{1.0}}});
  const double err1 = std::abs(p[0] - adam1);
  adam.step(params, nn::Gradients{{Vector{0.0}}});
  const double err2 = std::abs(p[0] - adam2);
  const double worst = std::max({sgd_err, err1, err2});
  return {worst <= 1e-12, "sgd " + fmt(sgd_err) + ", adam step 1 " + fmt(err1) + ", adam step 2 " + fmt(err2)};
}

Verdict trie_structure() {
  for (std::size_t d = 1; d <= 10; ++d) {
    const StructuralStats s = structural_stats(build_trie(2, 20, d, 1));
    const StructuralStats want{(std::size_t{1} << d) - 1, std::size_t{1} << (d - 1), d, true};
    if (!(s == want)) return {false, "depth " + std::to_string(d) + " has the wrong shape"};
  }
  const Trie t = build_trie(2, 20, 3, 1);
  std::set<NodeId> leaves;
  for (const Vector& x : {Vector{0, 0}, Vector{0, 1}, Vector{1, 0}, Vector{1, 1}}) {
    const NodeId leaf = leaf_of(t, x, BitConsume{});
    if (!t.node(leaf).is_leaf()) return {false, "an XOR input stopped at an inner node"};
    leaves.insert(leaf);
  }
  return {leaves.size() == 4, "depths 1..10 exact, XOR inputs reach " + std::to_string(leaves.size()) + " leaves"};
}

Verdict gate_learnability() {
  std::size_t perfect = 0, total = 0, worst_epochs = 0;
  std::string misses;
  for (data::Gate gate : {data::Gate::Xor, data::Gate::And, data::Gate::Or}) {
    const data::Dataset ds = data::gate_dataset(gate);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      train::TrainConfig cfg;
      cfg.lr = 0.01;
      cfg.optimizer = train::OptimizerChoice::Adam;
      cfg.loss = nn::LossKind::BCE;
      cfg.step_mode = train::StepMode::RouteLocal;
      cfg.routing = BitConsume{};
      cfg.seed = seed;
      // Smallest epoch count (of 10, 20, ..., 200) that reaches 4/4.
      bool reached = false;
      for (std::size_t epochs = 10; epochs <= 200 && !reached; epochs += 10) {
        cfg.epochs = epochs;
        const auto r = train::train_tann(build_trie(2, 20, 3, seed), ds, cfg);
        if (train::evaluate(r.model, ds, cfg.routing).accuracy == 1.0) {
          reached = true;
          worst_epochs = std::max(worst_epochs, epochs);
        }
      }
      ++total;
      if (reached) {
        ++perfect;
      } else {
        misses += " " + data::to_string(gate) + "/seed" + std::to_string(seed);
      }
    }
  }
  return {perfect == total, std::to_string(perfect) + "/" + std::to_string(total) +
                                " gate runs reach 4/4, slowest within " + std::to_string(worst_epochs) + " epochs" +
                                (misses.empty() ? "" : "; missed:" + misses)};
}

Verdict tann_vs_single() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = kWork / "gate";
  const int code = cli({"--out", dir.string(), "gate", "xor", "--depth", "3", "--hidden", "20", "--epochs", "10",
                        "--require-tann-better"});
  const double secs = seconds_since(t0);
  const auto rows = csv_rows(dir / "summary.csv");
  if (rows.size() != 2) return {false, "summary.csv has " + std::to_string(rows.size()) + " rows"};
  const double tann = std::stod(rows[0][3]), single = std::stod(rows[1][3]);
  return {code == 0 && tann < single && secs < 5.0,
          "median final loss tann " + fmt(tann) + " vs single " + fmt(single) + ", " + fmt(secs) + " s"};
}

Verdict depth_insensitivity() {
  const fs::path dir = kWork / "sweep";
  const int code = cli({"--out", dir.string(), "depth-sweep", "xor", "--depth", "1,2,3,4,5", "--epochs", "200",
                        "--seeds", "1,2,3,4,5", "--require-accuracy", "1"});
  const auto rows = csv_rows(dir / "summary.csv");
  bool all = rows.size() == 5;
  std::string detail;
  for (const auto& r : rows) {
    all = all && std::stod(r[3]) == 1.0;
    detail += " d" + r[0] + "=" + r[3];
  }
  return {code == 0 && all, std::to_string(rows.size()) + " summary rows, min accuracy per depth:" + detail};
}

Verdict comparison_harness() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = kWork / "compare";
  const int code = cli({"--out", dir.string(), "compare", "--arch", "all"});
  const double secs = seconds_since(t0);
  const auto rows = csv_rows(dir / "summary.csv");
  auto ini = read_ini(dir / "manifest.ini");
  struct Want {
    const char* arch;
    const char* optimizer;
    const char* loss;
    const char* dropout;
  };
  const Want table[] = {{"simple_dropout_nn", "sgd", "bce", "0.5"},
                        {"tiny_cnn", "sgd", "bce", "0"},
                        {"tiny_rnn", "sgd", "bce", "0"},
                        {"complex_nn", "adam", "mse", "0"}};
  std::string mismatch;
  for (const Want& w : table) {
    auto& s = ini[std::string("compare.") + w.arch];
    if (s["optimizer"] != w.optimizer || s["loss"] != w.loss || s["dropout"] != w.dropout || s["lr"] != "0.2" ||
        s["epochs"] != "10" || s["depth"] != "3") {
      mismatch += std::string(" ") + w.arch;
    }
  }
  return {code == 0 && rows.size() == 8 && mismatch.empty() && secs < 30.0,
          std::to_string(rows.size()) + " runs, manifest configs " +
              (mismatch.empty() ? std::string("match") : "differ for" + mismatch) + ", " + fmt(secs) + " s"};
}

Verdict metrics_oracle() {
  Rng rng(77);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + rng.below(6);
    const std::size_t n = 1 + rng.below(80);
    std::vector<std::size_t> preds(n), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = rng.below(k);
      preds[i] = rng.below(k);
    }
    double correct = 0, wf1 = 0;
    for (std::size_t i = 0; i < n; ++i) correct += preds[i] == labels[i];
    for (std::size_t c = 0; c < k; ++c) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        tp += preds[i] == c && labels[i] == c;
        fp += preds[i] == c && labels[i] != c;
        fn += preds[i] != c && labels[i] == c;
      }
      const double prec = tp + fp > 0 ? tp / (tp + fp) : 0, rec = tp + fn > 0 ? tp / (tp + fn) : 0;
      wf1 += (prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0) * (tp + fn) / double(n);
    }
    const auto cm = metrics::confusion(preds, labels, k);
    worst = std::max({worst, std::abs(metrics::accuracy(cm) - correct / double(n)),
                      std::abs(metrics::weighted_f1(cm) - wf1)});
  }
  const std::vector<std::size_t> y = {0, 1, 2, 1, 0, 2, 2};
  const auto perfect = metrics::confusion(y, y, 3);
  const bool exact = metrics::accuracy(perfect) == 1.0 && metrics::weighted_f1(perfect) == 1.0;
  return {worst <= 1e-12 && exact, "1000 matrices, max deviation " + fmt(worst) + ", perfect classifier " +
                                       (exact ? "exactly 1" : "not exactly 1")};
}

Verdict text_desk_scale() {
  const std::string corpus = std::string(TANN_SOURCE_DIR) + "/data/mini_spam.tsv";
  const fs::path dir = kWork / "text";
  const int code = cli({"--out", dir.string(), "text", corpus, "--model", "ffn", "--depth", "1,2,3,4,5", "--seed",
                        "1"});
  const auto rows = csv_rows(dir / "metrics.csv");
  if (code != 0 || rows.size() != 5) return {false, "exit " + std::to_string(code) + ", " +
                                                        std::to_string(rows.size()) + " metric rows"};
  const double acc1 = std::stod(rows[0][4]);
  std::string detail = "depth 1 held-out accuracy " + rows[0][4] + "; rows for depths";
  for (const auto& r : rows) detail += " " + r[2];
  bool pass = rows[0][2] == "1" && acc1 >= 0.90;

  // Stretch goal, only when the full SMS spam collection is available
  // locally: the FFN should land within 3 points of 98.83% held-out accuracy.
  if (const char* full = std::getenv("TANN_FULL_SPAM_CORPUS")) {
    const fs::path full_dir = kWork / "text_full";
    const int full_code = cli({"--out", full_dir.string(), "text", full, "--model", "ffn", "--depth", "1"});
    const auto full_rows = csv_rows(full_dir / "metrics.csv");
    const double full_acc = full_code == 0 && full_rows.size() == 1 ? std::stod(full_rows[0][4]) : 0.0;
    pass = pass && std::abs(full_acc - 0.9883) <= 0.03;
    detail += "; full corpus accuracy " + fmt(full_acc);
  } else {
    detail += "; full-corpus stretch check skipped (TANN_FULL_SPAM_CORPUS unset)";
  }
  return {pass, detail};
}

Verdict cost_estimator() {
  const CostEstimate c = estimate_cost(build_trie(2, 20, 3, 1), CostModel{21, 2, 1});
  const fs::path dir = kWork / "cost";
  const int code = cli({"--out", dir.string(), "cost", "--depth", "3", "--neurons", "21", "--layers", "2",
                        "--per-neuron-cost", "1"});
  const auto rows = csv_rows(dir / "cost.csv");
  const bool cli_ok = code == 0 && rows.size() == 1 && rows[0][4] == "42" && rows[0][5] == "126";
  return {c.t_node == 42.0 && c.per_inference == 126.0 && cli_ok,
          "t_node " + fmt(c.t_node) + ", per_inference " + fmt(c.per_inference)};
}

Verdict replay_determinism() {
  std::size_t compared = 0;
  std::string diffs;
  for (const char* run : {"gate", "sweep", "compare", "text", "cost"}) {
    const fs::path src = kWork / run;
    const fs::path dst = kWork / (std::string("replay_") + run);
    if (!fs::exists(src / "manifest.ini")) return {false, std::string(run) + " left no manifest"};
    if (cli({"--out", dst.string(), "replay", (src / "manifest.ini").string()}) != 0) {
      return {false, std::string("replay of ") + run + " failed"};
    }
    for (const auto& e : fs::directory_iterator(src)) {
      if (e.path().extension() != ".csv") continue;
      ++compared;
      if (slurp(e.path()) != slurp(dst / e.path().filename())) diffs += " " + std::string(run) + "/" +
                                                                         e.path().filename().string();
    }
  }
  return {diffs.empty() && compared > 0,
          std::to_string(compared) + " CSVs compared" + (diffs.empty() ? ", all identical" : "; differ:" + diffs)};
}

}  // namespace

int main() {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"gradient soundness", gradient_soundness},
      {"optimizer oracle", optimizer_oracle},
      {"trie structure", trie_structure},
      {"gate learnability", gate_learnability},
      {"tann beats single network", tann_vs_single},
      {"depth insensitivity", depth_insensitivity},
      {"comparison harness", comparison_harness},
      {"metrics oracle", metrics_oracle},
      {"text desk scale", text_desk_scale},
      {"cost estimator", cost_estimator},
      {"replay determinism", replay_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << v.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

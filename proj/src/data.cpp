#include "tann/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "tann/errors.hpp"
#include "tann/report.hpp"
#include "tann/rng.hpp"

namespace tann::data {

namespace fs = std::filesystem;

void Dataset::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].features.size() != feature_width) {
      throw ContractError("sample " + std::to_string(i) + " has width " + std::to_string(samples[i].features.size()) +
                          ", dataset width is " + std::to_string(feature_width));
    }
    if (samples[i].label >= num_classes) {
      throw ContractError("sample " + std::to_string(i) + " label out of range");
    }
  }
}

Gate gate_from_string(const std::string& name) {
  if (name == "xor") return Gate::Xor;
  if (name == "and") return Gate::And;
  if (name == "or") return Gate::Or;
  throw ContractError("unknown gate '" + name + "' (expected xor, and, or)");
}

std::string to_string(Gate gate) {
  switch (gate) {
    case Gate::Xor:
      return "xor";
    case Gate::And:
      return "and";
    case Gate::Or:
      return "or";
  }
  return "xor";
}

Dataset gate_dataset(Gate gate) {
  Dataset ds;
  ds.num_classes = 2;
  ds.feature_width = 2;
  ds.class_names = {"0", "1"};
  const double inputs[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (const auto& in : inputs) {
    const bool a = in[0] != 0.0;
    const bool b = in[1] != 0.0;
    bool out = false;
    switch (gate) {
      case Gate::Xor:
        out = a != b;
        break;
      case Gate::And:
        out = a && b;
        break;
      case Gate::Or:
        out = a || b;
        break;
    }
    ds.samples.push_back(Sample{{in[0], in[1]}, out ? 1u : 0u});
  }
  return ds;
}

RawCorpus load_labeled_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  RawCorpus corpus;
  std::set<std::string> classes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      corpus.warnings.push_back(path.string() + ":" + std::to_string(line_no) + ": expected 'label<TAB>text'");
      continue;
    }
    RawDocument doc{line.substr(0, tab), line.substr(tab + 1)};
    classes.insert(doc.label);
    corpus.docs.push_back(std::move(doc));
  }
  if (corpus.docs.empty()) throw FormatError(path.string() + ": no parseable 'label<TAB>text' lines");
  corpus.classes.assign(classes.begin(), classes.end());
  return corpus;
}

RawCorpus load_dir_per_class(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("not a readable directory: " + root.string());
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  if (class_dirs.empty()) throw FormatError(root.string() + ": no class subdirectories");
  std::sort(class_dirs.begin(), class_dirs.end());

  RawCorpus corpus;
  for (const fs::path& dir : class_dirs) {
    const std::string label = dir.filename().string();
    corpus.classes.push_back(label);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) corpus.warnings.push_back(dir.string() + ": class directory is empty");
    for (const fs::path& file : files) {
      std::ifstream in(file, std::ios::binary);
      if (!in) throw IoError("cannot read " + file.string());
      std::ostringstream text;
      text << in.rdbuf();
      corpus.docs.push_back(RawDocument{label, text.str()});
    }
  }
  return corpus;
}

std::vector<std::string> tokenize(const std::string& text, const VectorizerConfig& cfg) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(cfg.lowercase ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Vocab build_vocab(const RawCorpus& corpus, const VectorizerConfig& cfg) {
  if (corpus.docs.empty()) throw ContractError("cannot build a vocabulary from an empty corpus");
  if (cfg.max_features == 0) throw ContractError("max_features must be at least 1");
  std::map<std::string, std::size_t> df;
  for (const RawDocument& doc : corpus.docs) {
    auto tokens = tokenize(doc.text, cfg);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& tok : tokens) ++df[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > cfg.max_features) ranked.resize(cfg.max_features);

  Vocab vocab;
  vocab.doc_count = corpus.docs.size();
  vocab.max_features = cfg.max_features;
  for (auto& [tok, freq] : ranked) {
    vocab.index[tok] = vocab.tokens.size();
    vocab.tokens.push_back(tok);
    vocab.doc_freq[tok] = freq;
  }
  return vocab;
}

Vector vectorize_text(const std::string& text, const Vocab& vocab, const VectorizerConfig& cfg) {
  Vector x(vocab.size(), 0.0);
  const auto tokens = tokenize(text, cfg);
  if (tokens.empty()) return x;
  for (const auto& tok : tokens) {
    if (auto it = vocab.index.find(tok); it != vocab.index.end()) x[it->second] += 1.0;
  }
  const double length = static_cast<double>(tokens.size());
  for (double& v : x) v /= length;
  if (cfg.weighting == Weighting::TF) return x;

  const double docs = static_cast<double>(vocab.doc_count);
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    const double df = static_cast<double>(vocab.doc_freq.at(vocab.tokens[i]));
    x[i] *= std::log((1.0 + docs) / (1.0 + df)) + 1.0;
    norm_sq += x[i] * x[i];
  }
  if (norm_sq > 0.0) {
    const double norm = std::sqrt(norm_sq);
    for (double& v : x) v /= norm;
  }
  return x;
}

Dataset vectorize(const RawCorpus& corpus, const Vocab& vocab, const VectorizerConfig& cfg) {
  Dataset ds;
  ds.class_names = corpus.classes;
  ds.num_classes = corpus.classes.size();
  ds.feature_width = vocab.size();
  ds.samples.reserve(corpus.docs.size());
  for (const RawDocument& doc : corpus.docs) {
    const auto it = std::lower_bound(corpus.classes.begin(), corpus.classes.end(), doc.label);
    if (it == corpus.classes.end() || *it != doc.label) throw ContractError("document label '" + doc.label + "' is not a corpus class");
    ds.samples.push_back(
        Sample{vectorize_text(doc.text, vocab, cfg), static_cast<std::size_t>(it - corpus.classes.begin())});
  }
  return ds;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ContractError("split ratio must lie strictly between 0 and 1");
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(ds.size()) * ratio));
  if (n_train == 0 || n_train == ds.size()) {
    throw ContractError("split of " + std::to_string(ds.size()) + " samples at ratio " + format_real(ratio) +
                        " leaves an empty side");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  Dataset train, test;
  for (Dataset* part : {&train, &test}) {
    part->num_classes = ds.num_classes;
    part->feature_width = ds.feature_width;
    part->class_names = ds.class_names;
  }
  for (std::size_t i = 0; i < order.size(); ++i) (i < n_train ? train : test).samples.push_back(ds.samples[order[i]]);
  return {std::move(train), std::move(test)};
}

std::string dataset_csv(const Dataset& ds) {
  std::string out = "label";
  for (std::size_t i = 0; i < ds.feature_width; ++i) out += ",f" + std::to_string(i);
  out += '\n';
  for (const Sample& s : ds.samples) {
    out += std::to_string(s.label);
    for (double v : s.features) out += "," + format_real(v);
    out += '\n';
  }
  return out;
}

}  // namespace tann::data

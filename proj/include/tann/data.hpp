#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tann/linalg.hpp"

namespace tann::data {

struct Sample {
  Vector features;
  std::size_t label = 0;

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  std::size_t num_classes = 0;
  std::size_t feature_width = 0;
  std::vector<std::string> class_names;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  /// Throws ContractError when the shared-width or label-range invariant fails.
  void validate() const;
};

enum class Gate { Xor, And, Or };

Gate gate_from_string(const std::string& name);
std::string to_string(Gate gate);

/// The four truth-table patterns, in the order [0,0], [0,1], [1,0], [1,1].
Dataset gate_dataset(Gate gate);

struct RawDocument {
  std::string label;
  std::string text;
};

/// Labelled documents plus the sorted class list and any non-fatal
/// problems met while loading.
struct RawCorpus {
  std::vector<RawDocument> docs;
  std::vector<std::string> classes;
  std::vector<std::string> warnings;
};

/// One `label<TAB>text` record per line. Malformed lines become warnings
/// carrying their 1-based line number.
RawCorpus load_labeled_lines(const std::filesystem::path& path);

/// One subdirectory per class, one document per regular file.
RawCorpus load_dir_per_class(const std::filesystem::path& root);

enum class Weighting { TF, TFIDF };

struct VectorizerConfig {
  std::size_t max_features = 2000;
  Weighting weighting = Weighting::TFIDF;
  bool lowercase = true;
};

/// Split on every non-alphanumeric run; optionally lowercase.
std::vector<std::string> tokenize(const std::string& text, const VectorizerConfig& cfg);

struct Vocab {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> tokens;  // tokens[index[t]] == t
  std::map<std::string, std::size_t> doc_freq;
  std::size_t doc_count = 0;
  std::size_t max_features = 0;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Vocab&) const = default;
};

/// Top max_features tokens by document frequency; ties go to the
/// lexicographically smaller token, which also gets the smaller index.
Vocab build_vocab(const RawCorpus& corpus, const VectorizerConfig& cfg);

/// Feature vector of one document (width = vocab size).
Vector vectorize_text(const std::string& text, const Vocab& vocab, const VectorizerConfig& cfg);

/// TF: count / token count. TFIDF: TF * (ln((1 + D) / (1 + df)) + 1), then
/// L2-normalized. Labels index corpus.classes.
Dataset vectorize(const RawCorpus& corpus, const Vocab& vocab, const VectorizerConfig& cfg);

/// Seeded shuffle, then the first floor(n * ratio) samples train.
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double ratio, std::uint64_t seed);

/// Debug dump with header `label,f0,f1,...`.
std::string dataset_csv(const Dataset& ds);

}  // namespace tann::data

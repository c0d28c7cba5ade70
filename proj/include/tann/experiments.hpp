#pragma once

// Experiment drivers behind the command-line tool. Each driver trains its
// runs (in parallel up to `jobs` workers), writes its artifacts into an
// output directory and returns what went wrong, if anything.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tann::cli {

using Seeds = std::vector<std::uint64_t>;

inline Seeds default_seeds() { return {1, 2, 3, 4, 5}; }

struct GateOptions {
  std::string gate = "xor";
  std::size_t depth = 3;
  std::size_t hidden = 20;
  std::size_t epochs = 10;
  double lr = 0.01;
  Seeds seeds = default_seeds();
  std::string step_mode = "route-local";
  std::string routing = "bits";
  std::optional<double> require_accuracy;  // every TANN run
  bool require_tann_better = false;        // median final loss, TANN < single
};

struct SweepOptions {
  std::string gate = "xor";
  std::vector<std::size_t> depths = {1, 2, 3, 4, 5};
  std::size_t hidden = 20;
  std::size_t epochs = 200;
  double lr = 0.01;
  Seeds seeds = default_seeds();
  std::string step_mode = "route-local";
  std::string routing = "bits";
  std::optional<double> require_accuracy;
};

struct CompareOptions {
  std::string gate = "xor";
  std::string arch = "all";
  std::size_t depth = 3;
  std::uint64_t seed = 1;
  std::optional<std::size_t> epochs;  // overrides the per-architecture setting
  std::optional<double> lr;
};

struct TextOptions {
  std::filesystem::path data;
  std::string format = "lines";  // lines | dirs
  std::string model = "ffn";     // ffn | rnn
  bool dropout = false;
  std::vector<std::size_t> depths = {1};
  std::size_t epochs = 10;
  double lr = 0.001;
  std::size_t batch = 16;
  std::uint64_t seed = 1;
  std::size_t max_features = 2000;
  double split = 0.8;
  std::optional<double> require_accuracy;  // every depth, held-out
};

struct CostOptions {
  std::size_t depth = 3;
  double neurons = 21;
  double layers = 2;
  double per_neuron_cost = 1;
};

/// A declared check that did not hold.
struct Failure {
  std::string check;
  std::string detail;
};

struct Outcome {
  std::vector<Failure> failures;
  std::vector<std::string> warnings;
  std::string report;  // human-readable summary for stdout
};

using ManifestSection = std::vector<std::pair<std::string, std::string>>;

/// Fully resolved settings as `key = value` lines, readable back as a
/// config file section for the same command.
ManifestSection manifest_entries(const GateOptions& o);
ManifestSection manifest_entries(const SweepOptions& o);
ManifestSection manifest_entries(const CompareOptions& o);
ManifestSection manifest_entries(const TextOptions& o);
ManifestSection manifest_entries(const CostOptions& o);

/// Writes `command = <command>`, the [<command>] section, then any extra
/// sections (recorded for inspection, ignored on replay).
void write_manifest(const std::filesystem::path& out_dir, const std::string& command, const ManifestSection& entries,
                    const std::vector<std::pair<std::string, ManifestSection>>& extra = {});

/// failures.json: {"command": ..., "failures": [{"check": ..., "detail": ...}]}
void write_failures(const std::filesystem::path& out_dir, const std::string& command, const Outcome& outcome);

Outcome run_gate(const GateOptions& o, const std::filesystem::path& out_dir, std::size_t jobs);
Outcome run_depth_sweep(SweepOptions o, const std::filesystem::path& out_dir, std::size_t jobs);
Outcome run_compare(const CompareOptions& o, const std::filesystem::path& out_dir, std::size_t jobs);
Outcome run_text(TextOptions o, const std::filesystem::path& out_dir, std::size_t jobs);
Outcome run_cost(const CostOptions& o, const std::filesystem::path& out_dir);

/// One polyline per trace file, labelled with the file stem.
void run_plot(const std::vector<std::filesystem::path>& traces, const std::filesystem::path& output,
              const std::string& title);

/// Reads the `command` key of a manifest.
std::string manifest_command(const std::filesystem::path& manifest);

}  // namespace tann::cli

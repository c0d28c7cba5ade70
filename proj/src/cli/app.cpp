#include "tann/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <string>
#include <vector>

#include "tann/errors.hpp"
#include "tann/experiments.hpp"

namespace tann::cli {

namespace fs = std::filesystem;

namespace {

const CLI::Validator kPositive(
    [](std::string& v) -> std::string {
      try {
        if (std::stod(v) > 0) return {};
      } catch (const std::exception&) {
      }
      return "must be positive, got " + v;
    },
    "POSITIVE");

const std::vector<std::string> kGates = {"xor", "and", "or"};
const std::vector<std::string> kStepModes = {"route-local", "global"};
const std::vector<std::string> kRoutings = {"bits", "threshold"};

// Options shared by the gate and depth-sweep commands.
template <class Opts>
void add_gate_training_options(CLI::App* cmd, Opts& o, std::uint64_t& seed) {
  cmd->add_option("gate", o.gate, "xor, and or or")->required()->check(CLI::IsMember(kGates));
  cmd->add_option("--hidden", o.hidden, "hidden units per node network")->check(kPositive);
  cmd->add_option("--epochs", o.epochs)->check(kPositive);
  cmd->add_option("--lr", o.lr, "Adam learning rate")->check(kPositive);
  auto* seeds = cmd->add_option("--seeds", o.seeds, "comma-separated seed list")->delimiter(',');
  cmd->add_option("--seed", seed, "run a single seed")->excludes(seeds);
  cmd->add_option("--step-mode", o.step_mode)->check(CLI::IsMember(kStepModes));
  cmd->add_option("--routing", o.routing)->check(CLI::IsMember(kRoutings));
}

int finish(const std::string& command, const Outcome& outcome, const fs::path& out_dir, std::ostream& out,
           std::ostream& err) {
  for (const std::string& w : outcome.warnings) err << "warning: " << w << "\n";
  write_failures(out_dir, command, outcome);
  out << outcome.report;
  if (outcome.failures.empty()) return kExitOk;
  for (const Failure& f : outcome.failures) err << "check failed [" << f.check << "]: " << f.detail << "\n";
  return kExitChecksFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trie-augmented neural network experiments", "tann"};
  app.set_config("--config", "", "key = value file; command-line flags override it");
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  app.require_subcommand(1);

  std::string out_dir = "tann-out";
  std::size_t jobs = 1;
  app.add_option("--out", out_dir, "output directory")->envname("TANN_OUT_DIR");
  app.add_option("--jobs", jobs, "parallel runs")->check(kPositive);

  GateOptions gate;
  std::uint64_t gate_seed = 0;
  double gate_accuracy = 0;
  auto* gate_cmd = app.add_subcommand("gate", "train a TANN and a single network on a logic gate");
  add_gate_training_options(gate_cmd, gate, gate_seed);
  gate_cmd->add_option("--depth", gate.depth)->check(kPositive);
  auto* gate_acc = gate_cmd->add_option("--require-accuracy", gate_accuracy, "fail unless every TANN run reaches it");
  gate_cmd->add_flag("--require-tann-better", gate.require_tann_better,
                     "fail unless the TANN median final loss is below the single network's");

  SweepOptions sweep;
  std::uint64_t sweep_seed = 0;
  double sweep_accuracy = 0;
  auto* sweep_cmd = app.add_subcommand("depth-sweep", "train TANNs of several depths on a logic gate");
  add_gate_training_options(sweep_cmd, sweep, sweep_seed);
  sweep_cmd->add_option("--depth", sweep.depths, "comma-separated depth list")->delimiter(',');
  auto* sweep_acc = sweep_cmd->add_option("--require-accuracy", sweep_accuracy, "fail unless every run reaches it");

  CompareOptions cmp;
  std::size_t cmp_epochs = 0;
  double cmp_lr = 0;
  auto* cmp_cmd = app.add_subcommand("compare", "standalone versus trie-embedded baseline networks");
  cmp_cmd->add_option("--arch", cmp.arch, "all, simple_dropout_nn, tiny_cnn, tiny_rnn or complex_nn")
      ->check(CLI::IsMember({"all", "simple_dropout_nn", "tiny_cnn", "tiny_rnn", "complex_nn"}));
  cmp_cmd->add_option("--gate", cmp.gate)->check(CLI::IsMember(kGates));
  cmp_cmd->add_option("--depth", cmp.depth)->check(kPositive);
  cmp_cmd->add_option("--seed", cmp.seed);
  auto* cmp_epochs_opt = cmp_cmd->add_option("--epochs", cmp_epochs, "override every architecture's epochs")
                             ->check(kPositive);
  auto* cmp_lr_opt =
      cmp_cmd->add_option("--lr", cmp_lr, "override every architecture's learning rate")->check(kPositive);

  TextOptions text;
  std::string text_path;
  double text_accuracy = 0;
  auto* text_cmd = app.add_subcommand("text", "text classification with a threshold-routed TANN");
  text_cmd->add_option("path", text_path, "corpus file (label<TAB>text lines) or directory")->required();
  text_cmd->add_option("--format", text.format, "lines or dirs")->check(CLI::IsMember({"lines", "dirs"}));
  text_cmd->add_option("--model", text.model, "ffn or rnn")->check(CLI::IsMember({"ffn", "rnn"}));
  text_cmd->add_flag("--dropout", text.dropout, "dropout 0.5 inside every node network");
  text_cmd->add_option("--depth", text.depths, "comma-separated depth list")->delimiter(',');
  text_cmd->add_option("--epochs", text.epochs)->check(kPositive);
  text_cmd->add_option("--lr", text.lr)->check(kPositive);
  text_cmd->add_option("--batch", text.batch)->check(kPositive);
  text_cmd->add_option("--seed", text.seed);
  text_cmd->add_option("--max-features", text.max_features)->check(kPositive);
  text_cmd->add_option("--split", text.split, "training fraction")->check(CLI::Range(0.0, 1.0));
  auto* text_acc = text_cmd->add_option("--require-accuracy", text_accuracy, "fail unless every depth reaches it");

  CostOptions cost;
  auto* cost_cmd = app.add_subcommand("cost", "inference cost of a balanced trie");
  cost_cmd->add_option("--depth", cost.depth)->check(kPositive);
  cost_cmd->add_option("--neurons", cost.neurons, "N")->check(kPositive);
  cost_cmd->add_option("--layers", cost.layers, "L")->check(kPositive);
  cost_cmd->add_option("--per-neuron-cost", cost.per_neuron_cost, "C")->check(kPositive);

  std::vector<std::string> plot_traces;
  std::string plot_output;
  std::string plot_title = "training loss";
  auto* plot_cmd = app.add_subcommand("plot", "draw trace CSVs as an SVG line plot");
  plot_cmd->add_option("traces", plot_traces, "trace CSV files")->required();
  plot_cmd->add_option("-o,--output", plot_output, "SVG file (default <out>/loss.svg)");
  plot_cmd->add_option("--title", plot_title);

  std::string replay_manifest;
  auto* replay_cmd = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", replay_manifest)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const fs::path dir = out_dir;
  try {
    if (*gate_cmd) {
      if (gate_cmd->get_option("--seed")->count()) gate.seeds = {gate_seed};
      if (gate_acc->count()) gate.require_accuracy = gate_accuracy;
      return finish("gate", run_gate(gate, dir, jobs), dir, out, err);
    }
    if (*sweep_cmd) {
      if (sweep_cmd->get_option("--seed")->count()) sweep.seeds = {sweep_seed};
      if (sweep_acc->count()) sweep.require_accuracy = sweep_accuracy;
      return finish("depth-sweep", run_depth_sweep(sweep, dir, jobs), dir, out, err);
    }
    if (*cmp_cmd) {
      if (cmp_epochs_opt->count()) cmp.epochs = cmp_epochs;
      if (cmp_lr_opt->count()) cmp.lr = cmp_lr;
      return finish("compare", run_compare(cmp, dir, jobs), dir, out, err);
    }
    if (*text_cmd) {
      text.data = text_path;
      if (text_acc->count()) text.require_accuracy = text_accuracy;
      return finish("text", run_text(text, dir, jobs), dir, out, err);
    }
    if (*cost_cmd) return finish("cost", run_cost(cost, dir), dir, out, err);
    if (*plot_cmd) {
      std::vector<fs::path> traces(plot_traces.begin(), plot_traces.end());
      const fs::path target = plot_output.empty() ? dir / "loss.svg" : fs::path(plot_output);
      run_plot(traces, target, plot_title);
      out << "wrote " << target.string() << "\n";
      return kExitOk;
    }
    if (*replay_cmd) {
      const std::string command = manifest_command(replay_manifest);
      if (command == "replay" || command == "plot") throw FormatError("manifest names a non-replayable command");
      const std::string jobs_text = std::to_string(jobs);
      const std::vector<const char*> args = {argv[0], "--config", replay_manifest.c_str(), "--out",
                                             out_dir.c_str(), "--jobs", jobs_text.c_str(), command.c_str()};
      return run(static_cast<int>(args.size()), args.data(), out, err);
    }
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace tann::cli

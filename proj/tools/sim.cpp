// sim: scenario runner for the SET spin-readout simulator.
//
//   sim table|fig2|readout|sweep|mechanics --config <path> [--seed N] [--out DIR]
//       [--true-state S] [--encoding inner|outer] [--alphas a,b] [--leaks a,b]
//       [--trials N] [--events]
//
// Exit codes: 0 success, 1 validation, 2 io, 3 numeric failure.

#include "setreadout/commands.hpp"
#include "setreadout/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kIo = 2, kNumeric = 3 };

constexpr const char* kOutputDirEnv = "SETREADOUT_OUTPUT_DIR";

}  // namespace

int main(int argc, char** argv) {
  using namespace setreadout;

  CLI::App app{"SET-based single-spin readout simulator"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string true_state = "+3/2";
  std::string encoding = "outer";
  std::string alphas = "0.1,0.2";
  std::string leaks = "0";
  int trials = 20;
  bool events = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--seed", seed, "override the configured RNG seed");
    sub->add_option("--out", out_dir, "output directory (overrides config and $" +
                                          std::string(kOutputDirEnv) + ")");
  };

  auto* table = app.add_subcommand("table", "energy levels and ESR transition table");
  auto* fig2 = app.add_subcommand("fig2", "post-flip decoherence time series");
  auto* readout = app.add_subcommand("readout", "one readout window and classification");
  auto* sweep = app.add_subcommand("sweep", "misclassification rate over an alpha/leak grid");
  auto* mechanics = app.add_subcommand("mechanics", "spin-vibration and gradient estimates");
  for (auto* sub : {table, fig2, readout, sweep, mechanics}) common(sub);

  fig2->add_option("--alphas", alphas, "comma-separated dwell deviations");
  readout->add_option("--true-state", true_state, "inside-spin m1, e.g. +3/2 or -1/2");
  readout->add_option("--encoding", encoding, "inner|outer")
      ->check(CLI::IsMember({"inner", "outer"}));
  readout->add_flag("--events", events, "write the per-electron event log");
  sweep->add_option("--alphas", alphas, "comma-separated dwell deviations");
  sweep->add_option("--leaks", leaks, "comma-separated filter leak probabilities");
  sweep->add_option("--trials", trials, "windows per cell and state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    SimulationConfig config = parse_config(config_path);
    if (seed) config.seed = *seed;

    std::filesystem::path dir = config.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) dir = env;
    if (!out_dir.empty()) dir = out_dir;
    const RunContext ctx{dir, std::cout};

    if (table->parsed()) {
      cmd_table(config, ctx);
    } else if (fig2->parsed()) {
      cmd_fig2(config, parse_number_list(alphas, "alphas"), ctx);
    } else if (readout->parsed()) {
      const InsideSpinState truth(parse_m(true_state), parse_encoding(encoding));
      cmd_readout(config, truth, events, ctx);
    } else if (sweep->parsed()) {
      SweepSpec spec;
      spec.alphas = parse_number_list(alphas, "alphas");
      spec.leaks = parse_number_list(leaks, "leaks");
      spec.trials = trials;
      cmd_sweep(config, spec, ctx);
    } else if (mechanics->parsed()) {
      cmd_mechanics(config, ctx);
    }
    std::cout << "wrote " << (dir / "manifest.json").string() << '\n';
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}

#pragma once

// Scenario commands behind the `sim` executable. Each command writes its
// data files plus exactly one manifest.json into the output directory.

#include "setreadout/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace setreadout {

struct OutputFile {
  std::string name;
  std::string sha256;
  std::size_t bytes;
};

struct RunManifest {
  std::string command;
  std::string version;
  std::string config_echo;
  double wall_seconds = 0.0;
  std::vector<OutputFile> outputs;
  std::vector<std::pair<std::string, std::string>> notes;

  std::string to_json() const;
};

struct RunContext {
  std::filesystem::path out_dir;
  std::ostream& report;
};

struct SweepSpec {
  std::vector<double> alphas;
  std::vector<double> leaks;
  int trials = 20;
};

/// Time grid used by `fig2`: 0..1000 ns sampled every 1 ns, RK4 step 0.01 ns.
struct Fig2Grid {
  double t_end = 1000.0;
  double sample_step = 1.0;
  double integrator_step = 0.01;
};

const char* library_version();

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Parses "+3/2", "3/2", "-1/2", "1.5", ... into a magnetic quantum number.
double parse_m(const std::string& text);

/// Splits "0.1,0.2" into numbers; throws ValidationError naming `field`.
std::vector<double> parse_number_list(const std::string& text, const std::string& field);

RunManifest cmd_table(const SimulationConfig& config, const RunContext& ctx);
RunManifest cmd_fig2(const SimulationConfig& config, const std::vector<double>& alphas,
                     const RunContext& ctx, const Fig2Grid& grid = {});
RunManifest cmd_readout(const SimulationConfig& config, const InsideSpinState& truth, bool events,
                        const RunContext& ctx);
RunManifest cmd_sweep(const SimulationConfig& config, const SweepSpec& spec,
                      const RunContext& ctx);
RunManifest cmd_mechanics(const SimulationConfig& config, const RunContext& ctx);

}  // namespace setreadout

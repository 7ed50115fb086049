#pragma once

#include "setreadout/dynamics.hpp"
#include "setreadout/set_protocol.hpp"
#include "setreadout/spin_core.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace setreadout {

/// Everything a scenario command needs. Defaults reproduce the reference
/// setting: nu1 = 10 GHz, delta = 63.5 MHz, J = 50 MHz, t0 = 150 ns,
/// 1/gammap = 25 ns, 1/gamma0 = 2500 ns, a calibrated 140 ns pulse.
struct SimulationConfig {
  SystemParams system{10000.0, 10063.5, 50.0};
  AnisotropyParams anisotropy;
  DecoherenceRates rates;
  PulseSpec pulse;
  /// Carrier override; when empty the interrogation line of the encoding is used.
  std::optional<double> pulse_frequency;
  TunnelingParams tunneling;
  MechanicsParams mechanics;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  /// Canonical JSON echo of the resolved configuration.
  std::string echo() const;
};

/// Parses a JSON document. Unknown keys and out-of-range values raise
/// ValidationError naming the dotted key; an empty document means defaults.
SimulationConfig parse_config_text(std::string_view text);

/// Throws IoError when the file cannot be read.
SimulationConfig parse_config(const std::filesystem::path& path);

/// Non-fatal diagnostics (weak-coupling violations).
std::vector<std::string> config_warnings(const SimulationConfig& config);

}  // namespace setreadout

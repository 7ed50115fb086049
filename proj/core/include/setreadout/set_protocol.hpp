#pragma once

// Seeded Monte Carlo of the SET readout cycle.
//
// One electron enters the island per cycle_period and leaves before the next
// one arrives (Coulomb blockade). While it dwells, a single ESR pulse tuned
// to the interrogation line rotates its spin; the drain filter then passes
// spin-down electrons. A blocked current means the inside spin sat on the
// interrogated (positive-m1) level.

#include "setreadout/dynamics.hpp"
#include "setreadout/spin_core.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace setreadout {

using Rng = std::mt19937_64;

enum class Encoding { Outer, Inner };
enum class Spin { Up, Down };

const char* to_string(Encoding encoding);
const char* to_string(Spin spin);
Encoding parse_encoding(const std::string& text);

/// Inside-spin level being read. Outer qubits live on ±3/2, inner on ±1/2.
class InsideSpinState {
 public:
  InsideSpinState(double m1, Encoding encoding);

  static InsideSpinState positive(Encoding encoding);
  static InsideSpinState negative(Encoding encoding);

  double m1() const noexcept { return m1_; }
  Encoding encoding() const noexcept { return encoding_; }
  bool is_positive() const noexcept { return m1_ > 0; }

  friend bool operator==(const InsideSpinState&, const InsideSpinState&) = default;

 private:
  double m1_;
  Encoding encoding_;
};

struct TunnelingParams {
  double t0 = 150.0;            // mean dwell, ns
  double alpha = 0.0;           // sigma / t0
  double p_leak_source = 0.0;
  double p_leak_drain = 0.0;
  double cycle_period = 150.0;  // ns
  double window = 1e7;          // ns

  void validate() const;
  long long cycles() const;
};

struct TunnelEvent {
  long long index;
  double arrival;      // ns since window start
  double dwell;        // ns
  Spin spin_in;
  double flip_prob;    // probability the pulse changed spin_in
  double pass_prob;    // drain transmission probability
  bool passed_drain;
};

struct CurrentTrace {
  long long n_cycles = 0;
  long long n_passed = 0;
  std::vector<TunnelEvent> events;  // filled only when event logging is on
  std::uint64_t seed = 0;
};

struct ReadoutResult {
  InsideSpinState classified;
  long long n_cycles;
  long long counts_on;
  double baseline;
  double contrast;
  double threshold;
};

/// Detunings seen by the two kinds of electron for a given true inside state.
/// Spin-down electrons are driven on the outside-flip line of the true m1;
/// leaked spin-up electrons on the nearest inside-flip line with outside m2 = +1/2.
struct CycleDetunings {
  double down;  // MHz
  double up;    // MHz
};

CycleDetunings cycle_detunings(const InsideSpinState& inside, double pulse_frequency,
                               const TransitionTable& table);

/// Normal(t0, (alpha t0)^2) resampled until it lands in (0, cycle_period].
double sample_dwell(const TunnelingParams& params, Rng& rng);

Spin source_emit(const TunnelingParams& params, Rng& rng);

/// Interrogation line for the encoding: the outside-flip line at m1 = +3/2
/// (outer) or +1/2 (inner), independent of the true state.
double resonance_frequency(Encoding encoding, const TransitionTable& table);
double resonance_frequency(const InsideSpinState& inside, const TransitionTable& table);

TunnelEvent electron_cycle(const CycleDetunings& detunings, const PulseSpec& pulse,
                           const TunnelingParams& params, const DecoherenceRates& rates,
                           Rng& rng, long long index = 0);

TunnelEvent electron_cycle(const InsideSpinState& inside, const PulseSpec& pulse,
                           const SystemParams& sys, const TunnelingParams& params,
                           const DecoherenceRates& rates, Rng& rng);

CurrentTrace run_window(const InsideSpinState& inside, const PulseSpec& pulse,
                        const SystemParams& sys, const TunnelingParams& params,
                        const DecoherenceRates& rates, std::uint64_t seed,
                        bool record_events = false, const AnisotropyParams& aniso = {});

/// True when every recorded electron leaves before the next one arrives.
bool blockade_respected(const CurrentTrace& trace);

ReadoutResult classify(const CurrentTrace& trace, const TunnelingParams& params,
                       Encoding encoding);

struct SweepCell {
  Encoding encoding;
  double true_m1;
  double alpha;
  double p_leak;
  int trials;
  int misclassified;
  double rate;
  std::uint64_t seed;
};

/// Misclassification rate for every (alpha, p_leak) cell and both states of
/// `encoding`. Leakage is applied to source and drain alike. Trial k of a
/// given state uses the same derived seed in every cell.
std::vector<SweepCell> fidelity_sweep(Encoding encoding, const SystemParams& sys,
                                      const DecoherenceRates& rates,
                                      const std::vector<double>& alphas,
                                      const std::vector<double>& leaks, int trials,
                                      std::uint64_t seed, const PulseSpec& pulse,
                                      const TunnelingParams& base,
                                      const AnisotropyParams& aniso = {});

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t state_index, std::uint64_t trial);

}  // namespace setreadout

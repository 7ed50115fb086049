#include "setreadout/set_protocol.hpp"

#include "setreadout/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace setreadout {

namespace {

bool is_probability_below_one(double p) { return p >= 0.0 && p < 1.0; }

}  // namespace

const char* to_string(Encoding encoding) {
  return encoding == Encoding::Outer ? "outer" : "inner";
}

const char* to_string(Spin spin) { return spin == Spin::Up ? "up" : "down"; }

Encoding parse_encoding(const std::string& text) {
  if (text == "outer") return Encoding::Outer;
  if (text == "inner") return Encoding::Inner;
  throw ValidationError("encoding", "expected 'inner' or 'outer', got '" + text + "'");
}

InsideSpinState::InsideSpinState(double m1, Encoding encoding) : m1_(m1), encoding_(encoding) {
  const double magnitude = encoding == Encoding::Outer ? 1.5 : 0.5;
  if (std::abs(m1) != magnitude) {
    throw ValidationError("true_state", "m1 = " + format_m(m1) + " is not a level of the " +
                                            to_string(encoding) + " encoding");
  }
}

InsideSpinState InsideSpinState::positive(Encoding encoding) {
  return {encoding == Encoding::Outer ? 1.5 : 0.5, encoding};
}

InsideSpinState InsideSpinState::negative(Encoding encoding) {
  return {encoding == Encoding::Outer ? -1.5 : -0.5, encoding};
}

void TunnelingParams::validate() const {
  if (!(t0 > 0)) throw ValidationError("t0", "must be > 0");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ValidationError("alpha", "must satisfy 0 <= alpha < 1");
  if (!is_probability_below_one(p_leak_source)) {
    throw ValidationError("p_leak_source", "must lie in [0, 1)");
  }
  if (!is_probability_below_one(p_leak_drain)) {
    throw ValidationError("p_leak_drain", "must lie in [0, 1)");
  }
  if (!(cycle_period > 0)) throw ValidationError("cycle_period", "must be > 0");
  if (!(window >= cycle_period)) throw ValidationError("window", "must be >= cycle_period");
}

long long TunnelingParams::cycles() const {
  return static_cast<long long>(std::floor(window / cycle_period + 1e-9));
}

CycleDetunings cycle_detunings(const InsideSpinState& inside, double pulse_frequency,
                               const TransitionTable& table) {
  const double down = pulse_frequency - table.outside_flip(inside.m1()).frequency;
  double up = std::numeric_limits<double>::infinity();
  for (const auto& row : table.rows) {
    if (row.kind != TransitionKind::InsideFlip || row.m2_a != 0.5) continue;
    const double d = pulse_frequency - row.frequency;
    if (std::abs(d) < std::abs(up)) up = d;
  }
  if (!std::isfinite(up)) throw ValidationError("table", "no inside-flip line with outside m2 = +1/2");
  return {down, up};
}

double sample_dwell(const TunnelingParams& params, Rng& rng) {
  if (params.alpha == 0.0) return params.t0;
  std::normal_distribution<double> dist(params.t0, params.alpha * params.t0);
  for (;;) {
    const double tau = dist(rng);
    if (tau > 0.0 && tau <= params.cycle_period) return tau;
  }
}

Spin source_emit(const TunnelingParams& params, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < params.p_leak_source ? Spin::Up : Spin::Down;
}

double resonance_frequency(Encoding encoding, const TransitionTable& table) {
  return table.outside_flip(InsideSpinState::positive(encoding).m1()).frequency;
}

double resonance_frequency(const InsideSpinState& inside, const TransitionTable& table) {
  return resonance_frequency(inside.encoding(), table);
}

TunnelEvent electron_cycle(const CycleDetunings& detunings, const PulseSpec& pulse,
                           const TunnelingParams& params, const DecoherenceRates& rates,
                           Rng& rng, long long index) {
  const Spin spin = source_emit(params, rng);
  const double dwell = sample_dwell(params, rng);

  const bool down = spin == Spin::Down;
  const DensityMatrix arrival = down ? DensityMatrix::spin_down() : DensityMatrix::spin_up();

  // Rotation angle scales with dwell: pi * dwell / t0 for a calibrated pulse.
  const double effective = pulse.duration * dwell / params.t0;
  const DensityMatrix pulsed =
      rabi_pulse(arrival, pulse, down ? detunings.down : detunings.up, effective);
  const double flip_prob = down ? pulsed.up_up() : pulsed.down_down();

  const double residual = std::max(dwell - pulse.duration, 0.0);
  const DensityMatrix departing = analytic_free_evolution(pulsed, rates, residual);

  const double pass_prob = std::clamp(
      departing.down_down() + params.p_leak_drain * departing.up_up(), 0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool passed = u(rng) < pass_prob;

  return {index, static_cast<double>(index) * params.cycle_period, dwell, spin,
          flip_prob, pass_prob, passed};
}

TunnelEvent electron_cycle(const InsideSpinState& inside, const PulseSpec& pulse,
                           const SystemParams& sys, const TunnelingParams& params,
                           const DecoherenceRates& rates, Rng& rng) {
  const auto detunings = cycle_detunings(inside, pulse.frequency, transition_table(sys));
  return electron_cycle(detunings, pulse, params, rates, rng);
}

CurrentTrace run_window(const InsideSpinState& inside, const PulseSpec& pulse,
                        const SystemParams& sys, const TunnelingParams& params,
                        const DecoherenceRates& rates, std::uint64_t seed, bool record_events,
                        const AnisotropyParams& aniso) {
  params.validate();
  pulse.validate();
  rates.validate();
  if (pulse.duration > params.cycle_period) {
    throw ValidationError("pulse.duration", "must not exceed tunneling.cycle_period");
  }

  const auto detunings = cycle_detunings(inside, pulse.frequency, transition_table(sys, aniso));
  Rng rng(seed);

  CurrentTrace trace;
  trace.seed = seed;
  trace.n_cycles = params.cycles();
  if (record_events) trace.events.reserve(static_cast<std::size_t>(trace.n_cycles));

  for (long long k = 0; k < trace.n_cycles; ++k) {
    const TunnelEvent ev = electron_cycle(detunings, pulse, params, rates, rng, k);
    if (ev.passed_drain) ++trace.n_passed;
    if (record_events) trace.events.push_back(ev);
  }
  return trace;
}

bool blockade_respected(const CurrentTrace& trace) {
  for (std::size_t i = 0; i + 1 < trace.events.size(); ++i) {
    const auto& cur = trace.events[i];
    if (!(cur.dwell > 0.0)) return false;
    if (cur.arrival + cur.dwell > trace.events[i + 1].arrival) return false;
  }
  return true;
}

ReadoutResult classify(const CurrentTrace& trace, const TunnelingParams& params,
                       Encoding encoding) {
  if (trace.n_cycles <= 0) throw ValidationError("n_cycles", "trace holds no cycles");
  const double baseline = static_cast<double>(trace.n_cycles) * (1.0 - params.p_leak_source);
  const double threshold = 0.5 * baseline;
  const auto counts = static_cast<double>(trace.n_passed);
  const InsideSpinState state = counts < threshold ? InsideSpinState::positive(encoding)
                                                   : InsideSpinState::negative(encoding);
  const double denom = baseline + counts;
  const double contrast = denom > 0.0 ? (baseline - counts) / denom : 0.0;
  return {state, trace.n_cycles, trace.n_passed, baseline, contrast, threshold};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t state_index, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(state_index), static_cast<std::uint32_t>(trial)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::vector<SweepCell> fidelity_sweep(Encoding encoding, const SystemParams& sys,
                                      const DecoherenceRates& rates,
                                      const std::vector<double>& alphas,
                                      const std::vector<double>& leaks, int trials,
                                      std::uint64_t seed, const PulseSpec& pulse,
                                      const TunnelingParams& base,
                                      const AnisotropyParams& aniso) {
  if (alphas.empty()) throw ValidationError("alphas", "grid is empty");
  if (leaks.empty()) throw ValidationError("leaks", "grid is empty");
  if (trials < 1) throw ValidationError("trials", "must be >= 1");
  pulse.validate();
  rates.validate();
  if (pulse.duration > base.cycle_period) {
    throw ValidationError("pulse.duration", "must not exceed tunneling.cycle_period");
  }

  PulseSpec interrogation = pulse;
  interrogation.frequency = resonance_frequency(encoding, transition_table(sys, aniso));

  const InsideSpinState states[2] = {InsideSpinState::positive(encoding),
                                     InsideSpinState::negative(encoding)};
  const std::uint64_t state_offset = encoding == Encoding::Outer ? 0 : 2;

  std::vector<SweepCell> cells;
  for (double alpha : alphas) {
    for (double leak : leaks) {
      TunnelingParams params = base;
      params.alpha = alpha;
      params.p_leak_source = leak;
      params.p_leak_drain = leak;
      params.validate();

      for (int s = 0; s < 2; ++s) {
        const InsideSpinState& truth = states[s];
        std::vector<char> wrong(static_cast<std::size_t>(trials), 0);

        // Trials are independent; each owns its RNG, so results do not
        // depend on scheduling.
        const unsigned workers =
            std::max(1u, std::min(std::thread::hardware_concurrency(), static_cast<unsigned>(trials)));
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            for (int t = static_cast<int>(w); t < trials; t += static_cast<int>(workers)) {
              const auto trial_seed =
                  derive_seed(seed, state_offset + static_cast<std::uint64_t>(s),
                              static_cast<std::uint64_t>(t));
              const auto trace =
                  run_window(truth, interrogation, sys, params, rates, trial_seed, false, aniso);
              wrong[static_cast<std::size_t>(t)] =
                  classify(trace, params, encoding).classified == truth ? 0 : 1;
            }
          });
        }
        for (auto& th : pool) th.join();

        const int misclassified =
            static_cast<int>(std::count(wrong.begin(), wrong.end(), char{1}));
        cells.push_back({encoding, truth.m1(), alpha, leak, trials, misclassified,
                         static_cast<double>(misclassified) / trials, seed});
      }
    }
  }
  return cells;
}

}  // namespace setreadout

#include "setreadout/commands.hpp"

#include "setreadout/csv.hpp"
#include "setreadout/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifndef SETREADOUT_VERSION
#define SETREADOUT_VERSION "dev"
#endif

namespace setreadout {

namespace {

using nlohmann::json;

// Displacement quoted alongside the formula value in the mechanics report.
constexpr double kQuotedVibrationShift = 2.1e-19;  // m
constexpr double kSeparationBound = 127.0;         // MHz

// Collects outputs of one command and writes the manifest last.
class OutputSession {
 public:
  OutputSession(std::string command, const SimulationConfig& config, const RunContext& ctx)
      : ctx_(ctx), start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.version = library_version();
    manifest_.config_echo = config.echo();
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + ctx.out_dir.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& text) {
    write_text_file(ctx_.out_dir / name, text);
    manifest_.outputs.push_back({name, sha256_hex(text), text.size()});
  }

  void note(std::string key, std::string value) {
    manifest_.notes.emplace_back(std::move(key), std::move(value));
  }

  RunManifest finish() {
    manifest_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_text_file(ctx_.out_dir / "manifest.json", manifest_.to_json());
    return manifest_;
  }

 private:
  const RunContext& ctx_;
  std::chrono::steady_clock::time_point start_;
  RunManifest manifest_;
};

const char* kind_name(TransitionKind kind) {
  return kind == TransitionKind::OutsideFlip ? "outside-flip" : "inside-flip";
}

void print_warnings(const SimulationConfig& config, std::ostream& os) {
  for (const auto& w : config_warnings(config)) os << "warning: " << w << '\n';
}

std::string alpha_tag(double alpha) { return format_number(alpha); }

json readout_json(const ReadoutResult& r, const InsideSpinState& truth, double frequency,
                  std::uint64_t seed) {
  return {{"encoding", to_string(truth.encoding())},
          {"true_m1", format_m(truth.m1())},
          {"classified_m1", format_m(r.classified.m1())},
          {"correct", r.classified == truth},
          {"n_cycles", r.n_cycles},
          {"counts_on", r.counts_on},
          {"baseline", r.baseline},
          {"threshold", r.threshold},
          {"contrast", r.contrast},
          {"interrogation_mhz", frequency},
          {"seed", seed}};
}

}  // namespace

const char* library_version() { return SETREADOUT_VERSION; }

std::string RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["version"] = version;
  j["config"] = json::parse(config_echo);
  j["wall_seconds"] = wall_seconds;
  j["outputs"] = json::array();
  for (const auto& f : outputs) {
    j["outputs"].push_back({{"file", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  j["notes"] = json::object();
  for (const auto& [k, v] : notes) j["notes"][k] = v;
  return j.dump(2) + "\n";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

double parse_m(const std::string& text) {
  std::string s = text;
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  try {
    std::size_t used = 0;
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } else {
      const double num = std::stod(s.substr(0, slash), &used);
      const std::string den_text = s.substr(slash + 1);
      std::size_t used_den = 0;
      const double den = std::stod(den_text, &used_den);
      if (used == slash && used_den == den_text.size() && den != 0.0) return num / den;
    }
  } catch (const std::exception&) {
  }
  throw ValidationError("true_state", "cannot parse '" + text + "' as a magnetic quantum number");
}

std::vector<double> parse_number_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(field, "cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw ValidationError(field, "grid is empty");
  return out;
}

RunManifest cmd_table(const SimulationConfig& config, const RunContext& ctx) {
  OutputSession session("table", config, ctx);
  print_warnings(config, ctx.report);

  const auto table = transition_table(config.system, config.anisotropy);
  CsvDocument transitions({"row", "kind", "inside_a", "outside_a", "inside_b", "outside_b",
                           "formula", "frequency_mhz"});
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    transitions.add_row({std::to_string(i + 1), kind_name(r.kind), format_m(r.m1_a),
                         format_m(r.m2_a), format_m(r.m1_b), format_m(r.m2_b), r.formula,
                         format_number(r.frequency)});
    ctx.report << std::setw(2) << i + 1 << "  " << std::left << std::setw(13) << kind_name(r.kind)
               << std::setw(24) << r.formula << std::right << format_number(r.frequency)
               << " MHz\n";
  }
  session.write("transitions.csv", transitions.text());

  CsvDocument levels({"m1", "m2", "energy_mhz"});
  for (const auto& lv : eigenenergies(config.system, config.anisotropy)) {
    levels.add_row({format_m(lv.m1), format_m(lv.m2), format_number(lv.energy)});
  }
  session.write("levels.csv", levels.text());

  const auto diag = check_weak_coupling(config.system);
  ctx.report << "weak coupling |J|/|nu2-nu1| = " << format_number(diag.ratio)
             << (diag.ok ? " (ok)" : " (VIOLATED)") << '\n';
  session.note("weak_coupling_ratio", format_number(diag.ratio));
  session.note("weak_coupling_ok", diag.ok ? "true" : "false");
  return session.finish();
}

RunManifest cmd_fig2(const SimulationConfig& config, const std::vector<double>& alphas,
                     const RunContext& ctx, const Fig2Grid& grid) {
  if (alphas.empty()) throw ValidationError("alphas", "grid is empty");
  OutputSession session("fig2", config, ctx);
  const auto& rates = config.rates;

  double worst = 0.0;
  for (double alpha : alphas) {
    const TimeSeries series = fig2_timeseries(alpha, rates, grid.t_end, grid.sample_step);
    CsvDocument plain({"t_ns", "P1", "P2", "P3"});
    CsvDocument compare({"t_ns", "P1", "P2", "P3", "P1_numeric", "P2_numeric", "P3_numeric",
                         "max_abs_dev"});

    const DensityMatrix rho0 = imperfect_flip_state(alpha, Branch::Long);
    DensityMatrix numeric = rho0;
    double previous_t = 0.0;
    double alpha_worst = 0.0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
      const double t = series.times[i];
      numeric = evolve_numeric(numeric, rates, std::nullopt, t - previous_t, grid.integrator_step);
      previous_t = t;
      const DensityMatrix exact = analytic_free_evolution(rho0, rates, t);
      const double dev = (numeric.matrix() - exact.matrix()).cwiseAbs().maxCoeff();
      alpha_worst = std::max(alpha_worst, dev);

      const std::string ts = format_number(t);
      plain.add_row({ts, format_number(series.P1[i]), format_number(series.P2[i]),
                     format_number(series.P3[i])});
      compare.add_row({ts, format_number(series.P1[i]), format_number(series.P2[i]),
                       format_number(series.P3[i]), format_number(numeric.up_up()),
                       format_number(std::abs(numeric.up_down())),
                       format_number(numeric.down_down()), format_number(dev)});
    }
    worst = std::max(worst, alpha_worst);

    const std::string tag = alpha_tag(alpha);
    session.write("fig2_alpha_" + tag + ".csv", plain.text());
    session.write("fig2_alpha_" + tag + "_compare.csv", compare.text());
    session.note("max_abs_dev_alpha_" + tag, format_number(alpha_worst));
    ctx.report << "alpha=" << tag << "  P1(0)=" << format_number(series.P1.front())
               << "  P2(0)=" << format_number(series.P2.front())
               << "  P1(end)=" << format_number(series.P1.back())
               << "  P3(end)=" << format_number(series.P3.back())
               << "  max|numeric-analytic|=" << format_number(alpha_worst) << '\n';
  }
  session.note("max_abs_dev", format_number(worst));
  return session.finish();
}

RunManifest cmd_readout(const SimulationConfig& config, const InsideSpinState& truth, bool events,
                        const RunContext& ctx) {
  OutputSession session("readout", config, ctx);
  print_warnings(config, ctx.report);

  const auto table = transition_table(config.system, config.anisotropy);
  PulseSpec pulse = config.pulse;
  pulse.frequency = config.pulse_frequency ? *config.pulse_frequency
                                           : resonance_frequency(truth.encoding(), table);

  const auto trace = run_window(truth, pulse, config.system, config.tunneling, config.rates,
                                config.seed, events, config.anisotropy);
  const auto result = classify(trace, config.tunneling, truth.encoding());

  const json summary = readout_json(result, truth, pulse.frequency, config.seed);
  CsvDocument csv({"encoding", "true_m1", "classified_m1", "n_cycles", "counts_on", "baseline",
                   "threshold", "contrast", "interrogation_mhz", "seed"});
  csv.add_row({to_string(truth.encoding()), format_m(truth.m1()), format_m(result.classified.m1()),
               std::to_string(result.n_cycles), std::to_string(result.counts_on),
               format_number(result.baseline), format_number(result.threshold),
               format_number(result.contrast), format_number(pulse.frequency),
               std::to_string(config.seed)});
  session.write("readout.csv", csv.text());
  session.write("readout.jsonl", summary.dump() + "\n");

  if (events) {
    CsvDocument ev({"cycle", "dwell_ns", "spin_in", "flip_prob", "passed"});
    for (const auto& e : trace.events) {
      ev.add_row({std::to_string(e.index), format_number(e.dwell), to_string(e.spin_in),
                  format_number(e.flip_prob), e.passed_drain ? "1" : "0"});
    }
    session.write("events.csv", ev.text());
    session.note("blockade_respected", blockade_respected(trace) ? "true" : "false");
  }

  session.note("interrogation_mhz", format_number(pulse.frequency));
  session.note("omega0_mhz", format_number(pulse.omega0));
  session.note("classified_m1", format_m(result.classified.m1()));

  ctx.report << "encoding " << to_string(truth.encoding()) << ", interrogation "
             << format_number(pulse.frequency) << " MHz, " << result.n_cycles << " electrons\n"
             << "counts " << result.counts_on << " / baseline " << format_number(result.baseline)
             << ", contrast " << format_number(result.contrast) << '\n'
             << "classified m1 = " << format_m(result.classified.m1()) << '\n';
  return session.finish();
}

RunManifest cmd_sweep(const SimulationConfig& config, const SweepSpec& spec, const RunContext& ctx) {
  if (spec.alphas.empty()) throw ValidationError("alphas", "grid is empty");
  if (spec.leaks.empty()) throw ValidationError("leaks", "grid is empty");
  if (spec.trials < 1) throw ValidationError("trials", "must be >= 1");
  OutputSession session("sweep", config, ctx);
  print_warnings(config, ctx.report);

  std::vector<SweepCell> cells;
  for (Encoding enc : {Encoding::Outer, Encoding::Inner}) {
    auto part = fidelity_sweep(enc, config.system, config.rates, spec.alphas, spec.leaks,
                               spec.trials, config.seed, config.pulse, config.tunneling,
                               config.anisotropy);
    cells.insert(cells.end(), part.begin(), part.end());
  }

  CsvDocument csv({"encoding", "true_m1", "alpha", "p_leak", "trials", "misclassified", "rate",
                   "seed"});
  std::string jsonl;
  for (const auto& c : cells) {
    csv.add_row({to_string(c.encoding), format_m(c.true_m1), format_number(c.alpha),
                 format_number(c.p_leak), std::to_string(c.trials), std::to_string(c.misclassified),
                 format_number(c.rate), std::to_string(c.seed)});
    jsonl += json{{"encoding", to_string(c.encoding)},
                  {"true_m1", format_m(c.true_m1)},
                  {"alpha", c.alpha},
                  {"p_leak", c.p_leak},
                  {"trials", c.trials},
                  {"misclassified", c.misclassified},
                  {"rate", c.rate},
                  {"seed", c.seed}}
                 .dump();
    jsonl += '\n';
    ctx.report << to_string(c.encoding) << " m1=" << format_m(c.true_m1) << " alpha="
               << format_number(c.alpha) << " leak=" << format_number(c.p_leak) << " -> "
               << c.misclassified << "/" << c.trials << " misclassified\n";
  }
  session.write("sweep.csv", csv.text());
  session.write("sweep.jsonl", jsonl);
  session.note("trials", std::to_string(spec.trials));
  session.note("window_ns", format_number(config.tunneling.window));
  return session.finish();
}

RunManifest cmd_mechanics(const SimulationConfig& config, const RunContext& ctx) {
  OutputSession session("mechanics", config, ctx);
  const auto& constants = config.system.constants();
  const auto shift = vibration_shift(constants, config.mechanics);
  const double separation = zeeman_separation(constants, config.mechanics);
  const bool bound_ok = separation >= kSeparationBound;

  CsvDocument csv({"quantity", "value"});
  csv.add_row({"vibration_shift_m", format_number(shift.shift)});
  csv.add_row({"quoted_shift_m", format_number(kQuotedVibrationShift)});
  csv.add_row({"coulomb_shift_m", format_number(config.mechanics.coulomb_shift)});
  csv.add_row({"shift_ratio", format_number(shift.ratio_to_coulomb)});
  csv.add_row({"zeeman_separation_mhz", format_number(separation)});
  csv.add_row({"separation_bound_satisfied", bound_ok ? "1" : "0"});
  session.write("mechanics.csv", csv.text());

  ctx.report << "vibration shift dz = " << format_number(shift.shift) << " m ("
             << format_number(shift.shift * 1e12) << " pm)\n"
             << "  quoted value " << format_number(kQuotedVibrationShift * 1e12)
             << " pm differs from the formula by a factor "
             << format_number(shift.shift / kQuotedVibrationShift) << " (flagged)\n"
             << "coulomb reference = " << format_number(config.mechanics.coulomb_shift) << " m\n"
             << "ratio dz / reference = " << format_number(shift.ratio_to_coulomb) << '\n'
             << "zeeman separation = " << format_number(separation) << " MHz ("
             << (bound_ok ? ">=127 MHz satisfied" : "below 127 MHz") << ")\n";
  session.note("separation_bound_satisfied", bound_ok ? "true" : "false");
  return session.finish();
}

}  // namespace setreadout

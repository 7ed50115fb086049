#include "setreadout/config.hpp"

#include "setreadout/csv.hpp"
#include "setreadout/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <initializer_list>
#include <limits>

namespace setreadout {

namespace {

using nlohmann::json;

// Reads one JSON object section with a fixed key set.
class Section {
 public:
  Section(const json& root, std::string path) : path_(std::move(path)) {
    if (root.is_null()) return;
    if (!root.is_object()) throw ValidationError(path_, "expected an object");
    node_ = &root;
  }

  void allow(std::initializer_list<const char*> keys) const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items()) {
      const bool known = std::any_of(keys.begin(), keys.end(),
                                     [&](const char* k) { return key == k; });
      if (!known) throw ValidationError(qualified(key), "unknown key");
    }
  }

  bool has(const char* key) const { return node_ && node_->contains(key); }

  void number(const char* key, double& target) const {
    if (!has(key)) return;
    const json& v = node_->at(key);
    if (!v.is_number()) throw ValidationError(qualified(key), "expected a number");
    target = v.get<double>();
    if (!std::isfinite(target)) throw ValidationError(qualified(key), "must be finite");
  }

  const json& child(const char* key) const {
    static const json null_node;
    return has(key) ? node_->at(key) : null_node;
  }

  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json* node_ = nullptr;
  std::string path_;
};

// Re-throws a component validation error with the config path prefixed.
template <typename F>
void validated(const std::string& section, F&& check) {
  try {
    check();
  } catch (const ValidationError& e) {
    const std::string field = section + "." + e.field();
    const std::string what = e.what();
    const auto colon = what.find(": ");
    throw ValidationError(field, colon == std::string::npos ? what : what.substr(colon + 2));
  }
}

}  // namespace

std::string SimulationConfig::echo() const {
  json j;
  j["system"] = {{"nu1", system.nu1()}, {"nu2", system.nu2()}, {"J", system.J()},
                 {"delta", system.delta()}};
  j["constants"] = {{"g", system.constants().g},
                    {"muB_over_h", system.constants().muB_over_h},
                    {"muB", system.constants().muB},
                    {"k_spring", system.constants().k_spring}};
  j["anisotropy"] = {{"D2", anisotropy.D2}, {"D4", anisotropy.D4}};
  j["rates"] = {{"gamma0", rates.gamma0}, {"gammap", rates.gammap}};
  j["pulse"] = {{"omega0", pulse.omega0}, {"duration", pulse.duration}, {"period", pulse.period}};
  j["pulse"]["frequency"] = pulse_frequency ? json(*pulse_frequency) : json(nullptr);
  j["tunneling"] = {{"t0", tunneling.t0},
                    {"alpha", tunneling.alpha},
                    {"p_leak_source", tunneling.p_leak_source},
                    {"p_leak_drain", tunneling.p_leak_drain},
                    {"cycle_period", tunneling.cycle_period},
                    {"window", tunneling.window}};
  j["mechanics"] = {{"gradient", mechanics.gradient},
                    {"spacing", mechanics.spacing},
                    {"coulomb_shift", mechanics.coulomb_shift}};
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  return j.dump(2);
}

SimulationConfig parse_config_text(std::string_view text) {
  const bool blank = std::all_of(text.begin(), text.end(),
                                 [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  json root;
  if (!blank) {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ValidationError("", std::string("malformed JSON: ") + e.what());
    }
  }

  const Section top(root, "");
  top.allow({"system", "constants", "anisotropy", "rates", "pulse", "tunneling", "mechanics",
             "seed", "output_dir"});

  SimulationConfig cfg;

  PhysicalConstants constants;
  const Section cst(top.child("constants"), "constants");
  cst.allow({"g", "muB_over_h", "muB", "k_spring"});
  cst.number("g", constants.g);
  cst.number("muB_over_h", constants.muB_over_h);
  cst.number("muB", constants.muB);
  cst.number("k_spring", constants.k_spring);
  validated("constants", [&] { constants.validate(); });

  const Section sys(top.child("system"), "system");
  sys.allow({"nu1", "nu2", "delta", "J"});
  double nu1 = cfg.system.nu1();
  double delta = cfg.system.delta();
  double J = cfg.system.J();
  sys.number("nu1", nu1);
  sys.number("J", J);
  double nu2 = nu1 + delta;
  if (sys.has("nu2") && sys.has("delta")) {
    throw ValidationError("system.delta", "give either nu2 or delta, not both");
  }
  sys.number("nu2", nu2);
  if (sys.has("delta")) {
    sys.number("delta", delta);
    nu2 = nu1 + delta;
  }
  validated("system", [&] { cfg.system = SystemParams(nu1, nu2, J, constants); });

  const Section an(top.child("anisotropy"), "anisotropy");
  an.allow({"D2", "D4"});
  an.number("D2", cfg.anisotropy.D2);
  an.number("D4", cfg.anisotropy.D4);

  const Section rt(top.child("rates"), "rates");
  rt.allow({"gamma0", "gammap"});
  rt.number("gamma0", cfg.rates.gamma0);
  rt.number("gammap", cfg.rates.gammap);
  validated("rates", [&] { cfg.rates.validate(); });

  const Section tn(top.child("tunneling"), "tunneling");
  tn.allow({"t0", "alpha", "p_leak_source", "p_leak_drain", "cycle_period", "window"});
  tn.number("t0", cfg.tunneling.t0);
  tn.number("alpha", cfg.tunneling.alpha);
  tn.number("p_leak_source", cfg.tunneling.p_leak_source);
  tn.number("p_leak_drain", cfg.tunneling.p_leak_drain);
  tn.number("cycle_period", cfg.tunneling.cycle_period);
  tn.number("window", cfg.tunneling.window);
  validated("tunneling", [&] { cfg.tunneling.validate(); });

  const Section pl(top.child("pulse"), "pulse");
  pl.allow({"omega0", "frequency", "duration", "period"});
  pl.number("duration", cfg.pulse.duration);
  cfg.pulse.period = cfg.tunneling.cycle_period;
  pl.number("period", cfg.pulse.period);
  cfg.pulse.omega0 = PulseSpec::calibrated_amplitude(cfg.pulse.duration);
  pl.number("omega0", cfg.pulse.omega0);
  if (pl.has("frequency")) {
    double f = 0.0;
    pl.number("frequency", f);
    cfg.pulse_frequency = f;
    cfg.pulse.frequency = f;
  }
  validated("pulse", [&] { cfg.pulse.validate(); });
  if (cfg.pulse.period != cfg.tunneling.cycle_period) {
    throw ValidationError("pulse.period", "pulse train must share tunneling.cycle_period");
  }

  const Section mc(top.child("mechanics"), "mechanics");
  mc.allow({"gradient", "spacing", "coulomb_shift"});
  mc.number("gradient", cfg.mechanics.gradient);
  mc.number("spacing", cfg.mechanics.spacing);
  mc.number("coulomb_shift", cfg.mechanics.coulomb_shift);
  validated("mechanics", [&] { cfg.mechanics.validate(); });

  if (root.is_object() && root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ValidationError("seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (root.is_object() && root.contains("output_dir")) {
    const json& o = root.at("output_dir");
    if (!o.is_string()) throw ValidationError("output_dir", "expected a string");
    cfg.output_dir = o.get<std::string>();
  }
  return cfg;
}

SimulationConfig parse_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("config file not found: " + path.string());
  return parse_config_text(read_text_file(path));
}

std::vector<std::string> config_warnings(const SimulationConfig& config) {
  std::vector<std::string> out;
  const auto diag = check_weak_coupling(config.system);
  if (!diag.ok) {
    out.push_back("weak-coupling limit violated: |J|/|nu2-nu1| = " + format_number(diag.ratio) +
                  " >= 1; secular Hamiltonian may be inaccurate");
  }
  return out;
}

}  // namespace setreadout

#include "setreadout/spin_core.hpp"

#include "setreadout/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace setreadout {

namespace {

constexpr std::array<double, 4> kInsideM{1.5, 0.5, -0.5, -1.5};
constexpr std::array<double, 2> kOutsideM{0.5, -0.5};

// Parts of the level energy that depend on m1 alone. Keeping it separate
// from the m2-dependent part makes outside-flip frequencies independent of
// the anisotropy terms to the last bit.
double inside_part(const SystemParams& p, const AnisotropyParams& a, double m1) {
  const double m1sq = m1 * m1;
  return 2.0 * p.nu1() * m1 + a.D2 * m1sq + a.D4 * m1sq * m1sq;
}

double outside_part(const SystemParams& p, double m1, double m2) {
  return 2.0 * p.nu2() * m2 + p.J() * m1 * m2;
}

std::string signed_term(double coeff, const std::string& symbol) {
  // coeff is a small multiple of 1/2
  std::ostringstream os;
  os << (coeff < 0 ? "-" : "+");
  const double mag = std::abs(coeff);
  const int twice = static_cast<int>(std::lround(2.0 * mag));
  if (twice % 2 == 0) {
    if (twice != 2) os << twice / 2;
    os << symbol;
  } else {
    if (twice != 1) os << twice;
    os << symbol << "/2";
  }
  return os.str();
}

std::string anisotropy_suffix(const AnisotropyParams& a, double m1a, double m1b) {
  if (!a.enabled()) return {};
  const double c2 = m1a * m1a - m1b * m1b;
  const double c4 = m1a * m1a * m1a * m1a - m1b * m1b * m1b * m1b;
  if (c2 == 0.0 && c4 == 0.0) return {};
  std::ostringstream os;
  os << (c2 < 0 ? "-" : "+") << std::abs(c2) << "D2";
  os << (c4 < 0 ? "-" : "+") << std::abs(c4) << "D4";
  return os.str();
}

void require_multiplicity(int multiplicity) {
  if (multiplicity < 2) {
    throw ValidationError("multiplicity", "must be >= 2, got " + std::to_string(multiplicity));
  }
}

}  // namespace

void PhysicalConstants::validate() const {
  if (!(g > 0)) throw ValidationError("g", "must be > 0");
  if (!(muB_over_h > 0)) throw ValidationError("muB_over_h", "must be > 0");
  if (!(muB > 0)) throw ValidationError("muB", "must be > 0");
  if (!(k_spring > 0)) throw ValidationError("k_spring", "must be > 0");
}

SystemParams::SystemParams(double nu1, double nu2, double J, PhysicalConstants constants)
    : nu1_(nu1), nu2_(nu2), J_(J), constants_(constants) {
  if (!(nu1 > 0) || !std::isfinite(nu1)) throw ValidationError("nu1", "must be finite and > 0");
  if (!(nu2 > 0) || !std::isfinite(nu2)) throw ValidationError("nu2", "must be finite and > 0");
  if (!std::isfinite(J)) throw ValidationError("J", "must be finite");
  constants_.validate();
}

SystemParams SystemParams::from_delta(double nu1, double delta, double J,
                                      PhysicalConstants constants) {
  return SystemParams(nu1, nu1 + delta, J, constants);
}

void AnisotropyParams::validate() const {
  if (!std::isfinite(D2)) throw ValidationError("D2", "must be finite");
  if (!std::isfinite(D4)) throw ValidationError("D4", "must be finite");
}

void MechanicsParams::validate() const {
  if (!(gradient >= 0) || !std::isfinite(gradient)) throw ValidationError("gradient", "must be >= 0");
  if (!(spacing > 0)) throw ValidationError("spacing", "must be > 0");
  if (!(coulomb_shift > 0)) throw ValidationError("coulomb_shift", "must be > 0");
}

const Transition& TransitionTable::outside_flip(double m1) const {
  for (const auto& row : rows) {
    if (row.kind == TransitionKind::OutsideFlip && row.m1_a == m1) return row;
  }
  throw ValidationError("table", "no outside-flip line for inside m1 = " + format_m(m1));
}

SpinOperator spin_z_operator(int multiplicity) {
  require_multiplicity(multiplicity);
  const double s = 0.5 * (multiplicity - 1);
  SpinOperator sz = SpinOperator::Zero(multiplicity, multiplicity);
  for (int i = 0; i < multiplicity; ++i) sz(i, i) = s - i;
  return sz;
}

LadderOperators spin_ladder_operators(int multiplicity) {
  require_multiplicity(multiplicity);
  const double s = 0.5 * (multiplicity - 1);
  SpinOperator up = SpinOperator::Zero(multiplicity, multiplicity);
  // S+|m> = sqrt(s(s+1) - m(m+1)) |m+1>; |m> sits at index s - m.
  for (int i = 1; i < multiplicity; ++i) {
    const double m = s - i;
    up(i - 1, i) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  return {up, up.adjoint()};
}

SpinOperator kron(const SpinOperator& a, const SpinOperator& b) {
  SpinOperator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

int product_index(double m1, double m2) {
  const double i1 = 1.5 - m1;
  const double i2 = 0.5 - m2;
  if (i1 < 0 || i1 > 3 || i1 != std::floor(i1) || (i2 != 0 && i2 != 1)) {
    throw ValidationError("m", "no basis state (" + format_m(m1) + ", " + format_m(m2) + ")");
  }
  return 2 * static_cast<int>(i1) + static_cast<int>(i2);
}

SpinOperator build_hamiltonian(const SystemParams& params, const AnisotropyParams& aniso) {
  const SpinOperator sz1 = spin_z_operator(kInsideMultiplicity);
  const SpinOperator sz2 = spin_z_operator(kOutsideMultiplicity);
  const SpinOperator id1 = SpinOperator::Identity(kInsideMultiplicity, kInsideMultiplicity);
  const SpinOperator id2 = SpinOperator::Identity(kOutsideMultiplicity, kOutsideMultiplicity);
  const SpinOperator sz1_sq = sz1 * sz1;

  SpinOperator h = 2.0 * params.nu1() * kron(sz1, id2);
  h += 2.0 * params.nu2() * kron(id1, sz2);
  h += params.J() * kron(sz1, sz2);
  if (aniso.enabled()) {
    h += aniso.D2 * kron(sz1_sq, id2);
    h += aniso.D4 * kron(sz1_sq * sz1_sq, id2);
  }
  return h;
}

double level_energy(const SystemParams& params, const AnisotropyParams& aniso,
                    double m1, double m2) {
  return inside_part(params, aniso, m1) + outside_part(params, m1, m2);
}

std::vector<EnergyLevel> eigenenergies(const SystemParams& params,
                                       const AnisotropyParams& aniso) {
  std::vector<EnergyLevel> levels;
  levels.reserve(kProductDim);
  for (double m1 : kInsideM) {
    for (double m2 : kOutsideM) {
      levels.push_back({m1, m2, level_energy(params, aniso, m1, m2)});
    }
  }
  return levels;
}

TransitionTable transition_table(const SystemParams& params, const AnisotropyParams& aniso) {
  TransitionTable table;
  table.rows.reserve(10);

  auto line = [&](TransitionKind kind, double m1a, double m2a, double m1b, double m2b,
                  std::string formula) {
    const double diff = (inside_part(params, aniso, m1a) - inside_part(params, aniso, m1b)) +
                        (outside_part(params, m1a, m2a) - outside_part(params, m1b, m2b));
    table.rows.push_back({kind, m1a, m2a, m1b, m2b, std::move(formula), std::abs(diff)});
  };

  for (double m1 : kInsideM) {
    line(TransitionKind::OutsideFlip, m1, 0.5, m1, -0.5,
         "2nu1+2delta" + signed_term(m1, "J"));
  }
  for (double m2 : kOutsideM) {
    for (std::size_t i = 0; i + 1 < kInsideM.size(); ++i) {
      const double m1a = kInsideM[i];
      const double m1b = kInsideM[i + 1];
      line(TransitionKind::InsideFlip, m1a, m2, m1b, m2,
           "2nu1" + signed_term(m2, "J") + anisotropy_suffix(aniso, m1a, m1b));
    }
  }
  return table;
}

double dipolar_coupling_at(double r) {
  if (!(r > 0)) throw ValidationError("r", "distance must be > 0");
  const double r_nm = r / 1e-9;
  return 50.0 / (r_nm * r_nm * r_nm);
}

double zeeman_separation(const PhysicalConstants& constants, const MechanicsParams& mech) {
  return constants.g * constants.muB_over_h * mech.gradient * mech.spacing;
}

VibrationShift vibration_shift(const PhysicalConstants& constants, const MechanicsParams& mech) {
  if (!(constants.k_spring > 0)) throw ValidationError("k_spring", "must be > 0");
  const double shift = 2.0 * constants.g * constants.muB / constants.k_spring * mech.gradient;
  return {shift, shift / mech.coulomb_shift};
}

WeakCouplingDiagnostic check_weak_coupling(const SystemParams& params) {
  const double split = std::abs(params.nu2() - params.nu1());
  const double coupling = std::abs(params.J());
  if (coupling == 0.0) return {0.0, true};
  if (split == 0.0) return {std::numeric_limits<double>::infinity(), false};
  const double ratio = coupling / split;
  return {ratio, ratio < 1.0};
}

std::string format_m(double m) {
  const long twice = std::lround(2.0 * m);
  if (twice % 2 == 0) return std::to_string(twice / 2);
  return std::to_string(twice) + "/2";
}

}  // namespace setreadout

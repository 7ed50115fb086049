#pragma once

// Static two-spin problem: the S = 3/2 endohedral (inside) spin coupled to
// the S = 1/2 mobile (outside) spin through a secular dipolar term.
//
// Conventions shared by every module:
//   * frequencies are ordinary frequencies in MHz, times in ns;
//   * Sz carries eigenvalues m (±3/2, ±1/2), not Pauli ±1;
//   * the product basis is ordered by descending (m1, m2), so index
//     i = 2 * (3/2 - m1) + (1/2 - m2).

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace setreadout {

using SpinOperator = Eigen::MatrixXcd;

inline constexpr int kInsideMultiplicity = 4;
inline constexpr int kOutsideMultiplicity = 2;
inline constexpr int kProductDim = kInsideMultiplicity * kOutsideMultiplicity;

struct PhysicalConstants {
  double g = 2.0023;
  double muB_over_h = 13996.245;  // MHz / T
  double muB = 9.274e-24;         // J / T
  double k_spring = 70.0;         // N / m

  void validate() const;
};

/// Zeeman half-frequencies and coupling of the static problem.
/// `delta()` is always nu2 - nu1; it is derived, never stored independently.
class SystemParams {
 public:
  SystemParams(double nu1, double nu2, double J, PhysicalConstants constants = {});

  /// Builds from the inside frequency and the offset nu2 - nu1.
  static SystemParams from_delta(double nu1, double delta, double J,
                                 PhysicalConstants constants = {});

  double nu1() const noexcept { return nu1_; }
  double nu2() const noexcept { return nu2_; }
  double J() const noexcept { return J_; }
  double delta() const noexcept { return nu2_ - nu1_; }
  const PhysicalConstants& constants() const noexcept { return constants_; }

 private:
  double nu1_;
  double nu2_;
  double J_;
  PhysicalConstants constants_;
};

/// Axial terms D2 (Sz1)^2 + D4 (Sz1)^4 on the inside spin. The same terms on
/// a spin-1/2 are multiples of the identity and are not represented.
struct AnisotropyParams {
  double D2 = 0.0;
  double D4 = 0.0;

  bool enabled() const noexcept { return D2 != 0.0 || D4 != 0.0; }
  void validate() const;
};

struct MechanicsParams {
  double gradient = 4e6;        // T / m
  double spacing = 1.14e-9;     // m
  double coulomb_shift = 4e-12; // m

  void validate() const;
};

struct EnergyLevel {
  double m1;
  double m2;
  double energy;  // MHz
};

enum class TransitionKind { OutsideFlip, InsideFlip };

/// One selection-rule-allowed line. States are listed upper-m first, so
/// (m1_a, m2_a) <-> (m1_b, m2_b) with m_a = m_b + 1 on the flipped spin.
struct Transition {
  TransitionKind kind;
  double m1_a;
  double m2_a;
  double m1_b;
  double m2_b;
  std::string formula;
  double frequency;  // MHz, |E_a - E_b|
};

struct TransitionTable {
  std::vector<Transition> rows;

  /// Outside-flip line with the inside spin held at `m1`; throws if absent.
  const Transition& outside_flip(double m1) const;
};

struct LadderOperators {
  SpinOperator raising;
  SpinOperator lowering;
};

struct WeakCouplingDiagnostic {
  double ratio;  // |J| / |nu2 - nu1|, +inf when nu2 == nu1 and J != 0
  bool ok;
};

struct VibrationShift {
  double shift;              // m
  double ratio_to_coulomb;   // shift / coulomb_shift
};

SpinOperator spin_z_operator(int multiplicity);
LadderOperators spin_ladder_operators(int multiplicity);

/// Kronecker product a ⊗ b.
SpinOperator kron(const SpinOperator& a, const SpinOperator& b);

int product_index(double m1, double m2);

SpinOperator build_hamiltonian(const SystemParams& params,
                               const AnisotropyParams& aniso = {});

/// Closed-form level E(m1, m2) = 2 nu1 m1 + 2 nu2 m2 + J m1 m2 + D2 m1^2 + D4 m1^4.
double level_energy(const SystemParams& params, const AnisotropyParams& aniso,
                    double m1, double m2);

/// Eight levels in basis order.
std::vector<EnergyLevel> eigenenergies(const SystemParams& params,
                                       const AnisotropyParams& aniso = {});

/// Ten lines: four outside flips (m1 = 3/2 ... -3/2), then six inside flips
/// grouped by outside m2 = +1/2, -1/2.
TransitionTable transition_table(const SystemParams& params,
                                 const AnisotropyParams& aniso = {});

/// Dipolar coupling at centre distance r (metres): 50 MHz * (r / 1 nm)^-3.
double dipolar_coupling_at(double r);

/// Full Zeeman-frequency difference g (muB/h) dB/dz r between the two sites, MHz.
double zeeman_separation(const PhysicalConstants& constants,
                         const MechanicsParams& mech);

/// Displacement (2 g muB / k) dB/dz of a harmonically bound fullerene.
VibrationShift vibration_shift(const PhysicalConstants& constants,
                               const MechanicsParams& mech);

WeakCouplingDiagnostic check_weak_coupling(const SystemParams& params);

/// "3/2", "-1/2", ...
std::string format_m(double m);

}  // namespace setreadout

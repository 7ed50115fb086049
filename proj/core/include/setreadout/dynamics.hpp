#pragma once

// Open-system evolution of the mobile (outside) spin.
//
// Reduced states are 2x2 in the (up, down) basis; full states are 8x8 in the
// product basis of spin_core.hpp, with every dissipator acting on the
// outside factor only. The dephasing operator in the master equation is the
// Pauli sigma_z (eigenvalues ±1), so coherences decay at gamma0/2 + 4 gammap.

#include "setreadout/spin_core.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

namespace setreadout {

using Complex = std::complex<double>;

inline constexpr int kUp = 0;
inline constexpr int kDown = 1;

class DensityMatrix {
 public:
  /// Accepts 2x2 (outside spin) or 8x8 (product space) matrices.
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  static DensityMatrix from_pure(const Eigen::VectorXcd& psi);
  static DensityMatrix spin_up();
  static DensityMatrix spin_down();

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

  // Reduced-state accessors; valid for dim() == 2.
  double up_up() const { return entries_(kUp, kUp).real(); }
  double down_down() const { return entries_(kDown, kDown).real(); }
  Complex up_down() const { return entries_(kUp, kDown); }

  /// Hermitian, unit trace and positive semidefinite within `tol`.
  bool is_physical(double tol = 1e-10) const;

 private:
  Eigen::MatrixXcd entries_;
};

struct DecoherenceRates {
  double gamma0 = 1.0 / 2500.0;  // relaxation, 1/ns (T1 of the outside spin)
  double gammap = 1.0 / 25.0;    // dephasing, 1/ns (T2 of the outside spin)

  void validate() const;
};

struct PulseSpec {
  double omega0 = calibrated_amplitude(140.0);  // Rabi amplitude, MHz
  double frequency = 0.0;                        // carrier, MHz
  double duration = 140.0;                       // ns
  double period = 150.0;                         // ns

  /// Amplitude (MHz) that rotates by exactly pi in `pi_time` ns on resonance.
  static constexpr double calibrated_amplitude(double pi_time) { return 1000.0 / (2.0 * pi_time); }

  void validate() const;
};

struct TimeSeries {
  std::vector<double> times;  // ns
  std::vector<double> P1;     // rho_up_up
  std::vector<double> P2;     // |rho_up_down|
  std::vector<double> P3;     // rho_down_down
};

/// Which dwell-time excursion produced the flip: t0 (1 + alpha) or t0 (1 - alpha).
enum class Branch { Long, Short };

/// Pure state -i cos(a pi/2)|up> ∓ sin(a pi/2)|down>; the upper sign is Branch::Long.
DensityMatrix imperfect_flip_state(double alpha, Branch branch);

Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho, const DecoherenceRates& rates,
                              const std::optional<SpinOperator>& hamiltonian = std::nullopt);

/// Closed-form dissipation-only solution for a 2x2 state.
DensityMatrix analytic_free_evolution(const DensityMatrix& rho0, const DecoherenceRates& rates,
                                      double t);

/// Fixed-step classical RK4 of the master equation with re-Hermitization
/// after each step. The step is shrunk to t / ceil(t / dt) so that the
/// final time is hit exactly. Throws NumericFailure if |tr rho - 1| > 1e-6.
DensityMatrix evolve_numeric(const DensityMatrix& rho0, const DecoherenceRates& rates,
                             const std::optional<SpinOperator>& hamiltonian, double t, double dt);

/// Rotating-frame propagator for the drive Omega0 (sigma+ + sigma-) at
/// detuning `detuning` (MHz) applied for `duration` ns.
Eigen::Matrix2cd rabi_propagator(double omega0, double detuning, double duration);

/// Unitary, dissipation-free pulse on a 2x2 state. The on-resonance angle
/// is 2 pi omega0 tau / 1000, i.e. pi * tau / tau_pi for a calibrated pulse.
DensityMatrix rabi_pulse(const DensityMatrix& rho, const PulseSpec& pulse, double detuning,
                         double effective_duration);

/// Largest flip probability omega0^2 / (omega0^2 + detuning^2) reachable at any duration.
double max_flip_probability(double omega0, double detuning);

TimeSeries fig2_timeseries(double alpha, const DecoherenceRates& rates, double t_end, double dt);

/// Uniform grid 0, dt, 2 dt, ... up to and including t_end (within 1e-9 dt).
std::vector<double> uniform_grid(double t_end, double dt);

}  // namespace setreadout

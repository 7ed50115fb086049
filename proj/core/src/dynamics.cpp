#include "setreadout/dynamics.hpp"

#include "setreadout/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>

namespace setreadout {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Hamiltonian entries are MHz, times are ns.
constexpr double kMhzNs = 1e-3;

// Outside-spin operators lifted to the given dimension (2 or 8).
struct OutsideOperators {
  Eigen::MatrixXcd lower;  // sigma- = |down><up|
  Eigen::MatrixXcd sz;     // Pauli
};

OutsideOperators outside_operators(int dim) {
  Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(2, 2);
  lower(kDown, kUp) = 1.0;
  Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(2, 2);
  sz(kUp, kUp) = 1.0;
  sz(kDown, kDown) = -1.0;
  if (dim == 2) return {lower, sz};
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(kInsideMultiplicity, kInsideMultiplicity);
  return {kron(id, lower), kron(id, sz)};
}

void require_dim(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != kProductDim)) {
    throw ValidationError("rho", "expected a 2x2 or 8x8 matrix, got " + std::to_string(m.rows()) +
                                     "x" + std::to_string(m.cols()));
  }
}

void require_hamiltonian_dim(const std::optional<SpinOperator>& h, int dim) {
  if (h && (h->rows() != dim || h->cols() != dim)) {
    throw ValidationError("hamiltonian", "dimension " + std::to_string(h->rows()) +
                                             " does not match state dimension " +
                                             std::to_string(dim));
  }
}

template <int N>
class LindbladGenerator {
 public:
  using Mat = Eigen::Matrix<Complex, N, N>;

  LindbladGenerator(int dim, const DecoherenceRates& rates, const std::optional<SpinOperator>& h)
      : gamma0_(rates.gamma0), gammap_(rates.gammap) {
    const auto ops = outside_operators(dim);
    lower_ = ops.lower;
    raise_ = lower_.adjoint();
    number_ = raise_ * lower_;
    sz_ = ops.sz;
    if (h) {
      has_h_ = true;
      minus_i_h_ = Complex(0.0, -kTwoPi * kMhzNs) * (*h);
    }
  }

  Mat operator()(const Mat& rho) const {
    Mat d = gamma0_ * (lower_ * rho * raise_) - (0.5 * gamma0_) * (number_ * rho + rho * number_);
    const Mat c = sz_ * rho - rho * sz_;
    d -= gammap_ * (sz_ * c - c * sz_);
    if (has_h_) d += minus_i_h_ * rho - rho * minus_i_h_;
    return d;
  }

 private:
  double gamma0_;
  double gammap_;
  Mat lower_;
  Mat raise_;
  Mat number_;
  Mat sz_;
  Mat minus_i_h_;
  bool has_h_ = false;
};

template <int N>
Eigen::MatrixXcd integrate_rk4(const Eigen::MatrixXcd& rho0, const DecoherenceRates& rates,
                               const std::optional<SpinOperator>& h, double t, double dt) {
  using Mat = typename LindbladGenerator<N>::Mat;
  const LindbladGenerator<N> f(static_cast<int>(rho0.rows()), rates, h);

  const auto steps = static_cast<long long>(std::ceil(t / dt - 1e-9));
  Mat rho = rho0;
  if (steps <= 0) return rho0;
  const double step = t / static_cast<double>(steps);

  for (long long n = 0; n < steps; ++n) {
    const Mat k1 = f(rho);
    const Mat k2 = f(rho + (0.5 * step) * k1);
    const Mat k3 = f(rho + (0.5 * step) * k2);
    const Mat k4 = f(rho + step * k3);
    rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint()).eval();
  }

  const double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (!(drift <= 1e-6) || !rho.allFinite()) {
    throw NumericFailure("trace drift " + std::to_string(drift) + " exceeds 1e-6 after " +
                         std::to_string(steps) + " steps");
  }
  return rho;
}

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  require_dim(entries_);
}

DensityMatrix DensityMatrix::from_pure(const Eigen::VectorXcd& psi) {
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix DensityMatrix::spin_up() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(kUp, kUp) = 1.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::spin_down() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(kDown, kDown) = 1.0;
  return DensityMatrix(m);
}

bool DensityMatrix::is_physical(double tol) const {
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(entries_.trace() - Complex(1.0, 0.0)) > tol) return false;
  const Eigen::MatrixXcd herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tol;
}

void DecoherenceRates::validate() const {
  if (!(gamma0 >= 0) || !std::isfinite(gamma0)) throw ValidationError("gamma0", "must be >= 0");
  if (!(gammap >= 0) || !std::isfinite(gammap)) throw ValidationError("gammap", "must be >= 0");
}

void PulseSpec::validate() const {
  if (!(omega0 >= 0) || !std::isfinite(omega0)) throw ValidationError("omega0", "must be >= 0");
  if (!std::isfinite(frequency)) throw ValidationError("frequency", "must be finite");
  if (!(period > 0)) throw ValidationError("period", "must be > 0");
  if (!(duration > 0) || duration > period) {
    throw ValidationError("duration", "must lie in (0, period]");
  }
}

DensityMatrix imperfect_flip_state(double alpha, Branch branch) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha", "must satisfy 0 <= alpha < 1");
  }
  const double half_angle = 0.5 * alpha * std::numbers::pi;
  const double sign = branch == Branch::Long ? -1.0 : 1.0;
  Eigen::VectorXcd psi(2);
  psi(kUp) = Complex(0.0, -std::cos(half_angle));
  psi(kDown) = sign * std::sin(half_angle);
  return DensityMatrix::from_pure(psi);
}

Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho, const DecoherenceRates& rates,
                              const std::optional<SpinOperator>& hamiltonian) {
  require_hamiltonian_dim(hamiltonian, rho.dim());
  if (rho.dim() == 2) return LindbladGenerator<2>(2, rates, hamiltonian)(rho.matrix());
  return LindbladGenerator<kProductDim>(kProductDim, rates, hamiltonian)(rho.matrix());
}

DensityMatrix analytic_free_evolution(const DensityMatrix& rho0, const DecoherenceRates& rates,
                                      double t) {
  if (!(t >= 0)) throw ValidationError("t", "must be >= 0");
  if (rho0.dim() != 2) throw ValidationError("rho", "closed form requires a 2x2 state");
  const double population_decay = std::exp(-rates.gamma0 * t);
  const double coherence_decay = std::exp(-(0.5 * rates.gamma0 + 4.0 * rates.gammap) * t);

  Eigen::MatrixXcd m(2, 2);
  const double up = rho0.up_up() * population_decay;
  m(kUp, kUp) = up;
  m(kDown, kDown) = rho0.down_down() + (rho0.up_up() - up);
  m(kUp, kDown) = rho0.up_down() * coherence_decay;
  m(kDown, kUp) = std::conj(m(kUp, kDown));
  return DensityMatrix(m);
}

DensityMatrix evolve_numeric(const DensityMatrix& rho0, const DecoherenceRates& rates,
                             const std::optional<SpinOperator>& hamiltonian, double t, double dt) {
  if (!(dt > 0)) throw ValidationError("dt", "must be > 0");
  if (!(t >= 0)) throw ValidationError("t", "must be >= 0");
  require_hamiltonian_dim(hamiltonian, rho0.dim());
  if (rho0.dim() == 2) return DensityMatrix(integrate_rk4<2>(rho0.matrix(), rates, hamiltonian, t, dt));
  return DensityMatrix(integrate_rk4<kProductDim>(rho0.matrix(), rates, hamiltonian, t, dt));
}

Eigen::Matrix2cd rabi_propagator(double omega0, double detuning, double duration) {
  // H = (pi/1000) (omega0 sigma_x - detuning sigma_z) in rad/ns, U = exp(-i H t).
  const double rabi = std::hypot(omega0, detuning);
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  if (rabi == 0.0) return u;
  const double half_angle = 0.5 * kTwoPi * kMhzNs * rabi * duration;
  const double c = std::cos(half_angle);
  const double s = std::sin(half_angle);
  const double nx = omega0 / rabi;
  const double nz = -detuning / rabi;
  u(kUp, kUp) = Complex(c, -s * nz);
  u(kDown, kDown) = Complex(c, s * nz);
  u(kUp, kDown) = Complex(0.0, -s * nx);
  u(kDown, kUp) = Complex(0.0, -s * nx);
  return u;
}

DensityMatrix rabi_pulse(const DensityMatrix& rho, const PulseSpec& pulse, double detuning,
                         double effective_duration) {
  if (rho.dim() != 2) throw ValidationError("rho", "pulse acts on the 2x2 outside-spin state");
  if (!(effective_duration >= 0)) throw ValidationError("effective_duration", "must be >= 0");
  const Eigen::Matrix2cd u = rabi_propagator(pulse.omega0, detuning, effective_duration);
  const Eigen::Matrix2cd out = u * rho.matrix() * u.adjoint();
  return DensityMatrix(Eigen::MatrixXcd(out));
}

double max_flip_probability(double omega0, double detuning) {
  const double w2 = omega0 * omega0;
  const double total = w2 + detuning * detuning;
  return total == 0.0 ? 0.0 : w2 / total;
}

std::vector<double> uniform_grid(double t_end, double dt) {
  if (!(dt > 0)) throw ValidationError("dt", "must be > 0");
  if (!(t_end >= 0)) throw ValidationError("t_end", "must be >= 0");
  const auto n = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) * dt;
  return grid;
}

TimeSeries fig2_timeseries(double alpha, const DecoherenceRates& rates, double t_end, double dt) {
  const DensityMatrix rho0 = imperfect_flip_state(alpha, Branch::Long);
  TimeSeries series;
  series.times = uniform_grid(t_end, dt);
  const auto n = series.times.size();
  series.P1.reserve(n);
  series.P2.reserve(n);
  series.P3.reserve(n);
  for (double t : series.times) {
    const DensityMatrix rho = analytic_free_evolution(rho0, rates, t);
    series.P1.push_back(rho.up_up());
    series.P2.push_back(std::abs(rho.up_down()));
    series.P3.push_back(rho.down_down());
  }
  return series;
}

}  // namespace setreadout

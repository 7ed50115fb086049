#include "setreadout/errors.hpp"
#include "setreadout/spin_core.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

using namespace setreadout;
using oracle::Complex;

namespace {

const SystemParams kReference = SystemParams::from_delta(10000.0, 63.5, 50.0);

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(SpinOperators, SzSpinHalf) {
  const auto sz = spin_z_operator(2);
  EXPECT_EQ(sz(0, 0), Complex(0.5, 0));
  EXPECT_EQ(sz(1, 1), Complex(-0.5, 0));
  EXPECT_EQ(sz(0, 1), Complex(0, 0));
}

TEST(SpinOperators, SzSpinThreeHalves) {
  const auto sz = spin_z_operator(4);
  const double expected[] = {1.5, 0.5, -0.5, -1.5};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(sz(i, i).real(), expected[i]);
  EXPECT_TRUE(sz.isDiagonal());
}

TEST(SpinOperators, SzTracelessForAnyMultiplicity) {
  for (int n = 2; n <= 9; ++n) EXPECT_NEAR(std::abs(spin_z_operator(n).trace()), 0.0, 1e-15) << n;
}

TEST(SpinOperators, RejectsMultiplicityBelowTwo) {
  EXPECT_THROW(spin_z_operator(1), ValidationError);
  EXPECT_THROW(spin_ladder_operators(0), std::invalid_argument);
}

TEST(SpinOperators, LadderSpinHalfSingleEntry) {
  const auto [up, down] = spin_ladder_operators(2);
  EXPECT_EQ(up(0, 1), Complex(1, 0));
  EXPECT_EQ(up(0, 0), Complex(0, 0));
  EXPECT_EQ(up(1, 0), Complex(0, 0));
  EXPECT_EQ(up(1, 1), Complex(0, 0));
}

TEST(SpinOperators, LadderSpinThreeHalvesCoefficient) {
  // S+|1/2> = sqrt(15/4 - 3/4)|3/2> = sqrt(3)|3/2>
  const auto ops = spin_ladder_operators(4);
  EXPECT_NEAR(ops.raising(0, 1).real(), std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(ops.raising(1, 2).real(), 2.0, 1e-15);
  EXPECT_NEAR(ops.raising(2, 3).real(), std::sqrt(3.0), 1e-15);
}

TEST(SpinOperators, LadderAlgebra) {
  for (int n : {2, 3, 4, 5}) {
    const auto ops = spin_ladder_operators(n);
    const SpinOperator comm = ops.raising * ops.lowering - ops.lowering * ops.raising;
    EXPECT_LT((comm - 2.0 * spin_z_operator(n)).cwiseAbs().maxCoeff(), 1e-12) << n;
    EXPECT_LT((ops.raising.adjoint() - ops.lowering).cwiseAbs().maxCoeff(), 1e-12) << n;
  }
}

TEST(Hamiltonian, ReferenceEntryForTopLevel) {
  const auto h = build_hamiltonian(kReference);
  // 3 nu1 + nu2 + 3J/4 = 30000 + 10063.5 + 37.5
  EXPECT_NEAR(h(product_index(1.5, 0.5), product_index(1.5, 0.5)).real(), 40101.0, 1e-9);
}

TEST(Hamiltonian, DiagonalRealAndHermitian) {
  const auto h = build_hamiltonian(kReference, {3.0, -1.0});
  EXPECT_TRUE(h.isDiagonal());
  EXPECT_LT(h.imag().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * h.cwiseAbs().maxCoeff());
}

TEST(Hamiltonian, DecoupledLimitIsSumOfZeemanLadders) {
  const SystemParams p(9000.0, 12000.0, 0.0);
  const auto h = build_hamiltonian(p);
  for (double m1 : {1.5, 0.5, -0.5, -1.5}) {
    for (double m2 : {0.5, -0.5}) {
      const int i = product_index(m1, m2);
      EXPECT_NEAR(h(i, i).real(), 2 * 9000.0 * m1 + 2 * 12000.0 * m2, 1e-9);
    }
  }
}

TEST(Hamiltonian, BasisOrderingDescending) {
  EXPECT_EQ(product_index(1.5, 0.5), 0);
  EXPECT_EQ(product_index(1.5, -0.5), 1);
  EXPECT_EQ(product_index(0.5, 0.5), 2);
  EXPECT_EQ(product_index(-1.5, -0.5), 7);
  EXPECT_THROW(product_index(1.0, 0.5), ValidationError);
}

TEST(Eigenenergies, PrintedClosedForm) {
  const auto levels = eigenenergies(kReference);
  ASSERT_EQ(levels.size(), 8u);
  // eps4+ = 3nu1 - nu2 - 3J/4
  EXPECT_NEAR(levels[product_index(1.5, -0.5)].energy, 19899.0, 1e-9);
  double sum = 0.0;
  for (const auto& lv : levels) sum += lv.energy;
  EXPECT_NEAR(sum, 0.0, 1e-9);
}

TEST(Eigenenergies, ZeemanDegeneracies) {
  // With J = 0 and nu1 = nu2 the levels (1/2, 1/2) and (-1/2, -1/2)... collide
  // exactly where 2 nu1 m1 + 2 nu2 m2 coincide: m1 + m2 equal.
  const SystemParams p(5000.0, 5000.0, 0.0);
  const auto levels = eigenenergies(p);
  for (const auto& a : levels) {
    for (const auto& b : levels) {
      const bool same_total = a.m1 + a.m2 == b.m1 + b.m2;
      EXPECT_EQ(a.energy == b.energy, same_total);
    }
  }
}

TEST(Eigenenergies, RandomAgreementWithHamiltonianAndPrintedForms) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> nu(1000.0, 50000.0);
  std::uniform_real_distribution<double> coupling(0.0, 200.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const SystemParams p(nu(rng), nu(rng), coupling(rng));
    const auto h = build_hamiltonian(p);
    for (const auto& lv : eigenenergies(p)) {
      const int i = product_index(lv.m1, lv.m2);
      const double printed = oracle::printed_level(p.nu1(), p.nu2(), p.J(), lv.m1, lv.m2);
      ASSERT_LT(rel(h(i, i).real(), printed), 1e-9);
      ASSERT_LT(rel(lv.energy, printed), 1e-9);
    }
  }
}

TEST(TransitionTable, ReferenceRows) {
  const auto t = transition_table(kReference);
  ASSERT_EQ(t.rows.size(), 10u);
  EXPECT_NEAR(t.rows[0].frequency, 20202.0, 1e-9);
  EXPECT_EQ(t.rows[0].formula, "2nu1+2delta+3J/2");
  EXPECT_NEAR(t.rows[1].frequency, 20152.0, 1e-9);
  EXPECT_NEAR(t.rows[3].frequency, 20052.0, 1e-9);
  for (int r = 4; r < 7; ++r) {
    EXPECT_NEAR(t.rows[r].frequency, 20025.0, 1e-9);
    EXPECT_EQ(t.rows[r].formula, "2nu1+J/2");
  }
  for (int r = 7; r < 10; ++r) EXPECT_NEAR(t.rows[r].frequency, 19975.0, 1e-9);
}

TEST(TransitionTable, SelectionRules) {
  const auto t = transition_table(kReference, {7.0, 2.0});
  for (const auto& row : t.rows) {
    if (row.kind == TransitionKind::OutsideFlip) {
      EXPECT_EQ(row.m1_a, row.m1_b);
      EXPECT_EQ(row.m2_a - row.m2_b, 1.0);
    } else {
      EXPECT_EQ(row.m2_a, row.m2_b);
      EXPECT_EQ(row.m1_a - row.m1_b, 1.0);
    }
    EXPECT_GT(row.frequency, 0.0);
  }
}

TEST(TransitionTable, RowsAreLadderConnectedLevelDifferences) {
  // Every row links two basis states with a nonzero ladder matrix element,
  // and its frequency is the diagonal difference of the Hamiltonian.
  const auto h = build_hamiltonian(kReference, {4.0, 0.5});
  const auto in = spin_ladder_operators(kInsideMultiplicity);
  const auto out = spin_ladder_operators(kOutsideMultiplicity);
  const SpinOperator id1 = SpinOperator::Identity(4, 4);
  const SpinOperator id2 = SpinOperator::Identity(2, 2);
  const SpinOperator raise_inside = kron(in.raising, id2);
  const SpinOperator raise_outside = kron(id1, out.raising);
  for (const auto& row : transition_table(kReference, {4.0, 0.5}).rows) {
    const int a = product_index(row.m1_a, row.m2_a);
    const int b = product_index(row.m1_b, row.m2_b);
    const auto& op = row.kind == TransitionKind::OutsideFlip ? raise_outside : raise_inside;
    EXPECT_GT(std::abs(op(a, b)), 0.0);
    EXPECT_NEAR(row.frequency, std::abs((h(a, a) - h(b, b)).real()), 1e-9 * row.frequency);
  }
}

TEST(TransitionTable, RandomIdentityWithPrintedRows) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> nu(1000.0, 50000.0);
  std::uniform_real_distribution<double> off(-500.0, 500.0);
  std::uniform_real_distribution<double> coupling(0.0, 200.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double nu1 = nu(rng), d = off(rng), J = coupling(rng);
    const auto t = transition_table(SystemParams::from_delta(nu1, d, J));
    const double expect[10] = {2 * nu1 + 2 * d + 1.5 * J, 2 * nu1 + 2 * d + 0.5 * J,
                               2 * nu1 + 2 * d - 0.5 * J, 2 * nu1 + 2 * d - 1.5 * J,
                               2 * nu1 + 0.5 * J,         2 * nu1 + 0.5 * J,
                               2 * nu1 + 0.5 * J,         2 * nu1 - 0.5 * J,
                               2 * nu1 - 0.5 * J,         2 * nu1 - 0.5 * J};
    for (int r = 0; r < 10; ++r) ASSERT_LT(rel(t.rows[r].frequency, expect[r]), 1e-9) << r;
  }
}

TEST(TransitionTable, FullyDegenerateLimit) {
  const auto t = transition_table(SystemParams(8000.0, 8000.0, 0.0));
  std::set<double> distinct;
  for (const auto& row : t.rows) distinct.insert(row.frequency);
  EXPECT_EQ(distinct.size(), 1u);  // 2 nu1 = 2 nu2
  EXPECT_EQ(*distinct.begin(), 16000.0);
}

TEST(TransitionTable, AnisotropyOnlyMovesInsideFlips) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> d(-300.0, 300.0);
  const auto plain = transition_table(kReference);
  for (int trial = 0; trial < 100; ++trial) {
    const AnisotropyParams a{d(rng), d(rng)};
    const auto t = transition_table(kReference, a);
    for (int r = 0; r < 4; ++r) ASSERT_EQ(t.rows[r].frequency, plain.rows[r].frequency);
    bool moved = false;
    for (int r = 4; r < 10; ++r) moved |= t.rows[r].frequency != plain.rows[r].frequency;
    EXPECT_TRUE(moved);
  }
}

TEST(TransitionTable, AnisotropyFormulaSuffix) {
  const auto t = transition_table(kReference, {10.0, 0.0});
  EXPECT_EQ(t.rows[4].formula, "2nu1+J/2+2D2+5D4");
  EXPECT_EQ(t.rows[5].formula, "2nu1+J/2");
  EXPECT_EQ(t.rows[6].formula, "2nu1+J/2-2D2-5D4");
  EXPECT_NEAR(t.rows[4].frequency, 20025.0 + 20.0, 1e-9);
}

TEST(TransitionTable, GradientLiftsDegeneracy) {
  const auto t = transition_table(kReference);
  // 2nu1+2delta-3J/2 vs 2nu1+J/2: 2 delta - 2J = 27 MHz
  EXPECT_NEAR(t.rows[3].frequency - t.rows[4].frequency, 27.0, 1e-9);
}

TEST(TransitionTable, OutsideFlipLookup) {
  const auto t = transition_table(kReference);
  EXPECT_NEAR(t.outside_flip(0.5).frequency, 20152.0, 1e-9);
  EXPECT_THROW(t.outside_flip(1.0), ValidationError);
}

TEST(Dipolar, ScalesAsInverseCube) {
  EXPECT_DOUBLE_EQ(dipolar_coupling_at(1e-9), 50.0);
  EXPECT_NEAR(dipolar_coupling_at(2e-9), 6.25, 1e-12);
  EXPECT_NEAR(dipolar_coupling_at(1.14e-9), 33.7485758101, 1e-9);
  EXPECT_THROW(dipolar_coupling_at(0.0), ValidationError);
  EXPECT_THROW(dipolar_coupling_at(-1e-9), ValidationError);
}

TEST(Mechanics, ZeemanSeparation) {
  const PhysicalConstants c;
  MechanicsParams m;
  EXPECT_NEAR(zeeman_separation(c, m), 127.79254701756, 1e-8);
  m.spacing *= 2;
  EXPECT_NEAR(zeeman_separation(c, m), 2 * 127.79254701756, 1e-8);
  m.gradient = 0.0;
  EXPECT_EQ(zeeman_separation(c, m), 0.0);
}

TEST(Mechanics, VibrationShift) {
  PhysicalConstants c;
  c.g = 2.0;
  MechanicsParams m;
  const auto s = vibration_shift(c, m);
  EXPECT_NEAR(s.shift, 2.11977142857e-18, 1e-28);
  EXPECT_NEAR(s.ratio_to_coulomb, 2.11977142857e-18 / 4e-12, 1e-16);
  m.gradient = 0.0;
  EXPECT_EQ(vibration_shift(c, m).shift, 0.0);
}

TEST(Mechanics, VibrationShiftNegligibleUpToTenMegaTeslaPerMetre) {
  const PhysicalConstants c;
  for (double g = 0.0; g <= 1e7; g += 2.5e5) {
    MechanicsParams m;
    m.gradient = g;
    EXPECT_LT(vibration_shift(c, m).ratio_to_coulomb, 1e-5);
  }
}

TEST(WeakCoupling, Ratios) {
  auto d = check_weak_coupling(kReference);
  EXPECT_NEAR(d.ratio, 0.787401574803, 1e-12);
  EXPECT_TRUE(d.ok);

  d = check_weak_coupling(SystemParams::from_delta(10000.0, 63.5, 0.0));
  EXPECT_EQ(d.ratio, 0.0);
  EXPECT_TRUE(d.ok);

  d = check_weak_coupling(SystemParams::from_delta(10000.0, 63.5, 100.0));
  EXPECT_NEAR(d.ratio, 1.57480314961, 1e-10);
  EXPECT_FALSE(d.ok);

  d = check_weak_coupling(SystemParams(10000.0, 10000.0, 5.0));
  EXPECT_TRUE(std::isinf(d.ratio));
  EXPECT_FALSE(d.ok);
}

TEST(SystemParamsTest, Invariants) {
  EXPECT_THROW(SystemParams(0.0, 1.0, 0.0), ValidationError);
  EXPECT_THROW(SystemParams(1.0, -1.0, 0.0), ValidationError);
  const SystemParams p(10063.5, 10000.0, 50.0);
  EXPECT_EQ(p.delta(), 10000.0 - 10063.5);
}

TEST(Labels, FormatM) {
  EXPECT_EQ(format_m(1.5), "3/2");
  EXPECT_EQ(format_m(-0.5), "-1/2");
  EXPECT_EQ(format_m(1.0), "1");
}

#include <gtest/gtest.h>

#include <cmath>

#include "rqed/hamiltonians.hpp"

using namespace rqed;

namespace {

const AtomSpectrum& double_well_60() {
  static const AtomSpectrum atom = solve_double_well(double_well_from_gamma(60.0), 64);
  return atom;
}

const AtomSpectrum& fluxonium(double phi_ext) {
  static const AtomSpectrum pi = solve_fluxonium(FluxoniumParams::from_ghz(2.5, 0.5, 9.0, kPi), 64);
  static const AtomSpectrum off = solve_fluxonium(FluxoniumParams::from_ghz(2.5, 0.5, 9.0, 49.0 * kPi / 50.0), 64);
  return phi_ext == kPi ? pi : off;
}

CouplingSet cavity(double g_over_wc, Index n_levels = -1) {
  const auto& atom = double_well_60();
  const double wc = 3.0 * atom.omega(1);
  return cavity_couplings(atom, wc, a0_from_target_g(g_over_wc * wc, wc, 1.0, atom.x_mat(0, 1)), 1.0, n_levels);
}

CouplingSet circuit(double phi_ext, double g_over_wc, Index n_levels = -1) {
  const auto& atom = fluxonium(phi_ext);
  const double wc = 3.0 * atom.omega(1);
  return circuit_couplings(atom, wc, l2_from_target_g(g_over_wc * wc, wc, atom.x_mat(0, 1)), n_levels);
}

// Three-level atom with only g_02 nonzero and no quadratic term.
CouplingSet three_level(double w1, double w2, double wc, double g02) {
  RVector w(3);
  w << 0.0, w1, w2;
  RMatrix g = RMatrix::Zero(3, 3);
  g(0, 2) = g(2, 0) = g02;
  return detail::finish_couplings(Flavor::cavity, w, wc, g, RMatrix::Zero(3, 3));
}

}  // namespace

TEST(SWGenerator, DefiningConditionCavity) {
  for (double g : {0.2, 0.8, 1.5}) EXPECT_LT(verify_generator(cavity(g), 12, 30), 1e-9) << "g/wc=" << g;
}

TEST(SWGenerator, DefiningConditionCircuit) {
  for (double pe : {kPi, 49.0 * kPi / 50.0}) {
    for (double g : {0.2, 1.0}) EXPECT_LT(verify_generator(circuit(pe, g), 15, 30), 1e-9);
  }
}

TEST(SWGenerator, PerturbedDeltaFails) {
  EXPECT_GT(verify_generator(cavity(0.8), 12, 30, 1.01), 1e-3);
}

TEST(SWGenerator, AntiHermitian) {
  const CMatrix s = sw_generator(cavity(0.8), 8, 10);
  EXPECT_LT(max_abs(CMatrix(s + s.adjoint())), 1e-14);
}

TEST(SWGenerator, NoFirstOrderTermInLowBlock) {
  EXPECT_LT(low_block_first_order(cavity(0.8), 8, 12), 1e-14);
}

TEST(SWCoefficients, ConvergedOverLevels) {
  const auto s = sw_coefficients(cavity(0.8));
  EXPECT_TRUE(s.converged);
  EXPECT_LT(s.change, 1e-10);
  EXPECT_GE(s.l_max, kDefaultLMax);
}

TEST(SWCoefficients, ParitySelection) {
  const auto s = sw_coefficients(cavity(0.8));
  const double scale = std::max(s.A.cwiseAbs().maxCoeff(), s.B.cwiseAbs().maxCoeff());
  EXPECT_LT(std::abs(s.A(0, 1)), 1e-10 * scale);
  EXPECT_LT(std::abs(s.B(0, 1)), 1e-10 * scale);
  EXPECT_LT(std::abs(s.C(0, 0)), 1e-10 * scale);
}

TEST(SWCoefficients, SecondOrderPerturbationTheory) {
  const double w2 = 3.7, wc = 1.3, g = 0.01;
  const auto c = three_level(1.0, w2, wc, g);
  const auto s = sw_coefficients(c);
  const Index n_ph = 8;
  CMatrix h = build_rqrm(c, s, n_ph).matrix();
  h.diagonal().array() += identity_offset(c, s);
  const double d = w2 * w2 - wc * wc;
  for (Index n = 0; n < n_ph - 1; ++n) {
    const double shift = g * g / d * (wc - w2 * (2.0 * n + 1.0));
    EXPECT_NEAR(h(n, n).real(), n * wc + shift, 1e-14);
    EXPECT_NEAR(h(n_ph + n, n_ph + n).real(), 1.0 + n * wc, 1e-14);
  }
}

TEST(SWCoefficients, DispersiveGate) {
  EXPECT_THROW(sw_coefficients(cavity(0.8), kDefaultLMax, 1e-3), DispersiveError);
}

TEST(SWCoefficients, NeedsHigherLevels) {
  EXPECT_THROW(sw_coefficients(cavity(0.8, 2)), DimensionError);
}

TEST(SWCoefficients, ZeroCouplingGivesZero) {
  const auto s = sw_coefficients(three_level(1.0, 3.7, 1.3, 0.0));
  EXPECT_EQ(s.A.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.D.cwiseAbs().maxCoeff(), 0.0);
}

TEST(EffectiveFromSW, MatchesClosedFormCavity) {
  for (double g : {0.2, 0.8, 1.5}) {
    const auto c = cavity(g, 12);
    const auto s = sw_coefficients(c, 11);
    EXPECT_LT(distance_up_to_shift(effective_from_sw(c, 12, 30), build_rqrm(c, s, 30).matrix()), 1e-8) << g;
  }
}

TEST(EffectiveFromSW, MatchesClosedFormCircuit) {
  for (double pe : {kPi, 49.0 * kPi / 50.0}) {
    for (double g : {0.2, 1.0}) {
      const auto c = circuit(pe, g, 15);
      const auto s = sw_coefficients(c, 14);
      EXPECT_LT(distance_up_to_shift(effective_from_sw(c, 15, 30), build_circuit_rqrm(c, s, 30).matrix()), 1e-8)
          << pe << " " << g;
    }
  }
}

TEST(EffectiveFromSW, ShiftIsIdentityOffset) {
  const auto c = cavity(0.8, 12);
  const auto s = sw_coefficients(c, 11);
  const CMatrix d = effective_from_sw(c, 12, 20) - build_rqrm(c, s, 20).matrix();
  EXPECT_NEAR(d(0, 0).real(), identity_offset(c, s), 1e-9 * c.omega_c);
}

TEST(DistanceUpToShift, IgnoresIdentity) {
  const CMatrix a = CMatrix::Random(4, 4);
  EXPECT_LT(distance_up_to_shift(a, CMatrix(a + 3.0 * CMatrix::Identity(4, 4))), 1e-15);
  CMatrix b = a;
  b(0, 1) += 0.1;
  EXPECT_NEAR(distance_up_to_shift(a, b), 0.1, 1e-15);
}

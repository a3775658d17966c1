#include <gtest/gtest.h>

#include <cmath>

#include "rqed/metrics.hpp"

using namespace rqed;

namespace {

const AtomSpectrum& double_well_60() {
  static const AtomSpectrum atom = solve_double_well(double_well_from_gamma(60.0), 64);
  return atom;
}

CouplingSet cavity(double g_over_wc) {
  const auto& atom = double_well_60();
  const double wc = 3.0 * atom.omega(1);
  return cavity_couplings(atom, wc, a0_from_target_g(g_over_wc * wc, wc, 1.0, atom.x_mat(0, 1)));
}

struct Fig4Point {
  ObservableRecord full, qrm, rqrm;
  double cavity_infidelity, atom_infidelity;
};

Fig4Point fig4(double g) {
  const Index n_a = 12, n_ph = 40;
  const auto& atom = double_well_60();
  const auto c = cavity(g);
  const auto s = sw_coefficients(c);
  const auto ef = eigh(build_full_dipole(c, n_a, n_ph), false);
  const auto eq = eigh(build_qrm_dipole(c, n_ph), false);
  const auto er = eigh(build_rqrm(c, s, n_ph), false);
  const auto two = two_level_operators(atom, n_ph);
  const std::vector<Index> dims{2, n_ph};
  return {eigenstate_observables(ef, full_model_operators(atom, n_a, n_ph)), eigenstate_observables(eq, two),
          eigenstate_observables(er, two), eigenstate_infidelity(er, eq, dims, 2, Subsystem::cavity),
          eigenstate_infidelity(er, eq, dims, 2, Subsystem::atom)};
}

CVector product_state(const CVector& a, const CVector& b) { return kron(a, b); }

}  // namespace

TEST(MseSigma, IdenticalSpectra) {
  RVector e(6);
  e << 0.0, 1.0, 2.5, 3.0, 4.1, 7.0;
  const auto r = mse_sigma(e, e, 5);
  EXPECT_EQ(r.sigma, 0.0);
  EXPECT_EQ(r.N, 5);
  EXPECT_EQ(r.per_level_errors.size(), 5u);
  EXPECT_EQ(r.pairing.front(), (std::pair<Index, Index>{1, 1}));
}

TEST(MseSigma, OffsetCancels) {
  RVector e(6);
  e << 0.0, 1.0, 2.5, 3.0, 4.1, 7.0;
  EXPECT_NEAR(mse_sigma(RVector(e.array() + 3.7), e, 5).sigma, 0.0, 1e-14);
}

TEST(MseSigma, KnownErrors) {
  RVector full(4), model(4);
  full << 0.0, 1.0, 2.0, 3.0;
  model << 1.0, 2.1, 2.8, 4.0;
  const auto r = mse_sigma(model, full, 3, 2.0);
  EXPECT_NEAR(r.per_level_errors[0], 0.05, 1e-15);
  EXPECT_NEAR(r.per_level_errors[1], -0.1, 1e-15);
  EXPECT_NEAR(r.sigma, std::sqrt((0.0025 + 0.01) / 3.0), 1e-15);
  double acc = 0.0;
  for (double v : r.per_level_errors) acc += v * v;
  EXPECT_NEAR(r.sigma, std::sqrt(acc / 3.0), 1e-14);
}

TEST(MseSigma, SortsInput) {
  RVector full(3), model(3);
  full << 0.0, 1.0, 2.0;
  model << 2.0, 0.0, 1.0;
  EXPECT_EQ(mse_sigma(model, full, 2).sigma, 0.0);
}

TEST(MseSigma, InsufficientLevels) {
  EXPECT_THROW(mse_sigma(RVector::Zero(3), RVector::Zero(6), 5), DimensionError);
  EXPECT_THROW(mse_sigma(RVector::Zero(6), RVector::Zero(6), 0), Error);
}

TEST(MseSigma, RenormalizedModelMoreAccurate) {
  const auto c = cavity(0.8);
  const auto s = sw_coefficients(c);
  const RVector ef = eigvalsh(build_full_dipole(c, 12, 40));
  EXPECT_LT(mse_sigma(eigvalsh(build_rqrm(c, s, 40)), ef, 5).sigma, mse_sigma(eigvalsh(build_qrm_dipole(c, 40)), ef, 5).sigma);
}

TEST(Fidelity, Trivial) {
  CVector a(3), b(3);
  a << 1.0, 0.0, 0.0;
  b << 0.0, 1.0, 0.0;
  const auto ra = DensityMatrix::from_pure(a), rb = DensityMatrix::from_pure(b);
  EXPECT_NEAR(fidelity(ra, ra), 1.0, 1e-10);
  EXPECT_NEAR(fidelity(ra, rb), 0.0, 1e-10);
  EXPECT_THROW(fidelity(ra, DensityMatrix::from_pure(CVector::Ones(2))), DimensionError);
}

TEST(Fidelity, PureStatesReduceToOverlap) {
  CVector a(3), b(3);
  a << cplx(0.3, 0.1), cplx(-0.5, 0.2), cplx(0.7, 0.0);
  b << cplx(0.1, 0.0), cplx(0.4, -0.6), cplx(0.2, 0.3);
  a.normalize();
  b.normalize();
  const double f = fidelity(DensityMatrix::from_pure(a), DensityMatrix::from_pure(b));
  EXPECT_NEAR(f, std::abs(a.dot(b)), 1e-10);
}

TEST(Fidelity, Symmetric) {
  CMatrix r(2, 2), s(2, 2);
  r << 0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.3;
  s << 0.4, cplx(-0.2, 0.05), cplx(-0.2, -0.05), 0.6;
  const DensityMatrix dr(r), ds(s);
  EXPECT_NEAR(fidelity(dr, ds), fidelity(ds, dr), 1e-10);
  EXPECT_GT(fidelity(dr, ds), 0.0);
  EXPECT_LT(fidelity(dr, ds), 1.0);
}

TEST(Fidelity, CommutingMixedStates) {
  CMatrix r = CMatrix::Zero(2, 2), s = CMatrix::Zero(2, 2);
  r(0, 0) = 0.8;
  r(1, 1) = 0.2;
  s(0, 0) = 0.5;
  s(1, 1) = 0.5;
  EXPECT_NEAR(fidelity(DensityMatrix(r), DensityMatrix(s)), std::sqrt(0.4) + std::sqrt(0.1), 1e-12);
}

TEST(EigenstateInfidelity, ProductStates) {
  CVector a0(2), a1(2), b0(3), b1(3);
  a0 << 1.0, 0.0;
  a1 << std::cos(0.3), std::sin(0.3);
  b0 << 1.0, 0.0, 0.0;
  b1 << std::cos(0.7), 0.0, std::sin(0.7);
  SpectrumResult x, y;
  x.eigenvectors = CMatrix(6, 1);
  y.eigenvectors = CMatrix(6, 1);
  x.eigenvectors.col(0) = product_state(a0, b0);
  y.eigenvectors.col(0) = product_state(a1, b1);
  const std::vector<Index> dims{2, 3};
  EXPECT_NEAR(eigenstate_infidelity(x, y, dims, 0, Subsystem::atom), 1.0 - std::cos(0.3), 1e-12);
  EXPECT_NEAR(eigenstate_infidelity(x, y, dims, 0, Subsystem::cavity), 1.0 - std::cos(0.7), 1e-12);
  EXPECT_NEAR(eigenstate_infidelity(x, x, dims, 0, Subsystem::cavity), 0.0, 1e-10);
  EXPECT_THROW(eigenstate_infidelity(x, y, dims, 1, Subsystem::atom), DimensionError);
}

TEST(EigenstateObservables, UncoupledOscillatorIdentity) {
  const auto& atom = double_well_60();
  const auto c = cavity(0.0);
  const auto rec = eigenstate_observables(eigh(build_qrm_dipole(c, 20), false), two_level_operators(atom, 20));
  EXPECT_NEAR(rec.quad_sq_33, 3.0, 1e-12);
  EXPECT_NEAR(rec.quad_02, 1.0, 1e-12);
  EXPECT_NEAR(rec.x_02, 0.0, 1e-12);
}

TEST(EigenstateObservables, FullModelUncoupled) {
  const auto& atom = double_well_60();
  const auto c = cavity(0.0);
  const auto rec = eigenstate_observables(eigh(build_full_dipole(c, 6, 10), false), full_model_operators(atom, 6, 10));
  EXPECT_NEAR(rec.quad_sq_33, 3.0, 1e-12);
}

TEST(EigenstateObservables, BogoliubovScaling) {
  const auto& atom = double_well_60();
  const auto ops = two_level_operators(atom, 6, 0.5);
  const auto base = two_level_operators(atom, 6);
  EXPECT_LT(max_abs(CMatrix(ops.quadrature - 0.5 * base.quadrature)), 1e-15);
  EXPECT_LT(max_abs(CMatrix(ops.quadrature_sq - 0.25 * base.quadrature_sq)), 1e-15);
}

TEST(EigenstateObservables, NeedsFourStates) {
  SpectrumResult r;
  r.eigenvectors = CMatrix::Identity(3, 3);
  ObservableOperators ops{CMatrix::Identity(3, 3), CMatrix::Identity(3, 3), CMatrix::Identity(3, 3)};
  EXPECT_THROW(eigenstate_observables(r, ops), DimensionError);
}

TEST(EigenstateObservables, RenormalizedPhotonObservablesCloser) {
  for (double g : {0.2, 0.4, 0.8, 1.2}) {
    const auto p = fig4(g);
    EXPECT_LT(std::abs(p.rqrm.quad_sq_33 - p.full.quad_sq_33), std::abs(p.qrm.quad_sq_33 - p.full.quad_sq_33)) << g;
    if (p.full.quad_02 > 1e-8) {
      EXPECT_LT(std::abs(p.rqrm.quad_02 - p.full.quad_02), std::abs(p.qrm.quad_02 - p.full.quad_02)) << g;
    }
  }
}

TEST(EigenstateInfidelity, CavityChangesMoreThanAtom) {
  double prev = 0.0;
  for (double g : {0.1, 0.2, 0.3, 0.4}) {
    const auto p = fig4(g);
    EXPECT_GT(p.cavity_infidelity, prev) << g;
    EXPECT_GT(p.cavity_infidelity, p.atom_infidelity) << g;
    prev = p.cavity_infidelity;
  }
}

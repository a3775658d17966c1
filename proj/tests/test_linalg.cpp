#include <gtest/gtest.h>

#include <random>

#include "rqed/linalg.hpp"

using namespace rqed;

namespace {

CMatrix random_hermitian(Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  CMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng));
  }
  return 0.5 * (m + m.adjoint());
}

CMatrix random_density(Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  CMatrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = cplx(d(rng), d(rng));
  }
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

CMatrix sx() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

}  // namespace

TEST(HermitianOperator, RejectsAsymmetric) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(HermitianOperator{m}, NotHermitianError);
  try {
    HermitianOperator h(m);
  } catch (const NotHermitianError& e) {
    EXPECT_DOUBLE_EQ(e.asymmetry(), 1.0);
  }
}

TEST(HermitianOperator, RejectsBadFactorDims) {
  EXPECT_THROW(HermitianOperator(CMatrix::Identity(6, 6), {2, 4}), DimensionError);
  EXPECT_NO_THROW(HermitianOperator(CMatrix::Identity(6, 6), {2, 3}));
}

TEST(Eigh, DiagonalSigmaZ) {
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  const auto r = eigh(z);
  EXPECT_DOUBLE_EQ(r.eigenvalues(0), -1.0);
  EXPECT_DOUBLE_EQ(r.eigenvalues(1), 1.0);
}

TEST(Eigh, SigmaX) {
  const auto r = eigh(sx());
  EXPECT_NEAR(r.eigenvalues(0), -1.0, 1e-15);
  EXPECT_NEAR(r.eigenvalues(1), 1.0, 1e-15);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(r.eigenvectors(0, 0) - s), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(r.eigenvectors(1, 0) + s), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(r.eigenvectors(0, 1) - s), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(r.eigenvectors(1, 1) - s), 0.0, 1e-14);
}

TEST(Eigh, ReconstructsRandom) {
  for (Index n : {8, 64, 300}) {
    const CMatrix h = random_hermitian(n, 7 + static_cast<unsigned>(n));
    const auto r = eigh(h);
    const CMatrix back = r.eigenvectors * r.eigenvalues.cast<cplx>().asDiagonal() * r.eigenvectors.adjoint();
    EXPECT_LT(max_abs(CMatrix(back - h)), 1e-10 * max_abs(h));
    EXPECT_LT(max_abs(CMatrix(r.eigenvectors.adjoint() * r.eigenvectors - CMatrix::Identity(n, n))), 1e-10);
    for (Index k = 1; k < n; ++k) EXPECT_LE(r.eigenvalues(k - 1), r.eigenvalues(k));
    EXPECT_LT(r.residuals.maxCoeff(), 1e-9 * r.spectral_range());
  }
}

TEST(Eigh, DeterministicDegenerateOrdering) {
  CMatrix h = CMatrix::Zero(4, 4);
  h(0, 0) = 1.0;
  h(3, 3) = 1.0;
  h(1, 1) = 2.0;
  h(2, 2) = 2.0;
  const auto a = eigh(h);
  const auto b = eigh(h);
  EXPECT_EQ(max_abs(CMatrix(a.eigenvectors - b.eigenvectors)), 0.0);
  EXPECT_NEAR(std::abs(a.eigenvectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(a.eigenvectors(3, 1)), 1.0, 1e-15);
}

TEST(PsdSqrt, ScalarAndDiagonal) {
  EXPECT_LT(max_abs(CMatrix(psd_sqrt(CMatrix::Identity(4, 4) / 4.0) - CMatrix::Identity(4, 4) / 2.0)), 1e-15);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const CMatrix s = psd_sqrt(d);
  EXPECT_NEAR(s(0, 0).real(), 2.0, 1e-14);
  EXPECT_NEAR(s(1, 1).real(), 3.0, 1e-14);
}

TEST(PsdSqrt, SquaresBack) {
  const CMatrix rho = random_density(6, 3);
  const CMatrix s = psd_sqrt(rho);
  EXPECT_LT(max_abs(CMatrix(s * s - rho)), 1e-10);
  EXPECT_GE(eigvalsh(HermitianOperator(s)).minCoeff(), -1e-12);
}

TEST(PsdSqrt, RejectsNegative) {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1e-3;
  EXPECT_THROW(psd_sqrt(d), NotPsdError);
}

TEST(Kron, Identities) {
  EXPECT_EQ(kron(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)), CMatrix::Identity(6, 6));
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  CMatrix n = CMatrix::Zero(2, 2);
  n(1, 1) = 1.0;
  CMatrix expect = CMatrix::Zero(4, 4);
  expect(1, 1) = 1.0;
  expect(3, 3) = -1.0;
  EXPECT_EQ(kron(z, n), expect);
}

TEST(Kron, MixedProduct) {
  const CMatrix a = random_hermitian(2, 1), b = random_hermitian(3, 2);
  const CMatrix c = random_hermitian(2, 3), d = random_hermitian(3, 4);
  EXPECT_LT(max_abs(CMatrix(kron(a, b) * kron(c, d) - kron(CMatrix(a * c), CMatrix(b * d)))), 1e-12);
}

TEST(Kron, FactorDimsConcatenate) {
  const HermitianOperator a(CMatrix::Identity(2, 2)), b(CMatrix::Identity(3, 3), {3});
  const auto k = kron(a, b);
  EXPECT_EQ(k.factor_dims(), (std::vector<Index>{2, 3}));
}

TEST(PartialTrace, ProductState) {
  const CMatrix ra = random_density(2, 11), rb = random_density(3, 12);
  const std::vector<Index> dims{2, 3};
  EXPECT_LT(max_abs(CMatrix(partial_trace(kron(ra, rb), dims, 0) - ra)), 1e-14);
  EXPECT_LT(max_abs(CMatrix(partial_trace(kron(ra, rb), dims, 1) - rb)), 1e-14);
}

TEST(PartialTrace, BellState) {
  CVector psi = CVector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const auto rho = DensityMatrix::from_pure(psi);
  const std::vector<Index> dims{2, 2};
  for (std::size_t keep : {0u, 1u}) {
    EXPECT_LT(max_abs(CMatrix(partial_trace(rho, dims, keep).matrix() - CMatrix::Identity(2, 2) / 2.0)), 1e-15);
  }
}

TEST(PartialTrace, TracePreservedAndRangeChecked) {
  const DensityMatrix rho(random_density(12, 5));
  const std::vector<Index> dims{2, 3, 2};
  for (std::size_t keep = 0; keep < 3; ++keep) {
    EXPECT_NEAR(partial_trace(rho, dims, keep).matrix().trace().real(), 1.0, 1e-12);
  }
  EXPECT_THROW(partial_trace(rho, dims, 3), DimensionError);
}

TEST(DensityMatrix, Validates) {
  EXPECT_THROW(DensityMatrix(CMatrix::Identity(2, 2)), Error);
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix{m}, NotPsdError);
}

TEST(UnitaryFromHermitian, ZeroAngle) {
  const HermitianOperator g(random_hermitian(5, 9));
  EXPECT_LT(max_abs(CMatrix(unitary_from_hermitian(g, 0.0) - CMatrix::Identity(5, 5))), 1e-13);
}

TEST(UnitaryFromHermitian, PauliExponential) {
  const CMatrix u = unitary_from_hermitian(HermitianOperator(sx()), kPi / 2.0);
  EXPECT_LT(max_abs(CMatrix(u - kI * sx())), 1e-15);
}

TEST(UnitaryFromHermitian, GroupPropertyAndSpectrum) {
  const HermitianOperator g(random_hermitian(7, 21));
  const CMatrix u1 = unitary_from_hermitian(g, 0.3), u2 = unitary_from_hermitian(g, 0.9);
  const CMatrix u12 = unitary_from_hermitian(g, 1.2);
  EXPECT_LT(max_abs(CMatrix(u1 * u2 - u12)), 1e-12);
  EXPECT_LT(max_abs(CMatrix(u12.adjoint() * u12 - CMatrix::Identity(7, 7))), 1e-10);
  const HermitianOperator h(random_hermitian(7, 22));
  const RVector e0 = eigvalsh(h);
  const RVector e1 = eigvalsh(HermitianOperator(CMatrix(u12.adjoint() * h.matrix() * u12)));
  EXPECT_LT((e0 - e1).cwiseAbs().maxCoeff(), 1e-9);
}

#include <gtest/gtest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "rqed/hilbert.hpp"

using namespace rqed;

TEST(FockSpace, LadderElements) {
  const FockSpace f(6);
  for (Index k = 1; k < 6; ++k) EXPECT_DOUBLE_EQ(f.a()(k - 1, k).real(), std::sqrt(static_cast<double>(k)));
  EXPECT_LT(max_abs(CMatrix(f.a_dag() * f.a() - f.number())), 1e-14);
  EXPECT_THROW(FockSpace(1), DimensionError);
}

TEST(FockSpace, CommutatorBreaksOnlyInLastLevel) {
  const FockSpace f(8);
  const CMatrix c = commutator(f.a(), f.a_dag());
  for (Index k = 0; k < 7; ++k) EXPECT_NEAR(c(k, k).real(), 1.0, 1e-14);
  EXPECT_NEAR(c(7, 7).real(), -7.0, 1e-14);
}

TEST(FockSpace, QuadraticFormsMatchLargerSpace) {
  const FockSpace f(10), big(12);
  const CMatrix m = (big.a_minus_adag() * big.a_minus_adag()).topLeftCorner(10, 10);
  const CMatrix p = (big.a_plus_adag() * big.a_plus_adag()).topLeftCorner(10, 10);
  EXPECT_LT(max_abs(CMatrix(f.minus_squared() - m)), 1e-13);
  EXPECT_LT(max_abs(CMatrix(f.plus_squared() - p)), 1e-13);
}

TEST(FockSpace, VacuumQuadratureVariance) {
  const FockSpace f(5);
  for (Index n = 0; n < 4; ++n) EXPECT_NEAR(f.plus_squared()(n, n).real(), 2.0 * n + 1.0, 1e-14);
}

TEST(FockSpace, DisplacementMatchesPaddedExponential) {
  const Index n = 20, pad = 80;
  const FockSpace f(n), big(n + pad);
  for (cplx alpha : {cplx(0.3, 0.0), cplx(0.0, 1.7), cplx(-0.8, 0.5)}) {
    const CMatrix gen = alpha * big.a_dag() - std::conj(alpha) * big.a();
    const CMatrix ref = gen.exp().topLeftCorner(n, n);
    EXPECT_LT(max_abs(CMatrix(f.displacement(alpha) - ref)), 1e-12);
  }
  EXPECT_LT(max_abs(CMatrix(f.displacement(0.0) - f.identity())), 1e-15);
}

TEST(FockSpace, DisplacementCoherentVacuum) {
  const FockSpace f(30);
  const cplx alpha(0.6, -0.4);
  const CVector col = f.displacement(alpha).col(0);
  double fact = 1.0;
  for (Index k = 0; k < 10; ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    const cplx ref = std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, static_cast<double>(k)) / std::sqrt(fact);
    EXPECT_NEAR(std::abs(col(k) - ref), 0.0, 1e-14);
  }
}

TEST(Pauli, Algebra) {
  EXPECT_LT(max_abs(CMatrix(pauli::x() * pauli::y() - kI * pauli::z())), 1e-15);
  EXPECT_LT(max_abs(CMatrix(pauli::y() * pauli::z() - kI * pauli::x())), 1e-15);
  EXPECT_LT(max_abs(CMatrix(pauli::z() * pauli::z() - pauli::identity())), 1e-15);
}

TEST(CompositeSpace, Projectors) {
  const auto s = make_composite(4, 3);
  EXPECT_EQ(s.dim(), 12);
  EXPECT_LT(max_abs(CMatrix(s.P * s.P - s.P)), 1e-15);
  EXPECT_LT(max_abs(CMatrix(s.P + s.Q - CMatrix::Identity(12, 12))), 1e-15);
  EXPECT_LT(max_abs(CMatrix(s.P * s.Q)), 1e-15);
  EXPECT_NEAR(s.P.trace().real(), 6.0, 1e-15);
  EXPECT_EQ(s.low_indices().size(), 6u);
  EXPECT_EQ(s.low_indices().back(), 5);
  EXPECT_THROW(make_composite(1, 3), DimensionError);
}

TEST(CompositeSpace, EmbeddingsCommute) {
  const FockSpace f(4);
  CMatrix atom_op = CMatrix::Zero(3, 3);
  atom_op(0, 1) = atom_op(1, 0) = 1.0;
  atom_op(2, 2) = 2.0;
  const auto ea = embed_atom(atom_op, 3, 4);
  const auto ep = embed_photon(f.number(), 3, 4);
  EXPECT_LT(max_abs(commutator(ea.matrix(), ep.matrix())), 1e-14);
  EXPECT_EQ(ea.factor_dims(), (std::vector<Index>{3, 4}));
  EXPECT_THROW(embed_atom(atom_op, 2, 4), DimensionError);
  EXPECT_THROW(embed_photon(f.number(), 3, 5), DimensionError);
}

TEST(CompositeSpace, TailPopulation) {
  CMatrix v = CMatrix::Zero(6, 2);
  v(0, 0) = 1.0;
  v(2, 1) = std::sqrt(0.5);
  v(4, 1) = std::sqrt(0.5);
  EXPECT_DOUBLE_EQ(fock_tail_population(v, 3, 1), 0.0);
  EXPECT_NEAR(fock_tail_population(v, 3, 2), 1.0, 1e-15);
}

TEST(PhotonCutoff, ConvergesForDisplacedOscillator) {
  auto build = [](Index n) {
    const FockSpace f(n);
    return HermitianOperator(CMatrix(f.number() + 0.7 * f.a_plus_adag()));
  };
  const auto r = converge_n_ph(build, 20, 160, 4, 1e-10);
  EXPECT_TRUE(r.converged);
  const RVector e = eigvalsh(build(r.n_ph));
  EXPECT_NEAR(e(0), -0.49, 1e-10);
  EXPECT_NEAR(e(1), 0.51, 1e-10);
}

#pragma once

// Spectral error, fidelity and eigenstate observables used to compare models.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "rqed/hamiltonians.hpp"

namespace rqed {

struct ComparisonReport {
  double sigma = 0.0;
  std::vector<double> per_level_errors;  // (E_j - E_0) - (E_j^full - E_0^full), j = 1..N
  Index N = 0;
  std::vector<std::pair<Index, Index>> pairing;
};

/// sigma = sqrt(sum_j err_j^2 / N) over the first N transition energies, paired
/// by ascending index. Divide by `scale` to report in other units.
inline ComparisonReport mse_sigma(const RVector& e_model, const RVector& e_full, Index n, double scale = 1.0) {
  if (n < 1) throw Error("mse_sigma: N must be >= 1");
  if (e_model.size() < n + 1 || e_full.size() < n + 1) {
    throw DimensionError("mse_sigma: need " + std::to_string(n + 1) + " levels in both spectra");
  }
  RVector a = e_model, b = e_full;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  ComparisonReport r;
  r.N = n;
  double acc = 0.0;
  for (Index j = 1; j <= n; ++j) {
    const double err = ((a(j) - a(0)) - (b(j) - b(0))) / scale;
    r.per_level_errors.push_back(err);
    r.pairing.emplace_back(j, j);
    acc += err * err;
  }
  r.sigma = std::sqrt(acc / static_cast<double>(n));
  return r;
}

namespace detail {

// Square root with eigenvalues below round-off of the largest one set to zero.
inline CMatrix state_sqrt(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho.matrix());
  RVector lam = solver.eigenvalues();
  const double cut = 1e-14 * std::max(lam.maxCoeff(), 1.0);
  for (Index i = 0; i < lam.size(); ++i) lam(i) = lam(i) > cut ? std::sqrt(lam(i)) : 0.0;
  return solver.eigenvectors() * lam.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace detail

/// F = tr sqrt(sqrt(rho) sigma sqrt(rho)), evaluated as the sum of singular
/// values of sqrt(rho) sqrt(sigma) and clamped to [0, 1].
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("fidelity: dimension mismatch");
  const CMatrix m = detail::state_sqrt(rho) * detail::state_sqrt(sigma);
  const double f = Eigen::JacobiSVD<CMatrix>(m).singularValues().sum();
  if (f > 1.0 + DensityMatrix::kTolerance) throw Error("fidelity: value " + sci(f) + " exceeds 1");
  return std::clamp(f, 0.0, 1.0);
}

/// Operators needed for the eigenstate observables, already lifted to the
/// model's Hilbert space.
struct ObservableOperators {
  CMatrix quadrature;     // a + a^dag
  CMatrix quadrature_sq;  // (a + a^dag)^2
  CMatrix position;       // x
};

/// Full model on n_a levels: x from the atomic matrix elements.
inline ObservableOperators full_model_operators(const AtomSpectrum& atom, Index n_a, Index n_ph) {
  if (atom.n_levels < n_a) throw DimensionError("full_model_operators: atom has too few levels");
  const FockSpace f(n_ph);
  const CMatrix id_a = CMatrix::Identity(n_a, n_a);
  return {kron(id_a, f.a_plus_adag()), kron(id_a, f.plus_squared()),
          kron(CMatrix(atom.x_mat.topLeftCorner(n_a, n_a).cast<cplx>()), f.identity())};
}

/// Two-level model: x -> x_00 |0><0| + x_11 |1><1| + x_01 sigma_x. The photon
/// quadrature is scaled by `quadrature_scale` for models written in a
/// Bogoliubov mode (a + a^dag = s (b + b^dag)).
inline ObservableOperators two_level_operators(const AtomSpectrum& atom, Index n_ph, double quadrature_scale = 1.0) {
  const FockSpace f(n_ph);
  CMatrix x2 = CMatrix::Zero(2, 2);
  x2(0, 0) = atom.x_mat(0, 0);
  x2(1, 1) = atom.x_mat(1, 1);
  x2(0, 1) = atom.x_mat(0, 1);
  x2(1, 0) = atom.x_mat(1, 0);
  const double s = quadrature_scale;
  return {kron(pauli::identity(), CMatrix(s * f.a_plus_adag())), kron(pauli::identity(), CMatrix(s * s * f.plus_squared())),
          kron(x2, f.identity())};
}

struct ObservableRecord {
  double quad_sq_33 = 0.0;  // <psi_3|(a + a^dag)^2|psi_3>
  double quad_02 = 0.0;     // |<psi_0|(a + a^dag)|psi_2>|
  double x_02 = 0.0;        // |<psi_0|x|psi_2>|
};

inline ObservableRecord eigenstate_observables(const SpectrumResult& spec, const ObservableOperators& ops) {
  if (spec.eigenvectors.cols() < 4) throw DimensionError("eigenstate_observables: need at least 4 eigenstates");
  if (ops.quadrature.rows() != spec.eigenvectors.rows()) throw DimensionError("eigenstate_observables: operator dimension");
  const CVector p0 = spec.eigenvectors.col(0), p2 = spec.eigenvectors.col(2), p3 = spec.eigenvectors.col(3);
  return {expectation(p3, ops.quadrature_sq), std::abs(p0.dot(ops.quadrature * p2)), std::abs(p0.dot(ops.position * p2))};
}

enum class Subsystem { atom = 0, cavity = 1 };

/// 1 - F between the reduced states of eigenstate `state` of two models on
/// the same atom (x) photon factorization.
inline double eigenstate_infidelity(const SpectrumResult& a, const SpectrumResult& b, const std::vector<Index>& factor_dims,
                                    Index state, Subsystem sub) {
  if (state < 0 || state >= a.eigenvectors.cols() || state >= b.eigenvectors.cols()) {
    throw DimensionError("eigenstate_infidelity: state index beyond computed spectrum");
  }
  if (a.eigenvectors.rows() != b.eigenvectors.rows()) throw DimensionError("eigenstate_infidelity: models differ in dimension");
  const auto keep = static_cast<std::size_t>(sub);
  const DensityMatrix ra = partial_trace(DensityMatrix::from_pure(a.eigenvectors.col(state)), factor_dims, keep);
  const DensityMatrix rb = partial_trace(DensityMatrix::from_pure(b.eigenvectors.col(state)), factor_dims, keep);
  return 1.0 - fidelity(ra, rb);
}

}  // namespace rqed

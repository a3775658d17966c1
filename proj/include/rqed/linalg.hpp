#pragma once

// Dense complex linear algebra used throughout the library. Everything here is
// a pure function of its inputs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rqed/error.hpp"

namespace rqed {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const RMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Largest elementwise violation of H = H^dagger.
inline double hermiticity_residual(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("hermiticity_residual: matrix is not square");
  return max_abs(CMatrix(m - m.adjoint()));
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

inline Index product(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

/// Dense Hermitian matrix together with its tensor-factor layout. Construction
/// validates Hermiticity to 1e-12 relative and then symmetrizes exactly.
class HermitianOperator {
 public:
  static constexpr double kRelativeTolerance = 1e-12;

  HermitianOperator() = default;

  explicit HermitianOperator(CMatrix entries, std::vector<Index> factor_dims = {})
      : entries_(std::move(entries)), factor_dims_(std::move(factor_dims)) {
    if (entries_.rows() != entries_.cols()) throw DimensionError("HermitianOperator: matrix is not square");
    if (factor_dims_.empty()) factor_dims_ = {entries_.rows()};
    if (product(factor_dims_) != entries_.rows()) {
      throw DimensionError("HermitianOperator: factor dims do not multiply to " + std::to_string(entries_.rows()));
    }
    const double scale = max_abs(entries_);
    const double asym = hermiticity_residual(entries_);
    if (asym > kRelativeTolerance * std::max(scale, 1e-300) && asym > 0.0) throw NotHermitianError(asym, scale);
    entries_ = (0.5 * (entries_ + entries_.adjoint())).eval();
  }

  const CMatrix& matrix() const { return entries_; }
  Index dim() const { return entries_.rows(); }
  const std::vector<Index>& factor_dims() const { return factor_dims_; }

  HermitianOperator operator+(const HermitianOperator& o) const { return combine(o, entries_ + o.entries_); }
  HermitianOperator operator-(const HermitianOperator& o) const { return combine(o, entries_ - o.entries_); }
  HermitianOperator operator*(double s) const { return HermitianOperator(entries_ * s, factor_dims_); }

 private:
  HermitianOperator combine(const HermitianOperator& o, CMatrix m) const {
    if (o.dim() != dim()) throw DimensionError("HermitianOperator: dimension mismatch");
    return HermitianOperator(std::move(m), factor_dims_);
  }

  CMatrix entries_;
  std::vector<Index> factor_dims_;
};

struct SpectrumResult {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns
  RVector residuals;     // ||H v_k - E_k v_k||_2, empty if not requested

  double spectral_range() const {
    return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) - eigenvalues(0) : 0.0;
  }
};

namespace detail {

// Fix the phase of every column so its first dominant component is real and
// positive, and order columns inside near-degenerate clusters by the index of
// that component.
inline void canonicalize(RVector& values, CMatrix& vectors) {
  const Index n = values.size();
  if (n == 0) return;
  std::vector<Index> lead(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    auto col = vectors.col(k);
    const double peak = col.cwiseAbs().maxCoeff();
    Index idx = 0;
    while (std::abs(col(idx)) < (1.0 - 1e-8) * peak) ++idx;
    lead[static_cast<std::size_t>(k)] = idx;
    const cplx phase = std::conj(col(idx)) / std::abs(col(idx));
    col *= phase;
  }
  const double range = values(n - 1) - values(0);
  const double tol = 1e-10 * std::max(range, 1e-300);
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n && values(stop) - values(stop - 1) <= tol) ++stop;
    if (stop - start > 1) {
      std::vector<Index> order(static_cast<std::size_t>(stop - start));
      std::iota(order.begin(), order.end(), start);
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return lead[static_cast<std::size_t>(a)] < lead[static_cast<std::size_t>(b)];
      });
      CMatrix block(vectors.rows(), stop - start);
      RVector vals(stop - start);
      for (Index i = 0; i < stop - start; ++i) {
        block.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
        vals(i) = values(order[static_cast<std::size_t>(i)]);
      }
      vectors.middleCols(start, stop - start) = block;
      values.segment(start, stop - start) = vals;
    }
    start = stop;
  }
}

}  // namespace detail

/// Full Hermitian eigendecomposition (Householder tridiagonalization followed
/// by implicit shifted QR), ascending eigenvalues, deterministic vector phases.
inline SpectrumResult eigh(const HermitianOperator& h, bool with_residuals = true) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigh: eigensolver did not converge");
  SpectrumResult out{solver.eigenvalues(), solver.eigenvectors(), {}};
  detail::canonicalize(out.eigenvalues, out.eigenvectors);
  if (with_residuals) {
    const CMatrix r = h.matrix() * out.eigenvectors - out.eigenvectors * out.eigenvalues.asDiagonal();
    out.residuals = r.colwise().norm().transpose();
  }
  return out;
}

inline SpectrumResult eigh(const CMatrix& m, bool with_residuals = true) {
  return eigh(HermitianOperator(m), with_residuals);
}

inline RVector eigvalsh(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigvalsh: eigensolver did not converge");
  return solver.eigenvalues();
}

/// Hermitian square root of a positive semidefinite matrix. Eigenvalues down to
/// -1e-9 (relative to max(1, ||M||)) are treated as round-off and clamped.
inline CMatrix psd_sqrt(const CMatrix& m) {
  const HermitianOperator h(m);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
  RVector lam = solver.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  if (lam.size() && lam.minCoeff() < -1e-9 * scale) throw NotPsdError(lam.minCoeff());
  lam = lam.cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * lam.asDiagonal() * solver.eigenvectors().adjoint();
}

template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar, typename DerivedB::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  std::vector<Index> dims = a.factor_dims();
  dims.insert(dims.end(), b.factor_dims().begin(), b.factor_dims().end());
  return HermitianOperator(kron(a.matrix(), b.matrix()), std::move(dims));
}

/// Reduced matrix over factor `keep`; factors are laid out with the last one
/// varying fastest.
inline CMatrix partial_trace(const CMatrix& rho, std::span<const Index> factor_dims, std::size_t keep) {
  if (keep >= factor_dims.size()) throw DimensionError("partial_trace: keep index out of range");
  if (product(factor_dims) != rho.rows() || rho.rows() != rho.cols()) {
    throw DimensionError("partial_trace: factor dims do not match matrix");
  }
  const Index d = factor_dims[keep];
  const Index outer = product(factor_dims.subspan(0, keep));
  const Index inner = product(factor_dims.subspan(keep + 1));
  CMatrix out = CMatrix::Zero(d, d);
  for (Index o = 0; o < outer; ++o) {
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        const Index row = (o * d + i) * inner;
        const Index col = (o * d + j) * inner;
        for (Index r = 0; r < inner; ++r) out(i, j) += rho(row + r, col + r);
      }
    }
  }
  return out;
}

/// Unit-trace positive semidefinite Hermitian matrix.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
    const HermitianOperator h(entries_);
    entries_ = h.matrix();
    const double tr = entries_.trace().real();
    if (std::abs(tr - 1.0) > kTolerance) throw Error("DensityMatrix: trace " + std::to_string(tr) + " != 1");
    const double lo = eigvalsh(h).minCoeff();
    if (lo < -kTolerance) throw NotPsdError(lo);
  }

  static DensityMatrix from_pure(const CVector& psi) {
    const CVector v = psi / psi.norm();
    return DensityMatrix(v * v.adjoint());
  }

  const CMatrix& matrix() const { return entries_; }
  Index dim() const { return entries_.rows(); }

 private:
  CMatrix entries_;
};

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Index> factor_dims, std::size_t keep) {
  return DensityMatrix(partial_trace(rho.matrix(), factor_dims, keep));
}

/// exp(i theta G) through the eigendecomposition of G.
inline CMatrix unitary_from_hermitian(const HermitianOperator& g, double theta) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(g.matrix());
  if (solver.info() != Eigen::Success) throw ConvergenceError("unitary_from_hermitian: eigensolver failed");
  const CVector phases = (kI * theta * solver.eigenvalues().cast<cplx>()).array().exp().matrix();
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

inline double expectation(const CVector& psi, const CMatrix& op) { return psi.dot(op * psi).real(); }

}  // namespace rqed

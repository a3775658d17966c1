#pragma once

// Truncated bosonic mode and the atom (x) photon product space. Basis ordering
// is atom-major, photon-minor: index = j * n_ph + n.

#include <cmath>
#include <functional>
#include <utility>

#include "rqed/linalg.hpp"

namespace rqed {

class FockSpace {
 public:
  explicit FockSpace(Index n_ph) : n_(n_ph) {
    if (n_ph < 2) throw DimensionError("FockSpace: n_ph must be >= 2");
    a_ = CMatrix::Zero(n_, n_);
    for (Index k = 1; k < n_; ++k) a_(k - 1, k) = std::sqrt(static_cast<double>(k));
    number_ = CMatrix::Zero(n_, n_);
    for (Index k = 0; k < n_; ++k) number_(k, k) = static_cast<double>(k);
  }

  Index dim() const { return n_; }
  const CMatrix& a() const { return a_; }
  CMatrix a_dag() const { return a_.adjoint(); }
  const CMatrix& number() const { return number_; }
  CMatrix identity() const { return CMatrix::Identity(n_, n_); }

  CMatrix a_minus_adag() const { return a_ - a_.adjoint(); }
  CMatrix a_plus_adag() const { return a_ + a_.adjoint(); }
  CMatrix a_squared() const { return a_ * a_; }
  CMatrix adag_squared() const { return a_.adjoint() * a_.adjoint(); }

  // Quadratic forms truncated entrywise from the infinite matrices (the naive
  // product of truncated factors is wrong in the last diagonal entry).
  CMatrix minus_squared() const { return a_squared() + adag_squared() - 2.0 * number_ - identity(); }
  CMatrix plus_squared() const { return a_squared() + adag_squared() + 2.0 * number_ + identity(); }

  /// Truncation of the exact displacement operator exp(alpha a^dag - conj(alpha) a).
  /// <m|D|n> = sqrt(n!/m!) alpha^(m-n) e^(-|alpha|^2/2) L_n^(m-n)(|alpha|^2) for m >= n,
  /// and the (-conj(alpha)) mirror image for m < n.
  CMatrix displacement(cplx alpha) const {
    CMatrix d = CMatrix::Zero(n_, n_);
    const double x = std::norm(alpha);
    if (x == 0.0) return identity();
    const double log_r = 0.5 * std::log(x);
    const cplx unit_a = alpha / std::abs(alpha);
    for (Index k = 0; k < n_; ++k) {
      const Index lo_max = n_ - 1 - k;
      // L_lo^(k)(x) for lo = 0..lo_max
      std::vector<double> lag(static_cast<std::size_t>(lo_max + 1));
      lag[0] = 1.0;
      if (lo_max >= 1) lag[1] = 1.0 + static_cast<double>(k) - x;
      for (Index lo = 1; lo < lo_max; ++lo) {
        const auto l = static_cast<double>(lo);
        lag[static_cast<std::size_t>(lo + 1)] =
            ((2.0 * l + 1.0 + static_cast<double>(k) - x) * lag[static_cast<std::size_t>(lo)] -
             (l + static_cast<double>(k)) * lag[static_cast<std::size_t>(lo - 1)]) /
            (l + 1.0);
      }
      const cplx phase_lower = std::pow(unit_a, static_cast<double>(k));
      const cplx phase_upper = std::pow(-std::conj(unit_a), static_cast<double>(k));
      for (Index lo = 0; lo <= lo_max; ++lo) {
        const Index hi = lo + k;
        const double mag = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) +
                                    static_cast<double>(k) * log_r - 0.5 * x) *
                           lag[static_cast<std::size_t>(lo)];
        d(hi, lo) = mag * phase_lower;
        if (k > 0) d(lo, hi) = mag * phase_upper;
      }
    }
    return d;
  }

 private:
  Index n_;
  CMatrix a_;
  CMatrix number_;
};

namespace pauli {
inline CMatrix identity() { return CMatrix::Identity(2, 2); }
// Basis (|0>, |1>) with |1> the upper level.
inline CMatrix z() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  return m;
}
inline CMatrix x() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}
inline CMatrix y() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = kI;
  m(1, 0) = -kI;
  return m;
}
}  // namespace pauli

struct CompositeSpace {
  Index n_a = 0;
  Index n_ph = 0;
  CMatrix P;  // atomic span{|0>,|1>} (x) full photon space
  CMatrix Q;

  Index dim() const { return n_a * n_ph; }
  std::vector<Index> factor_dims() const { return {n_a, n_ph}; }
  std::vector<Index> low_indices() const {
    std::vector<Index> idx;
    for (Index j = 0; j < std::min<Index>(2, n_a); ++j) {
      for (Index n = 0; n < n_ph; ++n) idx.push_back(j * n_ph + n);
    }
    return idx;
  }
};

inline std::pair<CMatrix, CMatrix> build_projectors(Index n_a, Index n_ph) {
  if (n_a < 2) throw DimensionError("build_projectors: need at least two atomic levels");
  const Index dim = n_a * n_ph;
  CMatrix p = CMatrix::Zero(dim, dim);
  for (Index k = 0; k < 2 * n_ph; ++k) p(k, k) = 1.0;
  CMatrix q = CMatrix::Identity(dim, dim) - p;
  return {std::move(p), std::move(q)};
}

inline CompositeSpace make_composite(Index n_a, Index n_ph) {
  auto [p, q] = build_projectors(n_a, n_ph);
  return {n_a, n_ph, std::move(p), std::move(q)};
}

inline HermitianOperator embed_atom(const CMatrix& op, Index n_a, Index n_ph) {
  if (op.rows() != n_a || op.cols() != n_a) throw DimensionError("embed_atom: operator does not match atom dimension");
  return HermitianOperator(kron(op, CMatrix::Identity(n_ph, n_ph)), {n_a, n_ph});
}

inline HermitianOperator embed_photon(const CMatrix& op, Index n_a, Index n_ph) {
  if (op.rows() != n_ph || op.cols() != n_ph) throw DimensionError("embed_photon: operator does not match photon dimension");
  return HermitianOperator(kron(CMatrix::Identity(n_a, n_a), op), {n_a, n_ph});
}

/// Rows/cols `idx` of m.
inline CMatrix restrict(const CMatrix& m, const std::vector<Index>& idx) {
  const Index k = static_cast<Index>(idx.size());
  CMatrix out(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) out(i, j) = m(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return out;
}

/// Largest population of the top two Fock levels among the first `n_states`
/// columns of `vectors` (atom-major layout with photon dimension n_ph).
inline double fock_tail_population(const CMatrix& vectors, Index n_ph, Index n_states) {
  const Index n_a = vectors.rows() / n_ph;
  double worst = 0.0;
  for (Index s = 0; s < std::min(n_states, vectors.cols()); ++s) {
    double pop = 0.0;
    for (Index j = 0; j < n_a; ++j) {
      for (Index n = std::max<Index>(0, n_ph - 2); n < n_ph; ++n) pop += std::norm(vectors(j * n_ph + n, s));
    }
    worst = std::max(worst, pop);
  }
  return worst;
}

struct PhotonCutoff {
  Index n_ph = 0;
  bool converged = false;
  double change = 0.0;
};

/// Doubles n_ph from `start` until the lowest `levels` eigenvalues of
/// build(n_ph) move by less than `tol` relative to their spread.
inline PhotonCutoff converge_n_ph(const std::function<HermitianOperator(Index)>& build, Index start = 40,
                                  Index max_n_ph = 320, Index levels = 6, double tol = 1e-8) {
  Index n = start;
  RVector prev = eigvalsh(build(n)).head(levels);
  PhotonCutoff out{n, false, 0.0};
  while (2 * n <= max_n_ph) {
    const RVector next = eigvalsh(build(2 * n)).head(levels);
    const double scale = std::max({next.cwiseAbs().maxCoeff(), next(levels - 1) - next(0), 1e-300});
    out.change = (next - prev).cwiseAbs().maxCoeff() / scale;
    if (out.change < tol) {
      out.converged = true;
      return out;
    }
    n *= 2;
    out.n_ph = n;
    prev = next;
  }
  return out;
}

}  // namespace rqed

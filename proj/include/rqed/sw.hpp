#pragma once

// Second-order Schrieffer-Wolff elimination of the atomic levels l > 1.
//
// The interaction splits into H^L (both atomic indices in {0,1}) and H^H (the
// rest, with G_jj for j > 1 moved into the quasi-free omega'_j). The generator S
// solves [H0', S] = -H^H exactly, and P (H0' + H^L + [H^H, S]/2) P gives the
// renormalized two-level model.

#include <cmath>

#include "rqed/couplings.hpp"
#include "rqed/hilbert.hpp"

namespace rqed {

struct SWCoefficients {
  RMatrix A = RMatrix::Zero(2, 2);
  RMatrix B = RMatrix::Zero(2, 2);
  RMatrix C = RMatrix::Zero(2, 2);
  RMatrix D = RMatrix::Zero(2, 2);
  Index l_max = 0;
  bool converged = false;
  double change = 0.0;  // relative change under the last l_max extension

  double A_minus() const { return A(1, 1) - A(0, 0); }
  double A_plus() const { return A(1, 1) + A(0, 0); }
  double B_minus() const { return B(1, 1) - B(0, 0); }
  double B_plus() const { return B(1, 1) + B(0, 0); }

  static SWCoefficients zero() { return {}; }
};

inline constexpr Index kDefaultLMax = 48;

namespace detail {

inline SWCoefficients sw_sums(const CouplingSet& c, Index l_max) {
  SWCoefficients s;
  s.l_max = l_max;
  const double wc = c.omega_c;
  const RMatrix& g = c.g;
  const RMatrix& G = c.G;
  const RMatrix& D = c.Delta;
  auto w = [&](Index a, Index b) { return c.omega_prime_diff(a, b); };
  for (Index j = 0; j < 2; ++j) {
    for (Index k = 0; k < 2; ++k) {
      double a = 0.0, b = 0.0, cc = 0.0, d = 0.0;
      for (Index l = 2; l <= l_max; ++l) {
        a += g(j, l) * g(l, k) / 2.0 * wc / D(l, k) - G(j, l) * G(l, k) / (4.0 * wc * wc) * (1.0 / w(l, k) + 1.0 / w(l, j));
        b += g(j, l) * g(l, k) / 4.0 * (w(l, k) / D(l, k) + w(l, j) / D(l, j));
        cc += (g(j, l) * G(l, k) / w(k, l) + g(l, k) * G(j, l) / w(j, l) + g(l, k) * G(j, l) * w(k, l) / D(l, k) +
               g(j, l) * G(l, k) * w(j, l) / D(j, l)) /
              (2.0 * wc);
        d += 0.5 * (g(j, l) * G(l, k) / D(j, l) - g(l, k) * G(j, l) / D(l, k));
      }
      s.A(j, k) = a;
      s.B(j, k) = b;
      s.C(j, k) = cc;
      s.D(j, k) = d;
    }
  }
  return s;
}

inline double relative_change(const RMatrix& a, const RMatrix& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace detail

/// Closed-form A, B, C, D sums over l in [2, l_max], extended by 8 levels at a
/// time until every matrix changes by less than 1e-10 relative.
inline SWCoefficients sw_coefficients(const CouplingSet& c, Index l_max = kDefaultLMax,
                                      double dispersive_threshold = kDispersiveThreshold) {
  const Index n = c.n_levels();
  if (n < 3) throw DimensionError("sw_coefficients: need at least three atomic levels");
  if (c.dispersive_ratio > dispersive_threshold) {
    throw DispersiveError("sw_coefficients: dispersive ratio " + std::to_string(c.dispersive_ratio) +
                          " exceeds threshold " + std::to_string(dispersive_threshold));
  }
  const double wc = c.omega_c;
  for (Index j = 0; j < 2; ++j) {
    for (Index l = 2; l < n; ++l) {
      if (std::abs(c.Delta(l, j)) < 1e-9 * wc * wc || std::abs(c.omega_prime_diff(l, j)) < 1e-9 * wc) {
        throw ResonanceError("sw_coefficients: vanishing denominator at levels (" + std::to_string(j) + ", " +
                             std::to_string(l) + ")");
      }
    }
  }
  l_max = std::min(l_max, n - 1);
  SWCoefficients cur = detail::sw_sums(c, l_max);
  while (l_max + 8 <= n - 1) {
    SWCoefficients next = detail::sw_sums(c, l_max + 8);
    next.change = std::max({detail::relative_change(cur.A, next.A), detail::relative_change(cur.B, next.B),
                            detail::relative_change(cur.C, next.C), detail::relative_change(cur.D, next.D)});
    cur = std::move(next);
    l_max += 8;
    if (cur.change < 1e-10) {
      cur.converged = true;
      break;
    }
  }
  return cur;
}

/// Diagonal part of the identity dropped by the two-level models.
inline double identity_offset(const CouplingSet& c, const SWCoefficients& s) {
  return 0.5 * (c.omega(0) + c.omega(1)) + (c.G(0, 0) + c.G(1, 1)) / (2.0 * c.omega_c) + s.A_plus();
}

struct SWSplit {
  CMatrix H0;  // quasi-free Hamiltonian
  CMatrix HL;  // interaction inside the two lowest atomic levels
  CMatrix HH;  // interaction coupling to / among higher levels
};

namespace detail {

inline CMatrix unit(Index n, Index j, Index k) {
  CMatrix e = CMatrix::Zero(n, n);
  e(j, k) = 1.0;
  return e;
}

inline bool in_low_block(Index j, Index k) { return j < 2 && k < 2; }

}  // namespace detail

inline SWSplit sw_split(const CouplingSet& c, Index n_a, Index n_ph) {
  if (n_a > c.n_levels()) throw DimensionError("sw_split: n_a exceeds coupling set");
  const FockSpace f(n_ph);
  const CMatrix lin = c.flavor == Flavor::cavity ? CMatrix(-kI * f.a_minus_adag()) : CMatrix(-f.a_plus_adag());
  const CMatrix id = f.identity();
  const Index dim = n_a * n_ph;
  SWSplit s{CMatrix::Zero(dim, dim), CMatrix::Zero(dim, dim), CMatrix::Zero(dim, dim)};
  s.H0 = kron(CMatrix(c.omega_prime.head(n_a).cast<cplx>().asDiagonal()), id) +
         kron(CMatrix::Identity(n_a, n_a), CMatrix(c.omega_c * f.number()));
  for (Index j = 0; j < n_a; ++j) {
    for (Index k = 0; k < n_a; ++k) {
      const bool low = detail::in_low_block(j, k);
      CMatrix term = c.g(j, k) * lin;
      if (low || j != k) term += (c.G(j, k) / c.omega_c) * id;
      (low ? s.HL : s.HH) += kron(detail::unit(n_a, j, k), term);
    }
  }
  return s;
}

/// Anti-Hermitian generator on n_a levels (x) n_ph photons. `delta_scale`
/// multiplies every Delta_jk and exists only to probe sensitivity.
inline CMatrix sw_generator(const CouplingSet& c, Index n_a, Index n_ph, double delta_scale = 1.0) {
  if (n_a > c.n_levels()) throw DimensionError("sw_generator: n_a exceeds coupling set");
  const FockSpace f(n_ph);
  const CMatrix amd = f.a_minus_adag();
  const CMatrix apd = f.a_plus_adag();
  const CMatrix id = f.identity();
  const double wc = c.omega_c;
  CMatrix s = CMatrix::Zero(n_a * n_ph, n_a * n_ph);
  for (Index j = 0; j < n_a; ++j) {
    for (Index k = 0; k < n_a; ++k) {
      if (detail::in_low_block(j, k)) continue;
      const double w = c.omega_prime_diff(j, k);
      const double delta = delta_scale * c.Delta(j, k);
      if (std::abs(delta) < 1e-12 * wc * wc) throw ResonanceError("sw_generator: vanishing Delta");
      CMatrix block = c.flavor == Flavor::cavity ? CMatrix(kI * (c.g(j, k) / delta) * (w * amd + wc * apd))
                                                 : CMatrix((c.g(j, k) / delta) * (w * apd + wc * amd));
      if (j != k) block -= (c.G(j, k) / (wc * w)) * id;
      s += kron(detail::unit(n_a, j, k), block);
    }
  }
  return s;
}

/// ||[H0', S] + H^H||_max / ||H^H||_max; zero when there is nothing to eliminate.
inline double verify_generator(const CouplingSet& c, Index n_a, Index n_ph, double delta_scale = 1.0) {
  const SWSplit split = sw_split(c, n_a, n_ph);
  const double scale = max_abs(split.HH);
  if (scale == 0.0) return 0.0;
  const CMatrix s = sw_generator(c, n_a, n_ph, delta_scale);
  return max_abs(CMatrix(commutator(split.H0, s) + split.HH)) / scale;
}

/// Second-order effective Hamiltonian by explicit matrix algebra, projected on
/// atomic {0,1} (x) n < n_ph. Two extra photon levels are carried internally so
/// products of linear terms are exact on the returned block.
inline CMatrix effective_from_sw(const CouplingSet& c, Index n_a, Index n_ph) {
  const Index pad = n_ph + 2;
  const SWSplit split = sw_split(c, n_a, pad);
  const CMatrix s = sw_generator(c, n_a, pad);
  const CMatrix heff = split.H0 + split.HL + 0.5 * commutator(split.HH, s) + commutator(split.HL, s);
  std::vector<Index> idx;
  for (Index j = 0; j < 2; ++j) {
    for (Index n = 0; n < n_ph; ++n) idx.push_back(j * pad + n);
  }
  return restrict(heff, idx);
}

/// P [H^L, S] P on the same block (vanishes identically).
inline double low_block_first_order(const CouplingSet& c, Index n_a, Index n_ph) {
  const SWSplit split = sw_split(c, n_a, n_ph);
  const CMatrix s = sw_generator(c, n_a, n_ph);
  const CompositeSpace sp = make_composite(n_a, n_ph);
  return max_abs(restrict(commutator(split.HL, s), sp.low_indices()));
}

/// max |A - B - mean(diag(A - B)) I|.
inline double distance_up_to_shift(const CMatrix& a, const CMatrix& b) {
  CMatrix d = a - b;
  const cplx shift = d.diagonal().mean();
  d.diagonal().array() -= shift;
  return max_abs(d);
}

}  // namespace rqed

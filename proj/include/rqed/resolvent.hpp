#pragma once

// Energy-dependent effective Hamiltonian on the low-energy block P:
//
//   h(E) = PHP + PHQ (E - QHQ)^-1 QHP.
//
// The series form expands (E - QHQ)^-1 = (A - B)^-1 = A^-1 sum_n (B A^-1)^n with
// A = omega0 - Q H0' Q (diagonal) and B = Q H_int Q + omega0 - E.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rqed/couplings.hpp"
#include "rqed/hilbert.hpp"

namespace rqed {

struct ResolventConfig {
  int order = -1;  // series order M, or -1 for the exact resolvent
  double omega0 = 0.0;
  int max_iter = 200;
  double tol = 1e-10;  // in units of the problem's energy scale (omega_c)
  double damping = 0.5;
  double max_jump = 0.5;  // largest accepted step, same units; 0 disables

  bool exact() const { return order < 0; }
};

struct SeriesDiagnostics {
  bool diverging = false;  // term norm grew for 3 consecutive orders
  std::vector<double> term_norms;
};

struct SelfConsistentResult {
  RVector energies;
  std::vector<bool> converged;
  std::vector<int> iterations;
  std::vector<std::string> failure;
};

class ResolventProblem {
 public:
  /// `p_idx` lists the basis states of the P block; `h0_diag` is the diagonal
  /// quasi-free energy of every basis state (used only by the series form).
  ResolventProblem(const HermitianOperator& h, std::vector<Index> p_idx, RVector h0_diag, double energy_scale)
      : scale_(energy_scale), p_idx_(std::move(p_idx)) {
    const Index dim = h.dim();
    if (h0_diag.size() != dim) throw DimensionError("ResolventProblem: h0 diagonal has wrong length");
    std::vector<bool> in_p(static_cast<std::size_t>(dim), false);
    for (Index i : p_idx_) in_p[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < dim; ++i) {
      if (!in_p[static_cast<std::size_t>(i)]) q_idx_.push_back(i);
    }
    const Index np = static_cast<Index>(p_idx_.size()), nq = static_cast<Index>(q_idx_.size());
    php_.resize(np, np);
    phq_.resize(np, nq);
    qhq_.resize(nq, nq);
    const CMatrix& m = h.matrix();
    for (Index i = 0; i < np; ++i) {
      for (Index j = 0; j < np; ++j) php_(i, j) = m(p_idx_[static_cast<std::size_t>(i)], p_idx_[static_cast<std::size_t>(j)]);
      for (Index j = 0; j < nq; ++j) phq_(i, j) = m(p_idx_[static_cast<std::size_t>(i)], q_idx_[static_cast<std::size_t>(j)]);
    }
    for (Index i = 0; i < nq; ++i) {
      for (Index j = 0; j < nq; ++j) qhq_(i, j) = m(q_idx_[static_cast<std::size_t>(i)], q_idx_[static_cast<std::size_t>(j)]);
    }
    h0_q_.resize(nq);
    for (Index i = 0; i < nq; ++i) h0_q_(i) = h0_diag(q_idx_[static_cast<std::size_t>(i)]);
    if (nq > 0) {
      Eigen::SelfAdjointEigenSolver<CMatrix> solver(qhq_);
      if (solver.info() != Eigen::Success) throw ConvergenceError("ResolventProblem: QHQ eigensolver failed");
      q_eigs_ = solver.eigenvalues();
      k_ = phq_ * solver.eigenvectors();
    }
  }

  Index p_dim() const { return static_cast<Index>(p_idx_.size()); }
  const RVector& q_eigenvalues() const { return q_eigs_; }
  double energy_scale() const { return scale_; }

  /// Nearest QHQ eigenvalue to E, if closer than 1e-9 energy_scale.
  std::optional<double> pole_near(double e) const {
    for (Index i = 0; i < q_eigs_.size(); ++i) {
      if (std::abs(e - q_eigs_(i)) < 1e-9 * scale_) return q_eigs_(i);
    }
    return std::nullopt;
  }

  HermitianOperator h_eff_exact(double e) const {
    if (auto pole = pole_near(e)) throw PoleError(e, *pole);
    CMatrix out = php_;
    if (q_eigs_.size() > 0) {
      const CVector w = (1.0 / (e - q_eigs_.array())).matrix().cast<cplx>();
      out += k_ * w.asDiagonal() * k_.adjoint();
    }
    return HermitianOperator(std::move(out));
  }

  HermitianOperator h_eff_series(double e, int order, double omega0, SeriesDiagnostics* diag = nullptr) const {
    if (order < 0) throw Error("h_eff_series: order must be non-negative");
    CMatrix out = php_;
    if (q_eigs_.size() == 0) return HermitianOperator(std::move(out));
    const RVector a = omega0 - h0_q_.array();
    if (a.cwiseAbs().minCoeff() < 1e-9 * scale_) throw ResonanceError("h_eff_series: A is singular on the Q block");
    const CVector a_inv = a.cwiseInverse().cast<cplx>();
    CMatrix b = qhq_;
    b.diagonal() -= h0_q_.cast<cplx>();
    b.diagonal().array() += omega0 - e;
    CMatrix y = a_inv.asDiagonal() * phq_.adjoint();
    CMatrix acc = y;
    int growth = 0;
    double prev = y.norm();
    if (diag) diag->term_norms.assign(1, prev);
    for (int n = 1; n <= order; ++n) {
      y = a_inv.asDiagonal() * (b * y);
      acc += y;
      const double norm = y.norm();
      growth = norm > prev ? growth + 1 : 0;
      prev = norm;
      if (diag) {
        diag->term_norms.push_back(norm);
        if (growth >= 3) diag->diverging = true;
      }
    }
    out += phq_ * acc;
    return HermitianOperator(CMatrix(0.5 * (out + out.adjoint())));
  }

  HermitianOperator h_eff(double e, const ResolventConfig& cfg) const {
    return cfg.exact() ? h_eff_exact(e) : h_eff_series(e, cfg.order, cfg.omega0);
  }

  /// Fixed point E <- eigenvalue of h(E) nearest to E, independently per seed.
  SelfConsistentResult solve_selfconsistent(const ResolventConfig& cfg, const RVector& seeds) const {
    if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw Error("solve_selfconsistent: invalid tolerance or iteration limit");
    SelfConsistentResult r;
    const Index n = seeds.size();
    r.energies = seeds;
    r.converged.assign(static_cast<std::size_t>(n), false);
    r.iterations.assign(static_cast<std::size_t>(n), 0);
    r.failure.assign(static_cast<std::size_t>(n), "");
    for (Index s = 0; s < n; ++s) {
      const auto k = static_cast<std::size_t>(s);
      double e = seeds(s);
      for (int it = 1; it <= cfg.max_iter; ++it) {
        r.iterations[k] = it;
        double next;
        try {
          next = nearest(eigvalsh(h_eff(e, cfg)), e);
        } catch (const PoleError&) {
          r.failure[k] = "pole";
          break;
        }
        double step = next - e;
        if (cfg.max_jump > 0.0 && std::abs(step) > cfg.max_jump * scale_) {
          r.failure[k] = "jump";
          break;
        }
        if (std::abs(step) < cfg.tol * scale_) {
          e = next;
          r.converged[k] = true;
          break;
        }
        int tries = 0;
        while (cfg.exact() && pole_near(e + step) && tries < 8) {
          step *= cfg.damping;
          ++tries;
        }
        if (cfg.exact() && pole_near(e + step)) {
          r.failure[k] = "pole";
          break;
        }
        e += step;
      }
      if (!r.converged[k] && r.failure[k].empty()) r.failure[k] = "max_iter";
      r.energies(s) = e;
    }
    return r;
  }

 private:
  static double nearest(const RVector& values, double e) {
    Index best = 0;
    for (Index i = 1; i < values.size(); ++i) {
      if (std::abs(values(i) - e) < std::abs(values(best) - e)) best = i;
    }
    return values(best);
  }

  double scale_;
  std::vector<Index> p_idx_;
  std::vector<Index> q_idx_;
  CMatrix php_, phq_, qhq_, k_;
  RVector h0_q_, q_eigs_;
};

/// P = atomic {0,1} (x) photons of a full model built from `c` on n_a (x) n_ph;
/// quasi-free energies omega'_j + n omega_c.
inline ResolventProblem make_resolvent(const HermitianOperator& h_full, const CouplingSet& c, Index n_a, Index n_ph) {
  if (h_full.dim() != n_a * n_ph) throw DimensionError("make_resolvent: dimension mismatch");
  RVector h0(n_a * n_ph);
  for (Index j = 0; j < n_a; ++j) {
    for (Index k = 0; k < n_ph; ++k) h0(j * n_ph + k) = c.omega_prime(j) + static_cast<double>(k) * c.omega_c;
  }
  return ResolventProblem(h_full, make_composite(n_a, n_ph).low_indices(), std::move(h0), c.omega_c);
}

inline double default_omega0(const CouplingSet& c) { return 0.5 * (c.omega_prime(0) + c.omega_prime(1)); }

}  // namespace rqed

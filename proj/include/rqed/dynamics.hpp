#pragma once

// Driven Schrodinger evolution i d/dt psi = [H + f(t) O] psi with a Gaussian
// pi-pulse envelope f(t), integrated by fixed-step RK4.

#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rqed/linalg.hpp"

namespace rqed {

using SparseC = Eigen::SparseMatrix<cplx>;

struct DriveSpec {
  double omega_dr = 0.0;
  double sigma_dr = 1.0;
  double t0 = 0.0;
  double amplitude = 0.0;
  bool variance_form = false;  // exponent denominator 2 sigma^2 instead of 2 sigma

  double envelope(double t) const {
    const double den = variance_form ? 2.0 * sigma_dr * sigma_dr : 2.0 * sigma_dr;
    return amplitude * std::exp(-(t - t0) * (t - t0) / den) * std::cos(omega_dr * t);
  }
};

/// Area-normalized pulse: amplitude pi / (sigma sqrt(2 pi)).
inline DriveSpec pi_pulse(double omega_dr, double sigma_dr, double t0, bool variance_form = false) {
  if (!(sigma_dr > 0.0)) throw Error("pi_pulse: sigma_dr must be positive");
  return {omega_dr, sigma_dr, t0, kPi / (sigma_dr * std::sqrt(2.0 * kPi)), variance_form};
}

inline std::function<CMatrix(double)> gaussian_drive(const DriveSpec& spec, const CMatrix& op) {
  return [spec, op](double t) { return CMatrix(spec.envelope(t) * op); };
}

struct EvolveOptions {
  double steps_per_period = 40.0;  // dt <= 2 pi / (steps_per_period omega_max)
  double norm_budget = 1e-8;
  Index store_every = 1;
  Index samples = 0;  // if > 0, store exactly this many intervals on a uniform grid
  bool store_states = false;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CVector> states;
  std::vector<std::pair<std::string, std::vector<double>>> observables;
  CVector final_state;
  double dt = 0.0;
  Index steps = 0;
  double norm_drift = 0.0;  // max | ||psi|| - 1 | over stored steps

  const std::vector<double>& series(const std::string& name) const {
    for (const auto& [n, v] : observables) {
      if (n == name) return v;
    }
    throw Error("Trajectory: no observable named " + name);
  }
};

inline SparseC to_sparse(const CMatrix& m) {
  SparseC s = m.sparseView(0.0, 0.0);
  s.makeCompressed();
  return s;
}

namespace detail {

inline Trajectory rk4_run(const SparseC& h, const SparseC& op, const DriveSpec& spec, const CVector& psi0, double t_end,
                          Index steps, const std::vector<std::pair<std::string, CMatrix>>& observables,
                          const EvolveOptions& opt) {
  Trajectory tr;
  tr.steps = steps;
  tr.dt = t_end / static_cast<double>(steps);
  const double dt = tr.dt;
  for (const auto& o : observables) tr.observables.emplace_back(o.first, std::vector<double>{});
  std::vector<SparseC> obs;
  for (const auto& o : observables) obs.push_back(to_sparse(o.second));

  CVector psi = psi0;
  auto record = [&](double t) {
    tr.times.push_back(t);
    for (std::size_t k = 0; k < obs.size(); ++k) tr.observables[k].second.push_back(psi.dot(obs[k] * psi).real());
    if (opt.store_states) tr.states.push_back(psi);
    tr.norm_drift = std::max(tr.norm_drift, std::abs(psi.norm() - 1.0));
  };
  auto rhs = [&](double t, const CVector& v) -> CVector {
    CVector out = h * v;
    const double f = spec.envelope(t);
    if (f != 0.0) out += f * (op * v);
    return -kI * out;
  };
  record(0.0);
  for (Index s = 0; s < steps; ++s) {
    const double t = dt * static_cast<double>(s);
    const CVector k1 = rhs(t, psi);
    const CVector k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1);
    const CVector k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2);
    const CVector k4 = rhs(t + dt, psi + dt * k3);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((s + 1) % opt.store_every == 0 || s + 1 == steps) record(dt * static_cast<double>(s + 1));
  }
  tr.final_state = psi;
  return tr;
}

}  // namespace detail

/// Evolves psi0 over [0, t_end]. The step obeys dt <= 2 pi / (40 omega_max) with
/// omega_max the largest |eigenvalue| of H. If the norm drifts by more than the
/// budget the run is repeated once with half the step, then rejected.
inline Trajectory evolve(const HermitianOperator& h, const CMatrix& drive_op, const DriveSpec& spec, const CVector& psi0,
                         double t_end, const std::vector<std::pair<std::string, CMatrix>>& observables = {},
                         EvolveOptions opt = {}) {
  if (drive_op.rows() != h.dim() || psi0.size() != h.dim()) throw DimensionError("evolve: dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-12) throw Error("evolve: initial state is not normalized");
  if (!(t_end > 0.0)) throw Error("evolve: t_end must be positive");
  if (opt.store_every < 1) opt.store_every = 1;
  const RVector e = eigvalsh(h);
  const double omega_max = std::max(e.cwiseAbs().maxCoeff(), 1e-300);
  const double dt_max = 2.0 * kPi / (opt.steps_per_period * omega_max);
  auto steps = static_cast<Index>(std::ceil(t_end / dt_max));
  if (opt.samples > 0) {
    steps = ((steps + opt.samples - 1) / opt.samples) * opt.samples;
    opt.store_every = steps / opt.samples;
  }
  const SparseC hs = to_sparse(h.matrix());
  const SparseC os = to_sparse(drive_op);
  Trajectory tr = detail::rk4_run(hs, os, spec, psi0, t_end, steps, observables, opt);
  if (tr.norm_drift > opt.norm_budget) {
    opt.store_every *= 2;
    tr = detail::rk4_run(hs, os, spec, psi0, t_end, 2 * steps, observables, opt);
    if (tr.norm_drift > opt.norm_budget) {
      throw ConvergenceError("evolve: norm drift " + sci(tr.norm_drift) + " exceeds budget after step halving");
    }
  }
  return tr;
}

/// sqrt(mean((a - b)^2)) over matching samples.
inline double trace_distance_l2(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw DimensionError("trace_distance_l2: traces differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace rqed

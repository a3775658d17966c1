#pragma once

// One-dimensional anharmonic "atoms" solved on a sinc-DVR grid: the double-well
// dipole of the cavity problem and the fluxonium of the circuit problem.
//
// Units: hbar = 1. Energies are angular frequencies. Fluxonium flux is the
// dimensionless phase phi = Phi_1 / phi_0, so the conjugate charge is n and the
// "mass" multiplying d^2/dphi^2 is 1 / (8 E_C).

#include <cmath>
#include <functional>
#include <optional>

#include "rqed/linalg.hpp"

namespace rqed {

using Potential = std::function<double(double)>;

struct GridSpec {
  Index n_points = 0;
  double half_width = 0.0;  // grid spans [-L, L]
};

struct GridMeta {
  Index n_points = 0;
  double half_width = 0.0;
  bool converged = false;
  double convergence_change = 0.0;  // relative change of the first 10 levels under n_points -> 2 n_points
  bool convergence_checked = false;
};

struct AtomSpectrum {
  Index n_levels = 0;
  double mass = 1.0;
  RVector omega;   // omega_j - omega_0, ascending, omega(0) == 0
  RMatrix x_mat;   // <j|x|k>
  RMatrix x2_mat;  // <j|x^2|k>
  double ground_energy = 0.0;  // unshifted E_0
  GridMeta grid_meta;
  RVector grid;       // DVR points
  RVector potential;  // V on the grid
  RMatrix states;     // orthonormal DVR coefficient vectors, one column per level
};

/// Colbert-Miller sinc-DVR kinetic matrix for p^2 / 2m on a uniform grid.
inline RMatrix sinc_kinetic(Index n, double dx, double mass) {
  RMatrix t(n, n);
  const double diag = kPi * kPi / (6.0 * mass * dx * dx);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) {
        t(i, j) = diag;
      } else {
        const double d = static_cast<double>(i - j);
        const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
        t(i, j) = sign / (mass * dx * dx * d * d);
      }
    }
  }
  return t;
}

/// Grid points placed symmetrically about zero so that parity is exact.
inline RVector dvr_grid(const GridSpec& g) {
  const double dx = 2.0 * g.half_width / static_cast<double>(g.n_points - 1);
  RVector x(g.n_points);
  const double center = 0.5 * static_cast<double>(g.n_points - 1);
  for (Index i = 0; i < g.n_points; ++i) x(i) = (static_cast<double>(i) - center) * dx;
  return x;
}

namespace detail {

inline RMatrix dvr_hamiltonian(double mass, const RVector& x, const RVector& v) {
  const double dx = x(1) - x(0);
  RMatrix h = sinc_kinetic(x.size(), dx, mass);
  h.diagonal() += v;
  return h;
}

inline RVector sample(const Potential& pot, const RVector& x) {
  RVector v(x.size());
  for (Index i = 0; i < x.size(); ++i) v(i) = pot(x(i));
  return v;
}

// Relative change of the lowest levels when the grid spacing is halved.
inline double refinement_change(double mass, const Potential& pot, const GridSpec& grid, const RVector& energies) {
  const GridSpec fine{2 * grid.n_points, grid.half_width};
  const RVector x = dvr_grid(fine);
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(dvr_hamiltonian(mass, x, sample(pot, x)), Eigen::EigenvaluesOnly);
  const Index k = std::min<Index>(10, energies.size());
  double scale = energies(k - 1) - energies(0);
  double change = 0.0;
  for (Index i = 0; i < k; ++i) {
    scale = std::max(scale, std::abs(energies(i)));
    change = std::max(change, std::abs(solver.eigenvalues()(i) - energies(i)));
  }
  return change / std::max(scale, 1e-300);
}

}  // namespace detail

/// Lowest `n_levels` eigenpairs of p^2/2m + V(x) on the given grid, with
/// position and squared-position matrix elements in the eigenbasis.
///
/// Eigenvector signs are fixed so that the ground state has positive sum and
/// <j-1|x|j> >= 0 whenever that element is not negligible.
inline AtomSpectrum solve_potential_1d(double mass, const Potential& pot, const GridSpec& grid, Index n_levels,
                                       bool check_convergence = true) {
  if (n_levels < 1) throw DimensionError("solve_potential_1d: n_levels must be positive");
  if (grid.n_points < 4 * n_levels) throw DimensionError("solve_potential_1d: n_points must be >= 4 n_levels");
  if (!(grid.half_width > 0.0) || !(mass > 0.0)) throw Error("solve_potential_1d: mass and half width must be positive");

  AtomSpectrum out;
  out.mass = mass;
  out.n_levels = n_levels;
  out.grid = dvr_grid(grid);
  out.potential = detail::sample(pot, out.grid);
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(detail::dvr_hamiltonian(mass, out.grid, out.potential));
  if (solver.info() != Eigen::Success) throw ConvergenceError("solve_potential_1d: eigensolver failed");

  const RVector energies = solver.eigenvalues().head(n_levels);
  RMatrix c = solver.eigenvectors().leftCols(n_levels);
  const RVector& x = out.grid;

  if (c.col(0).sum() < 0.0) c.col(0) *= -1.0;
  for (Index j = 1; j < n_levels; ++j) {
    const double xm = c.col(j - 1).dot(x.cwiseProduct(c.col(j)));
    if (std::abs(xm) > 1e-8 * grid.half_width) {
      if (xm < 0.0) c.col(j) *= -1.0;
    } else {
      const double peak = c.col(j).cwiseAbs().maxCoeff();
      Index k = 0;
      while (std::abs(c(k, j)) < 1e-3 * peak) ++k;
      if (c(k, j) < 0.0) c.col(j) *= -1.0;
    }
  }

  out.ground_energy = energies(0);
  out.omega = energies.array() - energies(0);
  out.x_mat = c.transpose() * x.asDiagonal() * c;
  out.x2_mat = c.transpose() * x.cwiseProduct(x).asDiagonal() * c;
  out.x_mat = (0.5 * (out.x_mat + out.x_mat.transpose())).eval();
  out.x2_mat = (0.5 * (out.x2_mat + out.x2_mat.transpose())).eval();
  out.states = std::move(c);
  out.grid_meta.n_points = grid.n_points;
  out.grid_meta.half_width = grid.half_width;
  if (check_convergence) {
    out.grid_meta.convergence_change = detail::refinement_change(mass, pot, grid, energies);
    out.grid_meta.converged = out.grid_meta.convergence_change < 1e-10;
    out.grid_meta.convergence_checked = true;
  }
  return out;
}

/// Picks a grid for `n_levels` levels: the box is widened until the WKB tail
/// action beyond the highest level's turning points reaches `tail_action` on
/// both sides, and the spacing resolves `resolution` times the largest
/// classical momentum.
inline GridSpec auto_grid(double mass, const Potential& pot, Index n_levels, double initial_half_width = 2.0,
                          double tail_action = 32.0, double resolution = 3.0) {
  double half_width = initial_half_width;
  double dx = half_width / 32.0;
  for (int iter = 0; iter < 60; ++iter) {
    const Index n_points =
        std::max<Index>(4 * n_levels, static_cast<Index>(std::ceil(2.0 * half_width / dx)) + 1);
    const GridSpec grid{n_points, half_width};
    const RVector x = dvr_grid(grid);
    const RVector v = detail::sample(pot, x);
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(detail::dvr_hamiltonian(mass, x, v), Eigen::EigenvaluesOnly);
    const double top = solver.eigenvalues()(n_levels - 1);

    // Tail action from each turning point outwards, on a fine trapezoid mesh.
    auto action = [&](double sign) {
      const int steps = 4000;
      const double h = half_width / steps;
      double s = 0.0;
      for (int i = 0; i < steps; ++i) {
        const double a = sign * i * h;
        const double b = sign * (i + 1) * h;
        const double fa = std::sqrt(std::max(0.0, 2.0 * mass * (pot(a) - top)));
        const double fb = std::sqrt(std::max(0.0, 2.0 * mass * (pot(b) - top)));
        // only count the region outside the outermost classically allowed point
        s = (pot(b) < top) ? 0.0 : s + 0.5 * h * (fa + fb);
      }
      return s;
    };
    const double k_max = std::sqrt(2.0 * mass * std::max(top - v.minCoeff(), 1e-300));
    const double dx_needed = kPi / (resolution * k_max);
    const bool wide = action(1.0) >= tail_action && action(-1.0) >= tail_action;
    const bool fine = dx <= dx_needed * (1.0 + 1e-12);
    const bool wasteful = dx < 0.7 * dx_needed;
    if (wide && fine && !wasteful) return grid;
    if (!wide) half_width *= 1.25;
    if (!fine || wasteful) dx = 0.95 * dx_needed;
  }
  throw ConvergenceError("auto_grid: could not find a grid satisfying the tail and resolution criteria");
}

struct DoubleWellParams {
  double m = 1.0;
  double alpha = 0.0;  // quartic coefficient
  double beta = 1.0;   // quadratic coefficient
  double gamma = 0.0;  // m beta^3 / alpha^2

  double gamma_from_coefficients() const { return m * beta * beta * beta / (alpha * alpha); }
  Potential potential() const {
    return [a = alpha, b = beta](double x) { return a * x * x * x * x - b * x * x; };
  }
};

/// beta is pinned to 1; alpha follows from the requested anharmonicity.
inline DoubleWellParams double_well_from_gamma(double gamma, double m = 1.0) {
  if (!(gamma > 0.0)) throw Error("double_well_from_gamma: gamma must be positive");
  if (!(m > 0.0)) throw Error("double_well_from_gamma: mass must be positive");
  DoubleWellParams p;
  p.m = m;
  p.beta = 1.0;
  p.alpha = std::sqrt(m * p.beta * p.beta * p.beta / gamma);
  p.gamma = gamma;
  return p;
}

inline AtomSpectrum solve_double_well(const DoubleWellParams& p, Index n_levels, std::optional<GridSpec> grid = {},
                                      bool check_convergence = true) {
  const Potential pot = p.potential();
  const GridSpec g = grid ? *grid : auto_grid(p.m, pot, n_levels);
  return solve_potential_1d(p.m, pot, g, n_levels, check_convergence);
}

inline double ghz_to_angular(double f_ghz) { return 2.0 * kPi * f_ghz; }

struct FluxoniumParams {
  double E_C = 0.0;
  double E_L = 0.0;
  double E_J = 0.0;
  double phi_ext = 0.0;

  static FluxoniumParams from_ghz(double ec, double el, double ej, double phi_ext) {
    return {ghz_to_angular(ec), ghz_to_angular(el), ghz_to_angular(ej), phi_ext};
  }
  double mass() const { return 1.0 / (8.0 * E_C); }
  Potential potential() const {
    return [el = E_L, ej = E_J, pe = phi_ext](double phi) { return 0.5 * el * phi * phi - ej * std::cos(phi - pe); };
  }
};

inline AtomSpectrum solve_fluxonium(const FluxoniumParams& p, Index n_levels, std::optional<GridSpec> grid = {},
                                    bool check_convergence = true) {
  if (!(p.E_C > 0.0 && p.E_L > 0.0 && p.E_J >= 0.0)) {
    throw Error("solve_fluxonium: E_C and E_L must be positive and E_J non-negative");
  }
  const Potential pot = p.potential();
  const GridSpec g = grid ? *grid : auto_grid(p.mass(), pot, n_levels, 4.0);
  return solve_potential_1d(p.mass(), pot, g, n_levels, check_convergence);
}

}  // namespace rqed

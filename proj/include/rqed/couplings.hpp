#pragma once

#include <cmath>

#include "rqed/atom.hpp"

namespace rqed {

enum class Flavor { cavity, circuit };

struct CouplingSet {
  Flavor flavor = Flavor::cavity;
  double omega_c = 0.0;
  RVector omega;        // bare atomic frequencies, omega(0) = 0
  RMatrix g;            // linear couplings g_jk
  RMatrix G;            // quadratic couplings G_jk
  RVector omega_prime;  // omega_j for j <= 1, omega_j + G_jj / omega_c above
  RMatrix Delta;        // (omega'_j - omega'_k)^2 - omega_c^2
  double dispersive_ratio = 0.0;  // max |g_jl| / |omega'_lj - omega_c|, j in {0,1}, l > 1
  bool dispersive_warning = false;

  Index n_levels() const { return omega.size(); }
  double omega_prime_diff(Index j, Index k) const { return omega_prime(j) - omega_prime(k); }
  double omega_bar_10() const { return omega(1) - omega(0) + (G(1, 1) - G(0, 0)) / omega_c; }
};

inline constexpr double kDispersiveThreshold = 0.5;
inline constexpr double kDispersiveWarning = 0.3;

namespace detail {

inline CouplingSet finish_couplings(Flavor flavor, const RVector& omega, double omega_c, RMatrix g, RMatrix G) {
  CouplingSet c;
  c.flavor = flavor;
  c.omega_c = omega_c;
  c.omega = omega;
  c.g = std::move(g);
  c.G = std::move(G);
  const Index n = omega.size();
  c.omega_prime = omega;
  for (Index j = 2; j < n; ++j) c.omega_prime(j) += c.G(j, j) / omega_c;
  c.Delta.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      const double w = c.omega_prime(j) - c.omega_prime(k);
      c.Delta(j, k) = w * w - omega_c * omega_c;
    }
  }
  for (Index j = 0; j < std::min<Index>(2, n); ++j) {
    for (Index l = 2; l < n; ++l) {
      if (std::abs(c.Delta(j, l)) < 1e-6 * omega_c * omega_c) {
        throw ResonanceError("couplings: level " + std::to_string(l) + " is resonant with level " + std::to_string(j) +
                             " plus one photon");
      }
      const double ratio = std::abs(c.g(j, l)) / std::abs(c.omega_prime(l) - c.omega_prime(j) - omega_c);
      c.dispersive_ratio = std::max(c.dispersive_ratio, ratio);
    }
  }
  c.dispersive_warning = c.dispersive_ratio > kDispersiveWarning;
  return c;
}

inline void check_atom(const AtomSpectrum& atom, Index n_levels) {
  if (n_levels < 2 || n_levels > atom.n_levels) throw DimensionError("couplings: n_levels out of range for atom");
}

}  // namespace detail

/// Dipole-gauge couplings g = omega_c q A0 x, G = (omega_c q A0)^2 x^2.
inline CouplingSet cavity_couplings(const AtomSpectrum& atom, double omega_c, double A0, double q = 1.0,
                                    Index n_levels = -1) {
  if (!(omega_c > 0.0)) throw Error("cavity_couplings: omega_c must be positive");
  if (n_levels < 0) n_levels = atom.n_levels;
  detail::check_atom(atom, n_levels);
  const double s = omega_c * q * A0;
  RMatrix g = s * atom.x_mat.topLeftCorner(n_levels, n_levels);
  RMatrix G = s * s * atom.x2_mat.topLeftCorner(n_levels, n_levels);
  return detail::finish_couplings(Flavor::cavity, atom.omega.head(n_levels), omega_c, std::move(g), std::move(G));
}

inline double a0_from_target_g(double g_target, double omega_c, double q, double x01) {
  if (std::abs(x01) < 1e-14) throw Error("a0_from_target_g: x01 vanishes, transition is forbidden");
  return g_target / (omega_c * q * std::abs(x01));
}

/// Zero-point flux of the LC resonator with C2 = 1 / (L2 omega_c^2).
inline double phi_zpf(double omega_c, double L2) {
  const double c2 = 1.0 / (L2 * omega_c * omega_c);
  return std::sqrt(1.0 / (2.0 * c2 * omega_c));
}

/// Fluxonium-resonator couplings g = phi_zpf phi_jk / L2, G = omega_c Phi_jk / (2 L2).
inline CouplingSet circuit_couplings(const AtomSpectrum& atom, double omega_c, double L2, Index n_levels = -1) {
  if (!(omega_c > 0.0) || !(L2 > 0.0)) throw Error("circuit_couplings: omega_c and L2 must be positive");
  if (n_levels < 0) n_levels = atom.n_levels;
  detail::check_atom(atom, n_levels);
  RMatrix g = (phi_zpf(omega_c, L2) / L2) * atom.x_mat.topLeftCorner(n_levels, n_levels);
  RMatrix G = (omega_c / (2.0 * L2)) * atom.x2_mat.topLeftCorner(n_levels, n_levels);
  return detail::finish_couplings(Flavor::circuit, atom.omega.head(n_levels), omega_c, std::move(g), std::move(G));
}

/// Inductance giving |g_01| = g_target.
inline double l2_from_target_g(double g_target, double omega_c, double phi01) {
  if (std::abs(phi01) < 1e-14) throw Error("l2_from_target_g: phi01 vanishes, transition is forbidden");
  if (!(g_target > 0.0)) throw Error("l2_from_target_g: target coupling must be positive");
  return omega_c * phi01 * phi01 / (2.0 * g_target * g_target);
}

}  // namespace rqed

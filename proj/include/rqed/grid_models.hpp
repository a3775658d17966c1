#pragma once

// Full light-matter Hamiltonians written directly on the DVR grid (x) Fock
// space, without passing through the atomic eigenbasis. theta = q A0 so that
// g_jk = omega_c theta x_jk.
//
//   H^(eta) = U^(1-eta) H_a U^(1-eta)^dag + U^(eta)^dag H_ph U^(eta),
//   U^(eta) = exp(i eta theta x (a + a^dag)).
//
// eta = 1 is the dipole gauge, eta = 0 the Coulomb gauge (p - q A)^2 / 2m.

#include <cmath>

#include "rqed/atom.hpp"
#include "rqed/hilbert.hpp"

namespace rqed {

namespace detail {

inline void check_grid_atom(const AtomSpectrum& atom) {
  if (atom.grid.size() < 2 || atom.potential.size() != atom.grid.size()) {
    throw DimensionError("grid model: atom spectrum carries no grid");
  }
}

inline RMatrix grid_kinetic(const AtomSpectrum& atom) {
  return sinc_kinetic(atom.grid.size(), atom.grid(1) - atom.grid(0), atom.mass);
}

// omega_c (N - i lam (a - a^dag) + lam^2) for lam = eta theta x_i on each grid point.
inline void add_photon_blocks(CMatrix& h, const AtomSpectrum& atom, double theta, double omega_c, double eta,
                              const FockSpace& f) {
  const Index n_ph = f.dim();
  const CMatrix amd = f.a_minus_adag();
  for (Index i = 0; i < atom.grid.size(); ++i) {
    const double lam = eta * theta * atom.grid(i);
    auto block = h.block(i * n_ph, i * n_ph, n_ph, n_ph);
    block += omega_c * (f.number() - kI * lam * amd + lam * lam * f.identity());
    block.diagonal().array() += atom.potential(i);
  }
}

}  // namespace detail

/// Dipole gauge on the grid: H_a (x) 1 + omega_c N - i omega_c theta x (a - a^dag) + omega_c theta^2 x^2.
inline HermitianOperator full_dipole_grid(const AtomSpectrum& atom, double theta, double omega_c, Index n_ph) {
  detail::check_grid_atom(atom);
  const FockSpace f(n_ph);
  const Index n_g = atom.grid.size();
  CMatrix h = kron(detail::grid_kinetic(atom).cast<cplx>(), f.identity());
  detail::add_photon_blocks(h, atom, theta, omega_c, 1.0, f);
  return HermitianOperator(std::move(h), {n_g, n_ph});
}

/// Coulomb gauge on the grid: kinetic blocks T_ij D(i theta (x_i - x_j)) with
/// the displacement matrix elements evaluated analytically.
inline HermitianOperator full_coulomb_grid(const AtomSpectrum& atom, double theta, double omega_c, Index n_ph) {
  detail::check_grid_atom(atom);
  const FockSpace f(n_ph);
  const Index n_g = atom.grid.size();
  const RMatrix t = detail::grid_kinetic(atom);
  CMatrix h = CMatrix::Zero(n_g * n_ph, n_g * n_ph);
  for (Index i = 0; i < n_g; ++i) {
    for (Index j = 0; j < n_g; ++j) {
      h.block(i * n_ph, j * n_ph, n_ph, n_ph) = t(i, j) * f.displacement(kI * theta * (atom.grid(i) - atom.grid(j)));
    }
  }
  detail::add_photon_blocks(h, atom, theta, omega_c, 0.0, f);
  return HermitianOperator(std::move(h), {n_g, n_ph});
}

/// Gauge-interpolated full Hamiltonian. The atomic conjugation is formed with
/// exponentials of (a + a^dag) in a Fock space enlarged by `pad` levels and
/// then truncated to n_ph.
inline HermitianOperator full_eta_grid(const AtomSpectrum& atom, double theta, double omega_c, Index n_ph, double eta,
                                       Index pad = 100) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error("full_eta_grid: eta must lie in [0, 1]");
  detail::check_grid_atom(atom);
  const FockSpace f(n_ph);
  const FockSpace big(n_ph + pad);
  const Index n_g = atom.grid.size();
  const RMatrix t = detail::grid_kinetic(atom);
  Eigen::SelfAdjointEigenSolver<CMatrix> quad(big.a_plus_adag());
  const CMatrix w = quad.eigenvectors().topRows(n_ph);
  const RVector mu = quad.eigenvalues();
  CMatrix h = CMatrix::Zero(n_g * n_ph, n_g * n_ph);
  for (Index i = 0; i < n_g; ++i) {
    for (Index j = i; j < n_g; ++j) {
      const double phase = (1.0 - eta) * theta * (atom.grid(i) - atom.grid(j));
      const CVector d = (kI * phase * mu.cast<cplx>()).array().exp().matrix();
      const CMatrix block = t(i, j) * (w * d.asDiagonal() * w.adjoint());
      h.block(i * n_ph, j * n_ph, n_ph, n_ph) = block;
      if (j != i) h.block(j * n_ph, i * n_ph, n_ph, n_ph) = block.adjoint();
    }
  }
  detail::add_photon_blocks(h, atom, theta, omega_c, eta, f);
  return HermitianOperator(std::move(h), {n_g, n_ph});
}

/// Two-level model obtained by projecting H^(eta) on the two lowest bare atomic
/// states (x) the full photon space; rows ordered atom-major.
inline HermitianOperator projected_two_level(const HermitianOperator& h_grid, const AtomSpectrum& atom, Index n_ph) {
  const Index n_g = atom.grid.size();
  if (h_grid.dim() != n_g * n_ph) throw DimensionError("projected_two_level: dimension mismatch");
  const CMatrix c2 = atom.states.leftCols(2).cast<cplx>();
  const CMatrix v = kron(c2, CMatrix::Identity(n_ph, n_ph));
  return HermitianOperator(CMatrix(v.adjoint() * h_grid.matrix() * v), {2, n_ph});
}

}  // namespace rqed

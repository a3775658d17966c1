#pragma once

// Full and truncated light-matter Hamiltonians. Full models live on
// n_a atomic levels (x) n_ph photons; two-level models on 2 (x) n_ph.

#include <cmath>
#include <string>

#include "rqed/sw.hpp"

namespace rqed {

enum class ModelTag {
  FULL_DIPOLE,
  FULL_COULOMB,
  FULL_ETA,
  CIRCUIT_FULL,
  QRM_D,
  RQRM,
  RQRM_SIMPLE,
  RQRM_BOGO,
  QRM_GI,
  RQRM_GI,
  CIRCUIT_QRM,
  CIRCUIT_RQRM,
  QRM_ETA,
};

inline std::string model_name(ModelTag t) {
  switch (t) {
    case ModelTag::FULL_DIPOLE: return "full";
    case ModelTag::FULL_COULOMB: return "full_coulomb";
    case ModelTag::FULL_ETA: return "full_eta";
    case ModelTag::CIRCUIT_FULL: return "circuit_full";
    case ModelTag::QRM_D: return "qrm";
    case ModelTag::RQRM: return "rqrm";
    case ModelTag::RQRM_SIMPLE: return "rqrm_simple";
    case ModelTag::RQRM_BOGO: return "rqrm_bogo";
    case ModelTag::QRM_GI: return "qrm_gi";
    case ModelTag::RQRM_GI: return "rqrm_gi";
    case ModelTag::CIRCUIT_QRM: return "circuit_qrm";
    case ModelTag::CIRCUIT_RQRM: return "circuit_rqrm";
    case ModelTag::QRM_ETA: return "qrm_eta";
  }
  return "unknown";
}

namespace detail {

inline void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error("gauge parameter eta must lie in [0, 1]");
}

inline void check_flavor(const CouplingSet& c, Flavor f, const char* who) {
  if (c.flavor != f) throw Error(std::string(who) + ": wrong coupling flavor");
}

inline HermitianOperator two_level(CMatrix m, Index n_ph) { return HermitianOperator(std::move(m), {2, n_ph}); }

// Atomic diagonal, photon energy and the quadratic term shared by both flavors.
inline CMatrix full_common(const CouplingSet& c, Index n_a, const FockSpace& f) {
  if (n_a < 2 || n_a > c.n_levels()) throw DimensionError("full model: n_a out of range");
  const CMatrix id = f.identity();
  CMatrix h = kron(CMatrix(c.omega.head(n_a).cast<cplx>().asDiagonal()), id) +
              kron(CMatrix::Identity(n_a, n_a), CMatrix(c.omega_c * f.number()));
  h += kron(CMatrix(c.G.topLeftCorner(n_a, n_a).cast<cplx>() / c.omega_c), id);
  return h;
}

}  // namespace detail

/// sum_j omega_j |j><j| + omega_c a^dag a - i sum g_jk |j><k| (a - a^dag) + sum G_jk / omega_c |j><k|
inline HermitianOperator build_full_dipole(const CouplingSet& c, Index n_a, Index n_ph) {
  const FockSpace f(n_ph);
  CMatrix h = detail::full_common(c, n_a, f);
  h += kron(CMatrix(c.g.topLeftCorner(n_a, n_a).cast<cplx>()), CMatrix(-kI * f.a_minus_adag()));
  return HermitianOperator(std::move(h), {n_a, n_ph});
}

/// sum_j omega_j |j><j| + omega_c a^dag a - sum g_jk |j><k| (a + a^dag) + sum G_jk / omega_c |j><k|
inline HermitianOperator build_circuit_full(const CouplingSet& c, Index n_a, Index n_ph) {
  const FockSpace f(n_ph);
  CMatrix h = detail::full_common(c, n_a, f);
  h -= kron(CMatrix(c.g.topLeftCorner(n_a, n_a).cast<cplx>()), f.a_plus_adag());
  return HermitianOperator(std::move(h), {n_a, n_ph});
}

/// T H T^dag with T = 1 (x) exp(i pi a^dag a / 2); maps a -> -i a.
inline HermitianOperator rotate_quarter(const HermitianOperator& h) {
  const auto& dims = h.factor_dims();
  const Index n_ph = dims.back();
  const Index outer = h.dim() / n_ph;
  CVector t(h.dim());
  const cplx phases[4] = {1.0, kI, -1.0, -kI};
  for (Index o = 0; o < outer; ++o) {
    for (Index n = 0; n < n_ph; ++n) t(o * n_ph + n) = phases[n % 4];
  }
  CMatrix m = t.asDiagonal() * h.matrix() * t.conjugate().asDiagonal();
  return HermitianOperator(std::move(m), dims);
}

/// (omega_bar_10 / 2) sigma_z + omega_c a^dag a - i g_01 sigma_x (a - a^dag)
inline HermitianOperator build_qrm_dipole(const CouplingSet& c, Index n_ph) {
  detail::check_flavor(c, Flavor::cavity, "build_qrm_dipole");
  const FockSpace f(n_ph);
  CMatrix h = kron(pauli::z(), CMatrix(0.5 * c.omega_bar_10() * f.identity())) +
              kron(pauli::identity(), CMatrix(c.omega_c * f.number())) +
              kron(pauli::x(), CMatrix(-kI * c.g(0, 1) * f.a_minus_adag()));
  return detail::two_level(std::move(h), n_ph);
}

inline double omega_tilde_10(const CouplingSet& c, const SWCoefficients& s) { return c.omega_bar_10() + 2.0 * s.A_minus(); }
inline double g_tilde_01(const CouplingSet& c, const SWCoefficients& s) { return c.g(0, 1) + s.C(0, 1); }

namespace detail {

inline CMatrix rqrm_matrix(const CouplingSet& c, const SWCoefficients& s, Index n_ph, bool simplified) {
  check_flavor(c, Flavor::cavity, "build_rqrm");
  const FockSpace f(n_ph);
  const double b_minus = simplified ? 0.0 : s.B_minus();
  CMatrix h = kron(pauli::z(), CMatrix(0.5 * omega_tilde_10(c, s) * f.identity())) +
              kron(pauli::identity(), CMatrix(c.omega_c * f.number())) +
              kron(CMatrix(s.B_plus() * pauli::identity() + b_minus * pauli::z()), f.minus_squared()) +
              kron(pauli::x(), CMatrix(-kI * g_tilde_01(c, s) * f.a_minus_adag()));
  if (!simplified) h -= kron(pauli::y(), CMatrix(s.D(0, 1) * f.a_plus_adag()));
  return h;
}

}  // namespace detail

/// (omega~_10/2) sigma_z + omega_c a^dag a + (B+ + B- sigma_z)(a - a^dag)^2
///   - i g~_01 sigma_x (a - a^dag) - D_01 sigma_y (a + a^dag)
inline HermitianOperator build_rqrm(const CouplingSet& c, const SWCoefficients& s, Index n_ph) {
  return detail::two_level(detail::rqrm_matrix(c, s, n_ph, false), n_ph);
}

/// build_rqrm without the B- and D_01 terms.
inline HermitianOperator build_rqrm_simplified(const CouplingSet& c, const SWCoefficients& s, Index n_ph) {
  return detail::two_level(detail::rqrm_matrix(c, s, n_ph, true), n_ph);
}

inline double bogoliubov_frequency(double omega_c, double b_plus) {
  const double disc = omega_c * omega_c - 4.0 * b_plus * omega_c;
  if (!(disc > 0.0)) throw InstabilityError("bogoliubov: omega_c^2 - 4 B+ omega_c <= 0");
  return std::sqrt(disc);
}

struct BogoliubovModel {
  HermitianOperator H;
  double omega_c_tilde = 0.0;
  double quadrature_scale = 1.0;  // a + a^dag = quadrature_scale (b + b^dag)
};

/// (omega~_10/2) sigma_z + omega~_c b^dag b - i g~_01 sqrt(omega_c/omega~_c) sigma_x (b - b^dag)
inline BogoliubovModel bogoliubov_rqrm(const CouplingSet& c, const SWCoefficients& s, Index n_ph) {
  detail::check_flavor(c, Flavor::cavity, "bogoliubov_rqrm");
  const double wt = bogoliubov_frequency(c.omega_c, s.B_plus());
  const FockSpace f(n_ph);
  const double coupling = g_tilde_01(c, s) * std::sqrt(c.omega_c / wt);
  CMatrix h = kron(pauli::z(), CMatrix(0.5 * omega_tilde_10(c, s) * f.identity())) +
              kron(pauli::identity(), CMatrix(wt * f.number())) +
              kron(pauli::x(), CMatrix(-kI * coupling * f.a_minus_adag()));
  return {detail::two_level(std::move(h), n_ph), wt, std::sqrt(wt / c.omega_c)};
}

/// U^(1-eta) H_a U^(1-eta)^dag + U^(eta)^dag H_ph U^(eta), U^(eta) = exp(i eta lambda sigma_x (a + a^dag)).
/// Standard: lambda = g_01 / omega_c, H_a = (omega_10/2) sigma_z, H_ph = omega_c a^dag a.
/// Renormalized: lambda = (g~_01/omega~_c) sqrt(omega_c/omega~_c), H_a = (omega~_10/2) sigma_z,
/// H_ph = omega~_c b^dag b.
inline HermitianOperator build_gauge_truncated(double eta, const CouplingSet& c, bool renormalized, const SWCoefficients& s,
                                               Index n_ph) {
  detail::check_eta(eta);
  const FockSpace f(n_ph);
  double lambda, w10, wph;
  if (renormalized) {
    wph = bogoliubov_frequency(c.omega_c, s.B_plus());
    lambda = g_tilde_01(c, s) / wph * std::sqrt(c.omega_c / wph);
    w10 = omega_tilde_10(c, s);
  } else {
    wph = c.omega_c;
    lambda = c.g(0, 1) / c.omega_c;
    w10 = c.omega(1) - c.omega(0);
  }
  const HermitianOperator gen(kron(pauli::x(), f.a_plus_adag()), {2, n_ph});
  const CMatrix ha = kron(pauli::z(), CMatrix(0.5 * w10 * f.identity()));
  const CMatrix hph = kron(pauli::identity(), CMatrix(wph * f.number()));
  const CMatrix u_a = unitary_from_hermitian(gen, (1.0 - eta) * lambda);
  const CMatrix u_ph = unitary_from_hermitian(gen, eta * lambda);
  CMatrix h = u_a * ha * u_a.adjoint() + u_ph.adjoint() * hph * u_ph;
  return detail::two_level(std::move(h), n_ph);
}

/// omega_c a^dag a + (omega_bar_10/2) sigma_z + (G_01/omega_c) sigma_x
///   - [(g11+g00)/2 + (g11-g00)/2 sigma_z + g01 sigma_x](a + a^dag)
inline HermitianOperator build_circuit_qrm(const CouplingSet& c, Index n_ph) {
  detail::check_flavor(c, Flavor::circuit, "build_circuit_qrm");
  const FockSpace f(n_ph);
  const CMatrix atom = 0.5 * c.omega_bar_10() * pauli::z() + (c.G(0, 1) / c.omega_c) * pauli::x();
  const CMatrix lin = 0.5 * (c.g(1, 1) + c.g(0, 0)) * pauli::identity() + 0.5 * (c.g(1, 1) - c.g(0, 0)) * pauli::z() +
                      c.g(0, 1) * pauli::x();
  CMatrix h = kron(pauli::identity(), CMatrix(c.omega_c * f.number())) + kron(atom, f.identity()) -
              kron(lin, f.a_plus_adag());
  return detail::two_level(std::move(h), n_ph);
}

/// Renormalized circuit two-level model.
inline HermitianOperator build_circuit_rqrm(const CouplingSet& c, const SWCoefficients& s, Index n_ph) {
  detail::check_flavor(c, Flavor::circuit, "build_circuit_rqrm");
  const FockSpace f(n_ph);
  const RMatrix gt = c.g.topLeftCorner(2, 2) + s.C;
  const CMatrix atom = (0.5 * c.omega_bar_10() + s.A_minus()) * pauli::z() +
                       (c.G(0, 1) / c.omega_c + s.A(1, 0) + s.A(0, 1)) * pauli::x();
  const CMatrix lin = 0.5 * (gt(1, 1) + gt(0, 0)) * pauli::identity() + 0.5 * (gt(1, 1) - gt(0, 0)) * pauli::z() +
                      gt(0, 1) * pauli::x();
  const CMatrix quad = s.B_plus() * pauli::identity() + s.B_minus() * pauli::z() + 2.0 * s.B(0, 1) * pauli::x();
  CMatrix h = kron(pauli::identity(), CMatrix(c.omega_c * f.number())) + kron(atom, f.identity()) -
              kron(lin, f.a_plus_adag()) - kron(quad, f.plus_squared());
  h -= kron(pauli::y(), CMatrix(kI * (s.A(1, 0) - s.A(0, 1)) * (f.a_squared() - f.adag_squared())));
  h += kron(pauli::y(), CMatrix(kI * s.D(0, 1) * f.a_minus_adag()));
  return detail::two_level(std::move(h), n_ph);
}

}  // namespace rqed

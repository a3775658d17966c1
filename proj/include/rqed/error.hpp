#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace rqed {

// Base class for every failure raised by the library. Callers that only care
// about "something went wrong numerically" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public Error {
 public:
  NotHermitianError(double asymmetry, double scale)
      : Error("matrix is not Hermitian: max |H_ij - conj(H_ji)| = " + sci(asymmetry) +
              " (scale " + sci(scale) + ")"),
        asymmetry_(asymmetry) {}
  double asymmetry() const { return asymmetry_; }

 private:
  double asymmetry_;
};

class NotPsdError : public Error {
 public:
  explicit NotPsdError(double min_eigenvalue)
      : Error("matrix is not positive semidefinite: min eigenvalue " + sci(min_eigenvalue)),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

// Vanishing Schrieffer-Wolff denominators (Delta_jl or omega'_jl).
class ResonanceError : public Error {
 public:
  using Error::Error;
};

// High atomic levels are not dispersive with respect to the resonator.
class DispersiveError : public Error {
 public:
  using Error::Error;
};

// omega_c <= 4 B_+: the squeezing transform has no real frequency.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

// E collides with an eigenvalue of the complementary block.
class PoleError : public Error {
 public:
  PoleError(double energy, double pole)
      : Error("resolvent pole: E = " + sci(energy) + " is within tolerance of QHQ eigenvalue " +
              sci(pole)),
        energy_(energy),
        pole_(pole) {}
  double energy() const { return energy_; }
  double pole() const { return pole_; }

 private:
  double energy_;
  double pole_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace rqed

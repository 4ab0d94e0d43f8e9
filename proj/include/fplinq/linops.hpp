#pragma once
//
// Small dense kernel used by the FP updates: Hermitian PSD values, principal
// square roots, regularized solves and a monotone scalar bisection.
//

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "fplinq/errors.hpp"

namespace fplinq::linops {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

struct Tolerance {
  static constexpr double hermitian = 1e-9;   // relative to max |entry|
  static constexpr double psd = 1e-8;         // relative to largest eigenvalue
  static constexpr double reconstruction = 1e-9;
};

/// Hermitian positive semidefinite matrix. The stored value is exactly
/// Hermitian; construction either validates (`checked`) or trusts the caller
/// and only symmetrizes (`symmetrized`).
class HermitianPSD {
 public:
  HermitianPSD() = default;

  /// Validates Hermitian symmetry and PSD-ness. Throws Error(NotHermitian) or
  /// Error(NotPSD).
  static HermitianPSD checked(const ComplexMatrix& m);

  /// For values that are PSD by construction (X^H B^{-1} X and the like).
  static HermitianPSD symmetrized(const ComplexMatrix& m);

  static HermitianPSD identity(Eigen::Index dim);
  static HermitianPSD zero(Eigen::Index dim);

  Eigen::Index dim() const { return value_.rows(); }
  const ComplexMatrix& matrix() const { return value_; }
  operator const ComplexMatrix&() const { return value_; }

 private:
  explicit HermitianPSD(ComplexMatrix m) : value_(std::move(m)) {}
  ComplexMatrix value_;
};

/// (M + M^H) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

bool is_finite(const ComplexMatrix& m);

/// Relative Hermitian asymmetry ||M - M^H||_max / max(1, ||M||_max).
double hermitian_defect(const ComplexMatrix& m);

/// Eigenvalues (ascending) of the Hermitian part of `m`.
RealVector hermitian_eigenvalues(const ComplexMatrix& m);

/// Principal square root S (Hermitian PSD, S S^H = M). Eigenvalues in
/// [-tol * lambda_max, 0) are clamped to zero.
ComplexMatrix hermitian_sqrt(const HermitianPSD& m);

/// (B + ridge I)^{-1} X. Throws Error(Singular) when the shifted matrix is not
/// numerically positive definite.
ComplexMatrix psd_solve(const HermitianPSD& b, const ComplexMatrix& x, double ridge = 0.0);

/// Same as psd_solve but takes a matrix that the caller guarantees to be
/// Hermitian PSD (hot path of the schedulers).
ComplexMatrix psd_solve_unchecked(const ComplexMatrix& b, const ComplexMatrix& x, double ridge = 0.0);

/// log det of a Hermitian positive definite matrix (natural log).
double log_det_hpd(const ComplexMatrix& m);

/// Real part of the trace.
inline double real_trace(const ComplexMatrix& m) { return m.trace().real(); }

/// tr(A^H B), computed without forming the product.
inline double real_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

struct BisectionOptions {
  double tol = 1e-10;        // relative tolerance on the power
  int max_doublings = 200;   // bracket search, starting from mu = 1
  int max_iterations = 400;  // bisection steps once bracketed
};

/// Smallest mu >= 0 with power_of_mu(mu) <= p_max, for a nonincreasing
/// power_of_mu. Returns 0 when the constraint is inactive; otherwise the
/// returned mu satisfies p_max (1 - tol) <= power_of_mu(mu) <= p_max.
/// Throws Error(NoBracket) if no feasible upper bracket is found.
double bisect_multiplier(const std::function<double(double)>& power_of_mu, double p_max,
                         const BisectionOptions& opts = {});

}  // namespace fplinq::linops

#pragma once
//
// Scalar and matrix fractional-programming transforms.
//
// A matrix ratio between A (PSD) and B (PD) is sqrt(A)^H B^{-1} sqrt(A), where
// sqrt(A) is any factor with sqrt(A) sqrt(A)^H = A. The quadratic transform
// decouples numerator and denominator with an auxiliary Y; the Lagrangian dual
// transform moves the ratio out of the log-det with an auxiliary Gamma. Each
// transform comes with its closed-form auxiliary optimizer.
//

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "fplinq/linops.hpp"

namespace fplinq::fp {

using linops::ComplexMatrix;
using linops::HermitianPSD;

struct ScalarFraction {
  double numerator = 0.0;    // A >= 0
  double denominator = 1.0;  // B > 0
  double weight = 1.0;       // w >= 0

  void validate() const;
  double ratio() const { return numerator / denominator; }
};

/// sqrt(A) is n x d (d = number of streams, d = n in the square case).
struct MatrixFraction {
  ComplexMatrix sqrt_numerator;
  HermitianPSD denominator;
  double weight = 1.0;

  void validate() const;
  ComplexMatrix numerator() const { return sqrt_numerator * sqrt_numerator.adjoint(); }
  Eigen::Index streams() const { return sqrt_numerator.cols(); }
};

// ---- scalar transforms -----------------------------------------------------

/// 2 y sqrt(A) - y^2 B.
double scalar_quadratic_value(const ScalarFraction& f, double y);
/// sqrt(A) / B.
double scalar_quadratic_opt_y(const ScalarFraction& f);

struct BensonPair {
  double u = 0.0;
  double v = 0.0;
};
/// 2 u sqrt(A) - v B, meaningful when u^2 <= v.
double benson_value(const ScalarFraction& f, const BensonPair& p);
/// Maximizer of benson_value subject to u^2 <= v: (sqrt(A)/B, A/B^2).
BensonPair benson_opt(const ScalarFraction& f);

/// w log(1+gamma) - w gamma + (1+gamma) w A / (A+B).
double scalar_lagrangian_value(const ScalarFraction& f, double gamma);
/// A / B.
double scalar_lagrangian_opt_gamma(const ScalarFraction& f);

// ---- matrix transforms -----------------------------------------------------

/// The matrix ratio sqrt(A)^H B^{-1} sqrt(A).
HermitianPSD matrix_ratio(const MatrixFraction& f);

/// w log|I + sqrt(A)^H B^{-1} sqrt(A)|.
double weighted_log_det_ratio(const MatrixFraction& f);

/// 2 Re{sqrt(A)^H Y} - Y^H B Y, i.e. sqrt(A)^H Y + Y^H sqrt(A) - Y^H B Y.
/// Exactly Hermitian but not necessarily PSD away from the optimum.
ComplexMatrix matrix_quadratic_value(const MatrixFraction& f, const ComplexMatrix& y);
/// Y* = B^{-1} sqrt(A).
ComplexMatrix matrix_quadratic_opt_y(const MatrixFraction& f);

/// w (log|I+Gamma| - tr(Gamma) + tr((I+Gamma) sqrt(A)^H (A+B)^{-1} sqrt(A))).
double matrix_lagrangian_value(const MatrixFraction& f, const HermitianPSD& gamma);
/// Gamma* = sqrt(A)^H B^{-1} sqrt(A).
HermitianPSD matrix_lagrangian_opt_gamma(const MatrixFraction& f);

/// Joint transform: w log|I+Gamma| - w tr(Gamma)
///   + tr((I+Gamma)(2 sqrt(w) sqrt(A)^H Y - Y^H (A+B) Y)).
double joint_fq_value(const MatrixFraction& f, const HermitianPSD& gamma, const ComplexMatrix& y);
/// Y* of the joint transform: (A+B)^{-1} sqrt(w) sqrt(A).
ComplexMatrix joint_opt_y(const MatrixFraction& f);

// ---- monotone matrix functions ----------------------------------------------

/// The two nondecreasing matrix functions used with the quadratic transform:
/// Z -> tr(W Z) for a PSD weight W, and Z -> log|I + Z|.
class MonotoneMatrixFunction {
 public:
  static MonotoneMatrixFunction trace_weighted(HermitianPSD weight);
  static MonotoneMatrixFunction log_det();

  /// log_det returns -inf when I + Z is not positive definite.
  double operator()(const ComplexMatrix& z) const;

 private:
  enum class Form { TraceWeighted, LogDet };
  MonotoneMatrixFunction(Form form, HermitianPSD weight) : form_(form), weight_(std::move(weight)) {}
  Form form_;
  HermitianPSD weight_;
};

// ---- surrogate certification ------------------------------------------------

struct SurrogateReport {
  std::size_t pairs_checked = 0;
  std::size_t anchors_checked = 0;
  std::size_t c1_violations = 0;      // g(x|anchor) > f(x) + tau
  std::size_t c2_violations = 0;      // |g(anchor|anchor) - f(anchor)| > tau
  double max_c1_excess = -std::numeric_limits<double>::infinity();  // max of g - f
  double max_c2_gap = 0.0;

  bool certified() const { return c1_violations == 0 && c2_violations == 0; }
};

/// Checks the minorization conditions C1 (over anchors x probes) and C2 (over
/// anchors) for a candidate surrogate g(x | anchor) of f. Violations are
/// reported, never thrown; a NaN surrogate value counts as a violation.
template <class X>
SurrogateReport certify_surrogate(const std::function<double(const X&)>& f,
                                  const std::function<double(const X&, const X&)>& g,
                                  std::span<const X> anchors, std::span<const X> probes,
                                  double tau) {
  SurrogateReport report;
  std::vector<double> f_probe;
  f_probe.reserve(probes.size());
  for (const X& x : probes) f_probe.push_back(f(x));

  for (const X& anchor : anchors) {
    const double gap = std::abs(g(anchor, anchor) - f(anchor));
    ++report.anchors_checked;
    if (!(gap <= tau)) ++report.c2_violations;
    if (!(gap <= report.max_c2_gap)) report.max_c2_gap = gap;

    for (std::size_t k = 0; k < probes.size(); ++k) {
      const double excess = g(probes[k], anchor) - f_probe[k];
      ++report.pairs_checked;
      if (!(excess <= tau)) ++report.c1_violations;
      if (!(excess <= report.max_c1_excess)) report.max_c1_excess = excess;
    }
  }
  return report;
}

}  // namespace fplinq::fp

#include "fplinq/fp_transforms.hpp"

#include <cmath>
#include <sstream>

namespace fplinq::fp {

using linops::log_det_hpd;
using linops::psd_solve;
using linops::psd_solve_unchecked;
using linops::real_trace;

void ScalarFraction::validate() const {
  if (!(numerator >= 0.0) || !(denominator > 0.0) || !(weight >= 0.0)) {
    std::ostringstream os;
    os << "ScalarFraction requires A >= 0, B > 0, w >= 0 (got A=" << numerator
       << ", B=" << denominator << ", w=" << weight << ")";
    throw Error(Errc::InvalidArgument, os.str());
  }
}

void MatrixFraction::validate() const {
  if (sqrt_numerator.rows() != denominator.dim()) {
    throw Error(Errc::DimensionMismatch, "MatrixFraction: sqrt(A) rows must match B");
  }
  if (!(weight >= 0.0)) throw Error(Errc::InvalidArgument, "MatrixFraction: negative weight");
  const auto ev = linops::hermitian_eigenvalues(denominator.matrix());
  if (ev.size() > 0 && !(ev.minCoeff() > 0.0)) {
    throw Error(Errc::NotPSD, "MatrixFraction: denominator is not positive definite");
  }
}

double scalar_quadratic_value(const ScalarFraction& f, double y) {
  return 2.0 * y * std::sqrt(f.numerator) - y * y * f.denominator;
}

double scalar_quadratic_opt_y(const ScalarFraction& f) {
  f.validate();
  return std::sqrt(f.numerator) / f.denominator;
}

double benson_value(const ScalarFraction& f, const BensonPair& p) {
  return 2.0 * p.u * std::sqrt(f.numerator) - p.v * f.denominator;
}

BensonPair benson_opt(const ScalarFraction& f) {
  // For fixed u the objective decreases in v, so v = u^2; what is left is the
  // quadratic transform in u.
  const double u = scalar_quadratic_opt_y(f);
  return {u, u * u};
}

double scalar_lagrangian_value(const ScalarFraction& f, double gamma) {
  const double w = f.weight;
  if (w == 0.0) return 0.0;
  return w * std::log1p(gamma) - gamma * w +
         (1.0 + gamma) * w * f.numerator / (f.numerator + f.denominator);
}

double scalar_lagrangian_opt_gamma(const ScalarFraction& f) {
  f.validate();
  return f.ratio();
}

HermitianPSD matrix_ratio(const MatrixFraction& f) {
  const ComplexMatrix binv_a = psd_solve(f.denominator, f.sqrt_numerator);
  return HermitianPSD::symmetrized(f.sqrt_numerator.adjoint() * binv_a);
}

double weighted_log_det_ratio(const MatrixFraction& f) {
  if (f.weight == 0.0) return 0.0;
  const ComplexMatrix ratio = matrix_ratio(f).matrix();
  return f.weight *
         log_det_hpd(ComplexMatrix::Identity(ratio.rows(), ratio.cols()) + ratio);
}

ComplexMatrix matrix_quadratic_value(const MatrixFraction& f, const ComplexMatrix& y) {
  if (y.rows() != f.sqrt_numerator.rows() || y.cols() != f.sqrt_numerator.cols()) {
    throw Error(Errc::DimensionMismatch, "matrix_quadratic_value: Y shape differs from sqrt(A)");
  }
  const ComplexMatrix cross = f.sqrt_numerator.adjoint() * y;
  const ComplexMatrix value = cross + cross.adjoint() - y.adjoint() * f.denominator.matrix() * y;
  return linops::hermitian_part(value);
}

ComplexMatrix matrix_quadratic_opt_y(const MatrixFraction& f) {
  return psd_solve(f.denominator, f.sqrt_numerator);
}

namespace {

ComplexMatrix numerator_plus_denominator(const MatrixFraction& f) {
  return f.numerator() + f.denominator.matrix();
}

}  // namespace

double matrix_lagrangian_value(const MatrixFraction& f, const HermitianPSD& gamma) {
  const Eigen::Index d = f.streams();
  if (gamma.dim() != d) {
    throw Error(Errc::DimensionMismatch, "matrix_lagrangian_value: Gamma must be d x d");
  }
  if (f.weight == 0.0) return 0.0;
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix inner =
      f.sqrt_numerator.adjoint() *
      psd_solve_unchecked(numerator_plus_denominator(f), f.sqrt_numerator);
  const ComplexMatrix g = gamma.matrix();
  return f.weight * (log_det_hpd(id + g) - real_trace(g) + real_trace((id + g) * inner));
}

HermitianPSD matrix_lagrangian_opt_gamma(const MatrixFraction& f) {
  return matrix_ratio(f);
}

double joint_fq_value(const MatrixFraction& f, const HermitianPSD& gamma, const ComplexMatrix& y) {
  const Eigen::Index d = f.streams();
  if (gamma.dim() != d) throw Error(Errc::DimensionMismatch, "joint_fq_value: Gamma must be d x d");
  if (y.rows() != f.sqrt_numerator.rows() || y.cols() != d) {
    throw Error(Errc::DimensionMismatch, "joint_fq_value: Y shape differs from sqrt(A)");
  }
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix g = gamma.matrix();
  const double w = f.weight;
  const ComplexMatrix quad = 2.0 * std::sqrt(w) * (f.sqrt_numerator.adjoint() * y) -
                             y.adjoint() * numerator_plus_denominator(f) * y;
  double value = real_trace((id + g) * quad);
  if (w != 0.0) value += w * (log_det_hpd(id + g) - real_trace(g));
  return value;
}

ComplexMatrix joint_opt_y(const MatrixFraction& f) {
  return psd_solve_unchecked(numerator_plus_denominator(f),
                             std::sqrt(f.weight) * f.sqrt_numerator);
}

MonotoneMatrixFunction MonotoneMatrixFunction::trace_weighted(HermitianPSD weight) {
  return MonotoneMatrixFunction(Form::TraceWeighted, std::move(weight));
}

MonotoneMatrixFunction MonotoneMatrixFunction::log_det() {
  return MonotoneMatrixFunction(Form::LogDet, HermitianPSD{});
}

double MonotoneMatrixFunction::operator()(const ComplexMatrix& z) const {
  switch (form_) {
    case Form::TraceWeighted:
      if (weight_.dim() != z.rows()) {
        throw Error(Errc::DimensionMismatch, "trace-weighted function: weight shape mismatch");
      }
      return real_trace(weight_.matrix() * z);
    case Form::LogDet: {
      const ComplexMatrix m = ComplexMatrix::Identity(z.rows(), z.cols()) + linops::hermitian_part(z);
      Eigen::LLT<ComplexMatrix> llt(m);
      if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
      return log_det_hpd(m);
    }
  }
  return 0.0;
}

}  // namespace fplinq::fp

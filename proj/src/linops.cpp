#include "fplinq/linops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fplinq::linops {

namespace {

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << " must be square, got " << m.rows() << "x" << m.cols();
    throw Error(Errc::DimensionMismatch, os.str());
  }
}

}  // namespace

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

bool is_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

double hermitian_defect(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, max_abs(m));
  return max_abs(m - m.adjoint()) / scale;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

HermitianPSD HermitianPSD::checked(const ComplexMatrix& m) {
  require_square(m, "HermitianPSD");
  if (!is_finite(m)) throw Error(Errc::InvalidArgument, "HermitianPSD has non-finite entries");
  // Relative asymmetry is measured against the largest entry, not against 1,
  // so that physically scaled matrices (noise powers ~1e-13) are judged fairly.
  const double scale = max_abs(m);
  if (scale > 0.0 && max_abs(m - m.adjoint()) > Tolerance::hermitian * scale) {
    throw Error(Errc::NotHermitian, "matrix is not Hermitian within tolerance");
  }
  ComplexMatrix h = hermitian_part(m);
  if (h.size() > 0) {
    const RealVector ev = hermitian_eigenvalues(h);
    const double lmax = std::max(ev.maxCoeff(), 0.0);
    if (ev.minCoeff() < -Tolerance::psd * lmax || (lmax == 0.0 && ev.minCoeff() < 0.0)) {
      std::ostringstream os;
      os << "smallest eigenvalue " << ev.minCoeff() << " below -tol * " << lmax;
      throw Error(Errc::NotPSD, os.str());
    }
  }
  return HermitianPSD(std::move(h));
}

HermitianPSD HermitianPSD::symmetrized(const ComplexMatrix& m) {
  require_square(m, "HermitianPSD");
  return HermitianPSD(hermitian_part(m));
}

HermitianPSD HermitianPSD::identity(Eigen::Index dim) {
  return HermitianPSD(ComplexMatrix::Identity(dim, dim));
}

HermitianPSD HermitianPSD::zero(Eigen::Index dim) {
  return HermitianPSD(ComplexMatrix::Zero(dim, dim));
}

ComplexMatrix hermitian_sqrt(const HermitianPSD& m) {
  const ComplexMatrix& a = m.matrix();
  if (a.size() == 0) return a;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
  if (es.info() != Eigen::Success) {
    throw Error(Errc::NotPSD, "eigendecomposition failed");
  }
  RealVector ev = es.eigenvalues();
  const double lmax = std::max(ev.maxCoeff(), 0.0);
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < 0.0) {
      if (ev(k) < -Tolerance::psd * lmax) {
        throw Error(Errc::NotPSD, "negative eigenvalue in square root");
      }
      ev(k) = 0.0;
    }
  }
  const ComplexMatrix& u = es.eigenvectors();
  ComplexMatrix s = u * ev.cwiseSqrt().asDiagonal() * u.adjoint();
  return hermitian_part(s);
}

ComplexMatrix psd_solve_unchecked(const ComplexMatrix& b, const ComplexMatrix& x, double ridge) {
  if (b.rows() != x.rows()) {
    throw Error(Errc::DimensionMismatch, "psd_solve: B and X row counts differ");
  }
  ComplexMatrix shifted = b;
  if (ridge != 0.0) shifted.diagonal().array() += ridge;
  Eigen::LLT<ComplexMatrix> llt(shifted);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e3 * std::numeric_limits<double>::epsilon())) {
    throw Error(Errc::Singular, "psd_solve: matrix is numerically singular");
  }
  return llt.solve(x);
}

ComplexMatrix psd_solve(const HermitianPSD& b, const ComplexMatrix& x, double ridge) {
  if (ridge < 0.0) throw Error(Errc::InvalidArgument, "psd_solve: negative ridge");
  return psd_solve_unchecked(b.matrix(), x, ridge);
}

double log_det_hpd(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::LLT<ComplexMatrix> llt(hermitian_part(m));
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::Singular, "log_det_hpd: matrix is not positive definite");
  }
  const auto& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < l.rows(); ++k) acc += std::log(l(k, k).real());
  return 2.0 * acc;
}

double bisect_multiplier(const std::function<double(double)>& power_of_mu, double p_max,
                         const BisectionOptions& opts) {
  if (!(p_max > 0.0)) throw Error(Errc::InvalidArgument, "bisect_multiplier: p_max must be > 0");
  if (power_of_mu(0.0) <= p_max) return 0.0;

  double lo = 0.0;
  double hi = 1.0;
  double p_hi = power_of_mu(hi);
  int doublings = 0;
  while (p_hi > p_max) {
    lo = hi;
    hi *= 2.0;
    p_hi = power_of_mu(hi);
    if (++doublings > opts.max_doublings) {
      throw Error(Errc::NoBracket, "bisect_multiplier: no upper bracket");
    }
  }
  // Invariant: power(lo) > p_max >= power(hi).
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (p_hi >= p_max * (1.0 - opts.tol)) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double p_mid = power_of_mu(mid);
    if (p_mid > p_max) {
      lo = mid;
    } else {
      hi = mid;
      p_hi = p_mid;
    }
  }
  return hi;
}

}  // namespace fplinq::linops

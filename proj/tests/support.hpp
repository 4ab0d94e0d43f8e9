#pragma once
//
// Helpers shared by the unit and acceptance tests. Randomness here comes from
// std::mt19937_64 so test oracles never share a generator with the library.
//

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fplinq/linops.hpp"
#include "fplinq/matching.hpp"
#include "fplinq/network.hpp"

namespace testing {

using fplinq::linops::Complex;
using fplinq::linops::ComplexMatrix;

inline ComplexMatrix random_matrix(std::mt19937_64& gen, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale / std::sqrt(2.0));
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = Complex(n(gen), n(gen));
  }
  return m;
}

/// G G^H + shift I: positive definite for shift > 0.
inline ComplexMatrix random_pd(std::mt19937_64& gen, int n, double shift = 0.1) {
  const ComplexMatrix g = random_matrix(gen, n, n);
  ComplexMatrix m = g * g.adjoint();
  m.diagonal().array() += shift;
  return 0.5 * (m + m.adjoint());
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// log|M| through LU, independent of the library's Cholesky route.
inline double log_abs_det_lu(const ComplexMatrix& m) {
  return std::log(std::abs(m.fullPivLu().determinant()));
}

/// Exhaustive maximum-weight matching value (rows into columns, partial).
inline double brute_force_matching(const fplinq::match::MatchingProblem& p) {
  const Eigen::MatrixXd w = p.dense(-1.0);
  std::vector<bool> used(p.num_tx, false);
  double best = 0.0;
  auto rec = [&](auto&& self, int r, double acc) -> void {
    if (r == p.num_rx) {
      best = std::max(best, acc);
      return;
    }
    self(self, r + 1, acc);
    for (int c = 0; c < p.num_tx; ++c) {
      if (used[c] || !(w(r, c) > 0.0)) continue;
      used[c] = true;
      self(self, r + 1, acc + w(r, c));
      used[c] = false;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

/// Value of a matching recomputed from the problem's edge list.
inline double matching_value(const fplinq::match::MatchingProblem& p,
                             const fplinq::match::Matching& m) {
  double total = 0.0;
  for (const auto& [rx, tx] : m.pairs) {
    for (const auto& e : p.edges) {
      if (e.rx == rx && e.tx == tx) total += e.weight;
    }
  }
  return total;
}

/// Fixed-single instance with unit noise, p_max and explicit scalar gains:
/// |h_ji|^2 = gains(j, i).
inline fplinq::net::NetworkInstance scalar_instance(const Eigen::MatrixXd& gains, double p_max = 1.0,
                                                    double noise = 1.0) {
  const int n = static_cast<int>(gains.rows());
  std::vector<std::vector<int>> cand(n);
  std::vector<ComplexMatrix> h;
  for (int j = 0; j < n; ++j) {
    cand[j] = {j};
    for (int i = 0; i < n; ++i) h.push_back(ComplexMatrix::Constant(1, 1, std::sqrt(gains(j, i))));
  }
  return {n, n, 1, cand, h, noise, p_max};
}

/// Random instance with i.i.d. CN(0, scale) channels and arbitrary candidates.
inline fplinq::net::NetworkInstance random_instance(std::mt19937_64& gen, int num_tx, int num_rx,
                                                    int antennas,
                                                    std::vector<std::vector<int>> candidates,
                                                    double noise = 1.0, double p_max = 1.0,
                                                    double scale = 1.0) {
  std::vector<ComplexMatrix> h;
  for (int j = 0; j < num_rx; ++j) {
    for (int i = 0; i < num_tx; ++i) h.push_back(random_matrix(gen, antennas, antennas, scale));
  }
  return {num_tx, num_rx, antennas, std::move(candidates), std::move(h), noise, p_max};
}

/// Fixed-single random instance: direct links strong, cross links weaker.
inline fplinq::net::NetworkInstance random_single(std::mt19937_64& gen, int links, int antennas,
                                                  double direct = 10.0, double cross = 1.0) {
  std::vector<std::vector<int>> cand(links);
  std::vector<ComplexMatrix> h;
  for (int j = 0; j < links; ++j) {
    cand[j] = {j};
    for (int i = 0; i < links; ++i) {
      h.push_back(random_matrix(gen, antennas, antennas, std::sqrt(i == j ? direct : cross)));
    }
  }
  return {links, links, antennas, cand, h, 1.0, 1.0};
}

}  // namespace testing

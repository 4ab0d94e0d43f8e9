#include "fplinq/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fplinq/errors.hpp"

namespace fplinq::match {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matching finish(const MatchingProblem& p, const std::vector<int>& tx_of_rx) {
  const Eigen::MatrixXd w = p.dense(-kInf);
  Matching m;
  for (int j = 0; j < p.num_rx; ++j) {
    const int i = tx_of_rx[j];
    if (i < 0 || !(w(j, i) > 0.0)) continue;
    m.pairs.emplace_back(j, i);
    m.value += w(j, i);
  }
  return m;
}

}  // namespace

void MatchingProblem::validate() const {
  if (num_rx < 0 || num_tx < 0) throw Error(Errc::InvalidArgument, "matching: negative side size");
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    if (e.rx < 0 || e.rx >= num_rx || e.tx < 0 || e.tx >= num_tx) {
      throw Error(Errc::InvalidArgument, "matching: edge endpoint out of range");
    }
    if (!std::isfinite(e.weight)) throw Error(Errc::InvalidArgument, "matching: non-finite weight");
    if (!seen.emplace(e.rx, e.tx).second) {
      throw Error(Errc::InvalidArgument, "matching: duplicate edge");
    }
  }
}

Eigen::MatrixXd MatchingProblem::dense(double absent) const {
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(num_rx, num_tx, absent);
  for (const Edge& e : edges) w(e.rx, e.tx) = e.weight;
  return w;
}

std::vector<int> Matching::tx_of_rx(int num_rx) const {
  std::vector<int> out(num_rx, -1);
  for (const auto& [j, i] : pairs) out[j] = i;
  return out;
}

Matching hungarian(const MatchingProblem& p) {
  p.validate();
  if (p.num_rx == 0 || p.num_tx == 0 || p.edges.empty()) return {};

  // Unmatched-allowed maximization is the perfect assignment on max(w, 0)
  // with non-edges at 0, followed by dropping zero-value pairs.
  Eigen::MatrixXd w = p.dense(0.0).cwiseMax(0.0);
  const bool transposed = p.num_rx > p.num_tx;
  if (transposed) w.transposeInPlace();
  const int n = static_cast<int>(w.rows());
  const int m = static_cast<int>(w.cols());

  // Potentials and augmenting paths on cost = -w, 1-based with column 0 as root.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> match_col(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int row = 1; row <= n; ++row) {
    match_col[0] = row;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = match_col[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = -w(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const int j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> tx_of_rx(p.num_rx, -1);
  for (int col = 1; col <= m; ++col) {
    if (match_col[col] == 0) continue;
    const int row = match_col[col] - 1;
    if (transposed) {
      tx_of_rx[col - 1] = row;
    } else {
      tx_of_rx[row] = col - 1;
    }
  }
  return finish(p, tx_of_rx);
}

Matching auction(const MatchingProblem& p, const AuctionOptions& opts) {
  p.validate();
  if (!(opts.epsilon > 0.0) || !(opts.scaling_factor > 1.0)) {
    throw Error(Errc::InvalidArgument, "auction: epsilon must be > 0 and scaling factor > 1");
  }
  const int n = p.num_rx;
  const int m = p.num_tx;
  if (n == 0 || p.edges.empty()) return {};

  // Objects: transmitters [0, m), then receiver j's private dummy at m + j.
  // Persons: receivers [0, n), then m dummy bidders valuing every object at 0.
  const int size = n + m;
  std::vector<std::vector<std::pair<int, double>>> options(n);
  double max_abs = 0.0;
  for (const Edge& e : p.edges) {
    options[e.rx].emplace_back(e.tx, e.weight);
    max_abs = std::max(max_abs, std::abs(e.weight));
  }
  for (int j = 0; j < n; ++j) {
    std::sort(options[j].begin(), options[j].end());
    options[j].emplace_back(m + j, 0.0);
  }
  const double spread = 2.0 * max_abs + 1.0;  // exceeds any value gap

  std::vector<double> price(size, 0.0);
  std::vector<int> owner(size, -1);
  std::vector<int> assigned(size, -1);
  std::size_t bids = 0;

  double eps = std::max(max_abs / 2.0, opts.epsilon);
  for (;;) {
    std::fill(owner.begin(), owner.end(), -1);
    std::fill(assigned.begin(), assigned.end(), -1);
    std::vector<int> queue(size);
    for (int k = 0; k < size; ++k) queue[k] = size - 1 - k;  // pop_back serves person 0 first

    while (!queue.empty()) {
      const int person = queue.back();
      queue.pop_back();
      if (++bids > opts.max_bids) throw Error(Errc::NonTermination, "auction: bid limit reached");

      int best = -1;
      double v1 = -kInf;
      double v2 = -kInf;
      auto consider = [&](int obj, double value) {
        const double net = value - price[obj];
        if (net > v1) {
          v2 = v1;
          v1 = net;
          best = obj;
        } else if (net > v2) {
          v2 = net;
        }
      };
      if (person < n) {
        for (const auto& [obj, value] : options[person]) consider(obj, value);
      } else {
        for (int obj = 0; obj < size; ++obj) consider(obj, 0.0);
      }
      const double increment = (v2 == -kInf ? spread : v1 - v2) + eps;
      price[best] += increment;
      if (owner[best] >= 0) {
        assigned[owner[best]] = -1;
        queue.push_back(owner[best]);
      }
      owner[best] = person;
      assigned[person] = best;
    }
    if (eps <= opts.epsilon) break;
    eps = std::max(eps / opts.scaling_factor, opts.epsilon);
  }

  std::vector<int> tx_of_rx(n, -1);
  for (int j = 0; j < n; ++j) {
    if (assigned[j] >= 0 && assigned[j] < m) tx_of_rx[j] = assigned[j];
  }
  return finish(p, tx_of_rx);
}

}  // namespace fplinq::match

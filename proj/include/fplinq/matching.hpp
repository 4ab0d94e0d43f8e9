#pragma once
//
// Maximum-weight bipartite matching between receivers (rows) and
// transmitters (columns). Matchings need not be perfect: a receiver may stay
// unmatched, so edges of nonpositive weight never appear in an optimum.
//

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fplinq::match {

struct Edge {
  int rx = 0;
  int tx = 0;
  double weight = 0.0;
};

struct MatchingProblem {
  int num_rx = 0;
  int num_tx = 0;
  std::vector<Edge> edges;

  /// Throws Error(InvalidArgument) on out-of-range endpoints, duplicate
  /// edges or non-finite weights.
  void validate() const;

  /// Dense rx x tx view; `absent` fills non-edges.
  Eigen::MatrixXd dense(double absent) const;
};

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (rx, tx), sorted by rx
  double value = 0.0;

  /// tx of each receiver, -1 when unmatched.
  std::vector<int> tx_of_rx(int num_rx) const;
};

/// Exact optimum (Kuhn-Munkres on the rectangular problem, O(n^2 m)).
Matching hungarian(const MatchingProblem& p);

struct AuctionOptions {
  double epsilon = 1e-9;         // final bidding increment
  double scaling_factor = 4.0;   // epsilon divided by this between phases
  std::size_t max_bids = 50'000'000;
};

/// Forward auction with epsilon scaling. Each receiver also owns a private
/// zero-value "stay unmatched" object, and dummy bidders absorb the remaining
/// objects so the assignment is square. Within num_rx * epsilon of optimal.
/// Throws Error(NonTermination) once max_bids is exceeded.
Matching auction(const MatchingProblem& p, const AuctionOptions& opts = {});

}  // namespace fplinq::match

#pragma once
//
// Proportional fairness across scheduling slots. Pair averages drive the
// weights w_ji = 1 / Rbar_ji; receiver averages (whatever transmitter served
// the receiver) drive the log-utility.
//

#include <Eigen/Dense>

#include "fplinq/network.hpp"

namespace fplinq::fair {

struct RateAverages {
  Eigen::MatrixXd pair;      // rx x tx, bits/s/Hz, meaningful on associated pairs
  Eigen::VectorXd receiver;  // per receiver, bits/s/Hz
  double alpha = 0.05;
  double floor = 1e-6;

  /// Every average starts at `initial` so the first weights are uniform.
  static RateAverages start(const net::NetworkInstance& net, double alpha = 0.05,
                            double floor = 1e-6, double initial = 1.0);

  /// 1 / Rbar on associated pairs, 0 elsewhere.
  net::LinkWeights weights(const net::NetworkInstance& net) const;
};

/// Exponential smoothing with the slot's rates: the scheduled pair of
/// receiver j gets rates(j), every other pair 0. Averages are floored.
/// Returns the next slot's weights and updates `avg` in place.
net::LinkWeights pf_update(RateAverages& avg, const net::NetworkInstance& net,
                           const net::Schedule& s, const Eigen::VectorXd& rates);

/// sum_j ln Rbar_j over receivers (natural log of bits/s/Hz).
double log_utility(const RateAverages& avg);

}  // namespace fplinq::fair

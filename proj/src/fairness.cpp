#include "fplinq/fairness.hpp"

#include <cmath>

#include "fplinq/errors.hpp"

namespace fplinq::fair {

RateAverages RateAverages::start(const net::NetworkInstance& net, double alpha, double floor,
                                 double initial) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidArgument, "PF alpha must lie in (0, 1)");
  if (!(floor > 0.0)) throw Error(Errc::InvalidArgument, "PF rate floor must be positive");
  if (!(initial >= floor)) throw Error(Errc::InvalidArgument, "PF initial average below floor");
  RateAverages avg;
  avg.pair = Eigen::MatrixXd::Constant(net.num_rx(), net.num_tx(), initial);
  avg.receiver = Eigen::VectorXd::Constant(net.num_rx(), initial);
  avg.alpha = alpha;
  avg.floor = floor;
  return avg;
}

net::LinkWeights RateAverages::weights(const net::NetworkInstance& net) const {
  net::LinkWeights w = net::LinkWeights::Zero(net.num_rx(), net.num_tx());
  for (int j = 0; j < net.num_rx(); ++j) {
    for (int i : net.candidates(j)) w(j, i) = 1.0 / pair(j, i);
  }
  return w;
}

net::LinkWeights pf_update(RateAverages& avg, const net::NetworkInstance& net,
                           const net::Schedule& s, const Eigen::VectorXd& rates) {
  if (rates.size() != net.num_rx() || s.size() != net.num_rx()) {
    throw Error(Errc::DimensionMismatch, "pf_update: one rate and schedule entry per receiver");
  }
  if ((rates.array() < 0.0).any()) throw Error(Errc::InvalidArgument, "pf_update: negative rate");
  const double keep = 1.0 - avg.alpha;
  for (int j = 0; j < net.num_rx(); ++j) {
    for (int i : net.candidates(j)) {
      const double r = s[j] == i ? rates(j) : 0.0;
      avg.pair(j, i) = std::max(keep * avg.pair(j, i) + avg.alpha * r, avg.floor);
    }
    const double r = s[j] == net::kUnscheduled ? 0.0 : rates(j);
    avg.receiver(j) = std::max(keep * avg.receiver(j) + avg.alpha * r, avg.floor);
  }
  return avg.weights(net);
}

double log_utility(const RateAverages& avg) {
  return avg.receiver.array().log().sum();
}

}  // namespace fplinq::fair

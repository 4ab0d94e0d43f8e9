#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fplinq/errors.hpp"
#include "fplinq/schedulers.hpp"

namespace fplinq::sched {

using net::kUnscheduled;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double to_db(double x) { return 10.0 * std::log10(x); }

void require_scalar(const NetworkInstance& net, const char* who) {
  if (net.antennas() != 1) {
    throw Error(Errc::Unsupported, std::string(who) + " needs single-antenna links");
  }
}

/// Link-level gains: gains(l, k) = power of link k's transmitter received at
/// link l's receiver, normalized by noise.
Eigen::MatrixXd link_gains(const NetworkInstance& net, const std::vector<int>& tx,
                           const Eigen::VectorXd& power) {
  const Eigen::MatrixXd g = normalized_gains(net, power);
  const int links = static_cast<int>(tx.size());
  Eigen::MatrixXd out(links, links);
  for (int l = 0; l < links; ++l) {
    for (int k = 0; k < links; ++k) out(l, k) = g(l, tx[k]);
  }
  return out;
}

Eigen::VectorXd tx_power_or_full(const NetworkInstance& net, const Eigen::VectorXd* power) {
  if (power == nullptr) return Eigen::VectorXd::Constant(net.num_tx(), net.p_max());
  if (power->size() != net.num_tx()) {
    throw Error(Errc::DimensionMismatch, "power vector needs one entry per transmitter");
  }
  return *power;
}

/// Per-link admission test on the candidate subnetwork.
using Admissible = std::function<bool(int l, const std::vector<int>& members,
                                      const Eigen::MatrixXd& gains)>;

PoweredSchedule sequential_selection(const NetworkInstance& net, const LinkWeights& w,
                                     const Eigen::VectorXd& tx_power,
                                     const std::vector<double>& backoff_db,
                                     const Admissible& admissible) {
  const std::vector<int> tx = single_association(net);
  PoweredSchedule out{Schedule::none(net.num_rx()), Eigen::VectorXd::Zero(net.num_tx())};
  Eigen::VectorXd link_power(tx.size());
  for (std::size_t l = 0; l < tx.size(); ++l) link_power(l) = tx_power(tx[l]);

  std::vector<int> admitted;
  for (int l : admission_order(net, w)) {
    std::vector<int> members = admitted;
    members.push_back(l);
    for (double b : backoff_db) {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(net.num_tx());
      for (int k : admitted) p(tx[k]) = out.power(tx[k]);
      p(tx[l]) = link_power(l) * std::pow(10.0, -b / 10.0);
      const Eigen::MatrixXd gains = link_gains(net, tx, p);
      const bool ok = std::all_of(members.begin(), members.end(),
                                  [&](int m) { return admissible(m, members, gains); });
      if (ok) {
        admitted.push_back(l);
        out.schedule.tx_of_rx[l] = tx[l];
        out.power(tx[l]) = p(tx[l]);
        break;
      }
    }
  }
  return out;
}

double max_over_others(int l, const std::vector<int>& members,
                       const std::function<double(int)>& value) {
  double best = kNegInf;
  for (int k : members) {
    if (k != l) best = std::max(best, value(k));
  }
  return best;
}

SlotSolution from_powered(const NetworkInstance& net, const LinkWeights& w,
                          const PoweredSchedule& ps) {
  SlotSolution sol;
  sol.schedule = ps.schedule;
  sol.beams = beams_from_power(net, ps.power, net.antennas());
  sol.objective = net::weighted_sum_rate(w, sol.beams, sol.schedule, net);
  sol.objective_trace = {sol.objective};
  sol.schedule_trace = {sol.schedule};
  sol.converged = true;
  return sol;
}

}  // namespace

Eigen::MatrixXd normalized_gains(const NetworkInstance& net, const Eigen::VectorXd& power) {
  require_scalar(net, "normalized_gains");
  Eigen::MatrixXd g(net.num_rx(), net.num_tx());
  for (int j = 0; j < net.num_rx(); ++j) {
    for (int i = 0; i < net.num_tx(); ++i) {
      g(j, i) = power(i) * std::norm(net.channel(j, i)(0, 0)) / net.noise_power();
    }
  }
  return g;
}

bool tin_check(int l, const std::vector<int>& active, const Eigen::MatrixXd& gains) {
  auto exponent = [](double g) { return to_db(std::max(g, 1.0)); };
  double inr_out = 0.0;
  double inr_in = 0.0;
  for (int k : active) {
    if (k == l) continue;
    inr_out = std::max(inr_out, exponent(gains(k, l)));
    inr_in = std::max(inr_in, exponent(gains(l, k)));
  }
  return exponent(gains(l, l)) >= inr_out + inr_in;
}

std::vector<int> single_association(const NetworkInstance& net) {
  if (!net.is_fixed_single()) {
    throw Error(Errc::Unsupported, "scheduler needs fixed single association");
  }
  std::vector<int> tx(net.num_rx());
  for (int j = 0; j < net.num_rx(); ++j) tx[j] = net.candidates(j)[0];
  return tx;
}

std::vector<int> admission_order(const NetworkInstance& net, const LinkWeights& w) {
  const std::vector<int> tx = single_association(net);
  std::vector<int> order(tx.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return w(a, tx[a]) > w(b, tx[b]); });
  return order;
}

PoweredSchedule flashlinq_schedule(const NetworkInstance& net, const LinkWeights& w,
                                   const SchedulerConfig& cfg, const Eigen::VectorXd* power) {
  require_scalar(net, "FlashLinQ");
  const double theta = std::pow(10.0, cfg.flash_theta_db / 10.0);
  return sequential_selection(
      net, w, tx_power_or_full(net, power), {0.0},
      [theta](int l, const std::vector<int>& members, const Eigen::MatrixXd& g) {
        double interference = 0.0;
        for (int k : members) {
          if (k != l) interference += g(l, k);
        }
        return g(l, l) >= theta * (1.0 + interference);
      });
}

namespace {

Admissible itlinq_rule(const ItlinqParams& p) {
  return [p](int l, const std::vector<int>& members, const Eigen::MatrixXd& g) {
    const double inr_out = max_over_others(l, members, [&](int k) { return to_db(g(k, l)); });
    const double inr_in = max_over_others(l, members, [&](int k) { return to_db(g(l, k)); });
    const double worst = std::max(inr_out, inr_in);
    return worst == kNegInf || p.eta * to_db(g(l, l)) + p.m_db >= worst;
  };
}

}  // namespace

PoweredSchedule itlinq_schedule(const NetworkInstance& net, const LinkWeights& w,
                                const SchedulerConfig& cfg, const Eigen::VectorXd* power) {
  require_scalar(net, "ITLinQ");
  return sequential_selection(net, w, tx_power_or_full(net, power), {0.0}, itlinq_rule(cfg.itlinq));
}

PoweredSchedule itlinq_plus_schedule(const NetworkInstance& net, const LinkWeights& w,
                                     const SchedulerConfig& cfg, const Eigen::VectorXd* power) {
  require_scalar(net, "ITLinQ+");
  return sequential_selection(net, w, tx_power_or_full(net, power), cfg.itlinq.backoff_db,
                              itlinq_rule(cfg.itlinq));
}

Schedule baseline_all_on(const NetworkInstance& net) {
  return Schedule{single_association(net)};
}

PoweredSchedule baseline_greedy_tin(const NetworkInstance& net, const LinkWeights& w) {
  require_scalar(net, "greedy TIN");
  return sequential_selection(net, w, tx_power_or_full(net, nullptr), {0.0}, tin_check);
}

BeamformerSet beams_from_power(const NetworkInstance& net, const Eigen::VectorXd& power,
                               int streams) {
  BeamformerSet v = net.full_power_beams(streams);
  for (int i = 0; i < net.num_tx(); ++i) v[i] *= std::sqrt(std::max(power(i), 0.0) / net.p_max());
  return v;
}

SlotSolution composite_pc(BaseScheduler base, const NetworkInstance& net, const LinkWeights& w,
                          const SchedulerConfig& cfg) {
  cfg.validate();
  require_scalar(net, "composite power control");
  auto schedule = [&](const Eigen::VectorXd& power) {
    return base == BaseScheduler::FlashLinQ ? flashlinq_schedule(net, w, cfg, &power)
                                            : itlinq_plus_schedule(net, w, cfg, &power);
  };

  Eigen::VectorXd power = Eigen::VectorXd::Constant(net.num_tx(), net.p_max());
  const PoweredSchedule first = schedule(power);
  SlotSolution best = from_powered(net, w, first);
  for (int round = 0; round < cfg.max_iters; ++round) {
    const PoweredSchedule ps = round == 0 ? first : schedule(power);
    // Links the scheduler (re)admits start WMMSE from their admission power.
    const BeamformerSet v0 = beams_from_power(net, ps.power, 1);
    const BeamformerSet v = wmmse_power_control(net, w, ps.schedule, v0, cfg);
    const double cur = net::weighted_sum_rate(w, v, ps.schedule, net);
    const double prev = best.objective;
    if (!(cur > prev)) break;
    best.schedule = ps.schedule;
    best.beams = v;
    best.objective = cur;
    best.objective_trace.push_back(cur);
    best.schedule_trace.push_back(ps.schedule);
    ++best.iterations;
    if (cur - prev < cfg.conv_tol * std::abs(prev)) break;
    // Off links re-enter the next admission pass at full power.
    for (int i = 0; i < net.num_tx(); ++i) {
      const double p = v[i].squaredNorm();
      power(i) = p > 0.0 ? p : net.p_max();
    }
  }
  best.converged = true;
  return best;
}

// ---- registry -----------------------------------------------------------------

const std::vector<std::string>& scheduler_ids() {
  static const std::vector<std::string> ids = {
      "fplinq",      "fplinq-nopc",    "fplinq-vector", "bcd",    "wmmse-fixed", "flashlinq",
      "flashlinq-pc", "itlinq",        "itlinq-plus",   "itlinq-plus-pc", "all-on", "greedy-tin"};
  return ids;
}

bool is_scheduler_id(const std::string& id) {
  const auto& ids = scheduler_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

SlotSolution run_scheduler(const std::string& id, const NetworkInstance& net, const LinkWeights& w,
                           const SchedulerConfig& cfg) {
  if (id == "fplinq") return fplinq_run(net, w, cfg);
  if (id == "fplinq-nopc") {
    SchedulerConfig c = cfg;
    c.no_power_control = true;
    return fplinq_run(net, w, c);
  }
  if (id == "fplinq-vector") {
    SchedulerConfig c = cfg;
    c.rank_limit = RankLimit::One;
    return fplinq_run(net, w, c);
  }
  if (id == "bcd") return bcd_run(net, w, cfg);
  if (id == "wmmse-fixed") return wmmse_fixed_run(net, w, cfg);
  if (id == "flashlinq") return from_powered(net, w, flashlinq_schedule(net, w, cfg));
  if (id == "flashlinq-pc") return composite_pc(BaseScheduler::FlashLinQ, net, w, cfg);
  if (id == "itlinq") return from_powered(net, w, itlinq_schedule(net, w, cfg));
  if (id == "itlinq-plus") return from_powered(net, w, itlinq_plus_schedule(net, w, cfg));
  if (id == "itlinq-plus-pc") return composite_pc(BaseScheduler::ItlinqPlus, net, w, cfg);
  if (id == "all-on") {
    const Schedule s = baseline_all_on(net);
    SlotSolution sol;
    sol.schedule = s;
    sol.beams = net.full_power_beams(net.antennas());
    sol.objective = net::weighted_sum_rate(w, sol.beams, s, net);
    sol.objective_trace = {sol.objective};
    sol.schedule_trace = {s};
    sol.converged = true;
    return sol;
  }
  if (id == "greedy-tin") return from_powered(net, w, baseline_greedy_tin(net, w));
  throw ConfigError("scheduler.id", "unknown scheduler '" + id + "'");
}

}  // namespace fplinq::sched

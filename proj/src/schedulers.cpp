#include "fplinq/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "fplinq/errors.hpp"

namespace fplinq::sched {

using linops::log_det_hpd;
using linops::psd_solve_unchecked;
using linops::real_trace;
using net::kUnscheduled;

void SchedulerConfig::validate() const {
  if (max_iters < 1) throw ConfigError("scheduler.max_iters", "must be at least 1");
  if (bcd_inner_iters < 1) throw ConfigError("scheduler.bcd_inner_iters", "must be at least 1");
  if (!(conv_tol >= 0.0)) throw ConfigError("scheduler.conv_tol", "must be nonnegative");
  if (!std::isfinite(flash_theta_db)) throw ConfigError("scheduler.flash_theta_db", "must be finite");
  if (!(itlinq.eta > 0.0 && itlinq.eta <= 1.0)) {
    throw ConfigError("scheduler.itlinq.eta", "must lie in (0, 1]");
  }
  if (!std::isfinite(itlinq.m_db)) throw ConfigError("scheduler.itlinq.m_db", "must be finite");
  if (itlinq.backoff_db.empty()) {
    throw ConfigError("scheduler.itlinq.backoff_db", "needs at least one level");
  }
  for (double b : itlinq.backoff_db) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      throw ConfigError("scheduler.itlinq.backoff_db", "levels must be finite and >= 0");
    }
  }
  if (!(ridge >= 0.0)) throw ConfigError("scheduler.ridge", "must be nonnegative");
  if (!(auction_epsilon > 0.0)) throw ConfigError("scheduler.auction_epsilon", "must be positive");
}

namespace {

int stream_count(const BeamformerSet& v) { return v.size() > 0 ? static_cast<int>(v[0].cols()) : 1; }

bool is_zero(const ComplexMatrix& m) { return m.squaredNorm() == 0.0; }

double log2_det_plus_identity(const ComplexMatrix& hv, const ComplexMatrix& f) {
  ComplexMatrix m = hv.adjoint() * psd_solve_unchecked(f, hv);
  m.diagonal().array() += 1.0;
  return log_det_hpd(m) / std::numbers::ln2;
}

bool converged_step(double prev, double cur, double tol) {
  const double scale = std::abs(prev);
  if (scale == 0.0) return cur == prev;
  return std::abs(cur - prev) < tol * scale;
}

/// Eigendecomposition of a transmitter's penalty matrix M_i.
struct Penalty {
  ComplexMatrix u;
  linops::RealVector lambda;  // clamped at 0, ridge added
};

Penalty decompose(const ComplexMatrix& m, double ridge) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(linops::hermitian_part(m));
  if (es.info() != Eigen::Success) throw Error(Errc::NotPSD, "penalty eigendecomposition failed");
  Penalty p{es.eigenvectors(), es.eigenvalues()};
  for (Eigen::Index k = 0; k < p.lambda.size(); ++k) p.lambda(k) = std::max(p.lambda(k), 0.0) + ridge;
  return p;
}

/// (mu I + M)^{-1} B with the smallest mu >= 0 meeting the power budget.
ComplexMatrix solve_beam(const Penalty& pen, const ComplexMatrix& b, double p_max,
                         const linops::BisectionOptions& opts, double* mu_out) {
  if (is_zero(b)) {
    if (mu_out) *mu_out = 0.0;
    return ComplexMatrix::Zero(b.rows(), b.cols());
  }
  const ComplexMatrix c = pen.u.adjoint() * b;
  const linops::RealVector weight = c.rowwise().squaredNorm();
  auto power = [&](double mu) {
    double total = 0.0;
    for (Eigen::Index k = 0; k < weight.size(); ++k) {
      if (weight(k) == 0.0) continue;
      const double d = pen.lambda(k) + mu;
      total += weight(k) / (d * d);
    }
    return total;
  };
  const double mu = linops::bisect_multiplier(power, p_max, opts);
  if (mu_out) *mu_out = mu;
  const linops::RealVector scale = (pen.lambda.array() + mu).inverse();
  return pen.u * (scale.asDiagonal() * c);
}

ComplexMatrix penalty_matrix(const NetworkInstance& net, const std::vector<ComplexMatrix>& z, int i) {
  const int n = net.antennas();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  ComplexMatrix zh(n, n);
  for (int j = 0; j < net.num_rx(); ++j) {
    if (z[j].size() == 0) continue;
    const ComplexMatrix& h = net.channel(j, i);
    if (n == 1) {
      m(0, 0) += std::norm(h(0, 0)) * z[j](0, 0);
      continue;
    }
    zh.noalias() = z[j] * h;
    m.noalias() += h.adjoint() * zh;
  }
  return linops::hermitian_part(m);
}

/// Y_j (I + Gamma_j) Y_j^H per receiver, empty when Y_j = 0.
std::vector<ComplexMatrix> weighted_y_covariances(const AuxState& aux) {
  std::vector<ComplexMatrix> z(aux.y.size());
  for (std::size_t j = 0; j < aux.y.size(); ++j) {
    if (is_zero(aux.y[j])) continue;
    ComplexMatrix ig = aux.gamma[j].matrix();
    ig.diagonal().array() += 1.0;
    z[j] = aux.y[j] * ig * aux.y[j].adjoint();
  }
  return z;
}

ComplexMatrix beam_numerator(const NetworkInstance& net, const LinkWeights& w, const AuxState& aux,
                             int j, int i) {
  const double wji = w(j, i);
  const ComplexMatrix& y = aux.y[j];
  if (wji <= 0.0 || is_zero(y)) return ComplexMatrix::Zero(net.antennas(), y.cols());
  ComplexMatrix ig = aux.gamma[j].matrix();
  ig.diagonal().array() += 1.0;
  return std::sqrt(wji) * (net.channel(j, i).adjoint() * (y * ig));
}

match::MatchingProblem problem_from(const NetworkInstance& net,
                                    const std::vector<std::vector<double>>& weights) {
  match::MatchingProblem p{net.num_rx(), net.num_tx(), {}};
  for (int j = 0; j < net.num_rx(); ++j) {
    const auto& k = net.candidates(j);
    for (std::size_t c = 0; c < k.size(); ++c) {
      if (weights[j][c] > 0.0) p.edges.push_back({j, k[c], weights[j][c]});
    }
  }
  return p;
}

Schedule schedule_from(const match::Matching& m, int num_rx) {
  return Schedule{m.tx_of_rx(num_rx)};
}

void zero_unscheduled(BeamformerSet& v, const Schedule& s) {
  std::vector<bool> on(v.size(), false);
  for (int j = 0; j < s.size(); ++j) {
    if (s[j] != kUnscheduled) on[s[j]] = true;
  }
  for (int i = 0; i < v.size(); ++i) {
    if (!on[i]) v[i].setZero();
  }
}

Schedule match_on_rates(const NetworkInstance& net, const LinkWeights& w, const BeamformerSet& v,
                        const SchedulerConfig& cfg) {
  auto r = fixed_beam_pair_rates(net, v);
  for (int j = 0; j < net.num_rx(); ++j) {
    const auto& k = net.candidates(j);
    for (std::size_t c = 0; c < k.size(); ++c) r[j][c] *= w(j, k[c]);
  }
  return schedule_from(solve_matching(problem_from(net, r), cfg), net.num_rx());
}

}  // namespace

match::Matching solve_matching(const match::MatchingProblem& p, const SchedulerConfig& cfg) {
  if (cfg.matcher == Matcher::Auction) {
    match::AuctionOptions opts;
    opts.epsilon = cfg.auction_epsilon;
    return match::auction(p, opts);
  }
  return match::hungarian(p);
}

// ---- auxiliaries ------------------------------------------------------------

AuxState fplinq_update_aux(const NetworkInstance& net, const LinkWeights& w, const BeamformerSet& v,
                           const Schedule& s) {
  const int n = net.antennas();
  const int d = stream_count(v);
  AuxState aux;
  aux.gamma.reserve(net.num_rx());
  aux.y.reserve(net.num_rx());
  for (int j = 0; j < net.num_rx(); ++j) {
    const int i = s[j];
    if (i == kUnscheduled) {
      aux.gamma.push_back(HermitianPSD::zero(d));
      aux.y.push_back(ComplexMatrix::Zero(n, d));
      continue;
    }
    const ComplexMatrix f = net::interference_plus_noise(j, v, s, net);
    const ComplexMatrix hv = net.channel(j, i) * v[i];
    aux.gamma.push_back(HermitianPSD::symmetrized(hv.adjoint() * psd_solve_unchecked(f, hv)));
    const double wji = w(j, i);
    if (wji > 0.0) {
      ComplexMatrix total = f;
      total.noalias() += hv * hv.adjoint();
      aux.y.push_back(psd_solve_unchecked(linops::hermitian_part(total), std::sqrt(wji) * hv));
    } else {
      aux.y.push_back(ComplexMatrix::Zero(n, d));
    }
  }
  return aux;
}

std::vector<HermitianPSD> fplinq_update_gamma(const NetworkInstance& net, const LinkWeights& w,
                                              const BeamformerSet& v, const Schedule& s) {
  return fplinq_update_aux(net, w, v, s).gamma;
}

std::vector<ComplexMatrix> fplinq_update_y(const NetworkInstance& net, const LinkWeights& w,
                                           const BeamformerSet& v, const Schedule& s) {
  return fplinq_update_aux(net, w, v, s).y;
}

// ---- candidate beams and lambda ---------------------------------------------

const ComplexMatrix& CandidateBeams::at(const NetworkInstance& net, int j, int i) const {
  const auto& k = net.candidates(j);
  const auto it = std::find(k.begin(), k.end(), i);
  if (it == k.end()) throw Error(Errc::InvalidArgument, "candidate beam of a non-associated pair");
  return beam[j][static_cast<std::size_t>(it - k.begin())];
}

CandidateBeams fplinq_candidate_beams(const NetworkInstance& net, const LinkWeights& w,
                                      const AuxState& aux, const SchedulerConfig& cfg) {
  CandidateBeams out;
  out.beam.resize(net.num_rx());
  out.mu.resize(net.num_rx());
  for (int j = 0; j < net.num_rx(); ++j) {
    out.beam[j].resize(net.candidates(j).size());
    out.mu[j].assign(net.candidates(j).size(), 0.0);
  }
  const auto z = weighted_y_covariances(aux);
  out.m.reserve(net.num_tx());
  for (int i = 0; i < net.num_tx(); ++i) {
    out.m.push_back(penalty_matrix(net, z, i));
    if (net.served(i).empty()) continue;
    const Penalty pen = decompose(out.m.back(), cfg.ridge);
    for (int j : net.served(i)) {
      const auto& k = net.candidates(j);
      const auto c = static_cast<std::size_t>(std::find(k.begin(), k.end(), i) - k.begin());
      out.beam[j][c] = solve_beam(pen, beam_numerator(net, w, aux, j, i), net.p_max(),
                                  cfg.bisection, &out.mu[j][c]);
    }
  }
  return out;
}

double fplinq_pair_lambda(const NetworkInstance& net, const LinkWeights& w, const AuxState& aux,
                          const ComplexMatrix& m_i, int j, int i, const ComplexMatrix& v_i) {
  const double wji = w(j, i);
  double value = -real_trace(v_i.adjoint() * m_i * v_i);
  if (wji > 0.0) {
    const ComplexMatrix& g = aux.gamma[j].matrix();
    ComplexMatrix ig = g;
    ig.diagonal().array() += 1.0;
    value += wji * (log_det_hpd(ig) - real_trace(g));
    value += 2.0 * std::sqrt(wji) * real_trace(ig * aux.y[j].adjoint() * net.channel(j, i) * v_i);
  }
  return value;
}

std::vector<std::vector<double>> fplinq_lambda_weights(const NetworkInstance& net,
                                                       const LinkWeights& w, const AuxState& aux,
                                                       const CandidateBeams& cand) {
  std::vector<std::vector<double>> lambda(net.num_rx());
  for (int j = 0; j < net.num_rx(); ++j) {
    const auto& k = net.candidates(j);
    lambda[j].resize(k.size());
    for (std::size_t c = 0; c < k.size(); ++c) {
      lambda[j][c] = fplinq_pair_lambda(net, w, aux, cand.m[k[c]], j, k[c], cand.beam[j][c]);
    }
  }
  return lambda;
}

std::vector<std::vector<double>> fixed_beam_pair_rates(const NetworkInstance& net,
                                                       const BeamformerSet& v) {
  const int n = net.antennas();
  std::vector<int> active;
  for (int i = 0; i < net.num_tx(); ++i) {
    if (!is_zero(v[i])) active.push_back(i);
  }
  std::vector<std::vector<double>> rates(net.num_rx());
  for (int j = 0; j < net.num_rx(); ++j) {
    const auto& k = net.candidates(j);
    rates[j].assign(k.size(), 0.0);
    ComplexMatrix total = net.noise_power() * ComplexMatrix::Identity(n, n);
    for (int i : active) {
      const ComplexMatrix hv = net.channel(j, i) * v[i];
      total.noalias() += hv * hv.adjoint();
    }
    for (std::size_t c = 0; c < k.size(); ++c) {
      const int i = k[c];
      if (is_zero(v[i])) continue;
      const ComplexMatrix hv = net.channel(j, i) * v[i];
      ComplexMatrix f = linops::hermitian_part(total - hv * hv.adjoint());
      try {
        rates[j][c] = log2_det_plus_identity(hv, f);
      } catch (const Error&) {
        // Cancellation left F numerically indefinite; rebuild it term by term.
        f = net.noise_power() * ComplexMatrix::Identity(n, n);
        for (int ip : active) {
          if (ip == i) continue;
          const ComplexMatrix g = net.channel(j, ip) * v[ip];
          f.noalias() += g * g.adjoint();
        }
        rates[j][c] = log2_det_plus_identity(hv, linops::hermitian_part(f));
      }
    }
  }
  return rates;
}

// ---- FPLinQ -----------------------------------------------------------------

Schedule greedy_schedule(const NetworkInstance& net, const LinkWeights& w) {
  std::vector<std::tuple<double, int, int>> pairs;
  for (int j = 0; j < net.num_rx(); ++j) {
    for (int i : net.candidates(j)) {
      if (w(j, i) > 0.0) pairs.emplace_back(-w(j, i), j, i);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  Schedule s = Schedule::none(net.num_rx());
  std::vector<bool> used(net.num_tx(), false);
  for (const auto& [neg_w, j, i] : pairs) {
    if (s[j] != kUnscheduled || used[i]) continue;
    s.tx_of_rx[j] = i;
    used[i] = true;
  }
  return s;
}

FplinqState initial_state(const NetworkInstance& net, const LinkWeights& w, int streams) {
  return {greedy_schedule(net, w), net.full_power_beams(streams)};
}

StepRecord fplinq_step(const NetworkInstance& net, const LinkWeights& w, FplinqState& state,
                       const SchedulerConfig& cfg) {
  StepRecord rec;
  rec.aux = fplinq_update_aux(net, w, state.beams, state.schedule);
  rec.candidates = fplinq_candidate_beams(net, w, rec.aux, cfg);
  const auto lambda = fplinq_lambda_weights(net, w, rec.aux, rec.candidates);

  rec.beam_matching = schedule_from(solve_matching(problem_from(net, lambda), cfg), net.num_rx());
  const int n = net.antennas();
  const int d = stream_count(state.beams);
  BeamformerSet v;
  v.v.assign(net.num_tx(), ComplexMatrix::Zero(n, d));
  for (int j = 0; j < net.num_rx(); ++j) {
    const int i = rec.beam_matching[j];
    if (i != kUnscheduled) v[i] = rec.candidates.at(net, j, i);
  }

  state.schedule = match_on_rates(net, w, v, cfg);
  zero_unscheduled(v, state.schedule);
  state.beams = std::move(v);
  return rec;
}

SlotSolution fplinq_run(const NetworkInstance& net, const LinkWeights& w, const SchedulerConfig& cfg) {
  cfg.validate();
  FplinqState state = initial_state(net, w, cfg.streams(net.antennas()));
  SlotSolution sol;
  double prev = net::weighted_sum_rate(w, state.beams, state.schedule, net);
  sol.objective_trace.push_back(prev);
  sol.schedule_trace.push_back(state.schedule);
  for (int it = 0; it < cfg.max_iters; ++it) {
    fplinq_step(net, w, state, cfg);
    const double cur = net::weighted_sum_rate(w, state.beams, state.schedule, net);
    sol.objective_trace.push_back(cur);
    sol.schedule_trace.push_back(state.schedule);
    ++sol.iterations;
    if (converged_step(prev, cur, cfg.conv_tol)) {
      sol.converged = true;
      break;
    }
    prev = cur;
  }
  sol.schedule = state.schedule;
  sol.beams = std::move(state.beams);
  if (cfg.no_power_control) {
    const int d = stream_count(sol.beams);
    const BeamformerSet full = net.full_power_beams(d);
    for (int i = 0; i < net.num_tx(); ++i) sol.beams[i] = full[i];
    zero_unscheduled(sol.beams, sol.schedule);
  }
  sol.objective = net::weighted_sum_rate(w, sol.beams, sol.schedule, net);
  return sol;
}

// ---- WMMSE and BCD ----------------------------------------------------------

BeamformerSet wmmse_power_control(const NetworkInstance& net, const LinkWeights& w,
                                  const Schedule& s, const BeamformerSet& v0,
                                  const SchedulerConfig& cfg, std::vector<double>* trace) {
  net.check_schedule(s);
  BeamformerSet v = v0;
  zero_unscheduled(v, s);
  double prev = net::weighted_sum_rate(w, v, s, net);
  if (trace) trace->push_back(prev);
  for (int it = 0; it < cfg.max_iters; ++it) {
    const AuxState aux = fplinq_update_aux(net, w, v, s);
    const auto z = weighted_y_covariances(aux);
    for (int j = 0; j < net.num_rx(); ++j) {
      const int i = s[j];
      if (i == kUnscheduled) continue;
      const Penalty pen = decompose(penalty_matrix(net, z, i), cfg.ridge);
      v[i] = solve_beam(pen, beam_numerator(net, w, aux, j, i), net.p_max(), cfg.bisection, nullptr);
    }
    const double cur = net::weighted_sum_rate(w, v, s, net);
    if (trace) trace->push_back(cur);
    if (converged_step(prev, cur, cfg.conv_tol)) break;
    prev = cur;
  }
  return v;
}

SlotSolution bcd_run(const NetworkInstance& net, const LinkWeights& w, const SchedulerConfig& cfg) {
  cfg.validate();
  FplinqState state = initial_state(net, w, cfg.streams(net.antennas()));
  SchedulerConfig inner = cfg;
  inner.max_iters = cfg.bcd_inner_iters;
  SlotSolution sol;
  double prev = net::weighted_sum_rate(w, state.beams, state.schedule, net);
  sol.objective_trace.push_back(prev);
  sol.schedule_trace.push_back(state.schedule);
  for (int it = 0; it < cfg.max_iters; ++it) {
    state.beams = wmmse_power_control(net, w, state.schedule, state.beams, inner);
    state.schedule = match_on_rates(net, w, state.beams, cfg);
    zero_unscheduled(state.beams, state.schedule);
    const double cur = net::weighted_sum_rate(w, state.beams, state.schedule, net);
    sol.objective_trace.push_back(cur);
    sol.schedule_trace.push_back(state.schedule);
    ++sol.iterations;
    if (converged_step(prev, cur, cfg.conv_tol)) {
      sol.converged = true;
      break;
    }
    prev = cur;
  }
  sol.schedule = state.schedule;
  sol.beams = std::move(state.beams);
  sol.objective = net::weighted_sum_rate(w, sol.beams, sol.schedule, net);
  return sol;
}

SlotSolution wmmse_fixed_run(const NetworkInstance& net, const LinkWeights& w,
                             const SchedulerConfig& cfg) {
  cfg.validate();
  FplinqState state = initial_state(net, w, cfg.streams(net.antennas()));
  SlotSolution sol;
  sol.schedule = state.schedule;
  sol.beams = wmmse_power_control(net, w, state.schedule, state.beams, cfg, &sol.objective_trace);
  sol.schedule_trace.assign(sol.objective_trace.size(), sol.schedule);
  sol.iterations = static_cast<int>(sol.objective_trace.size()) - 1;
  sol.converged = sol.iterations < cfg.max_iters;
  sol.objective = net::weighted_sum_rate(w, sol.beams, sol.schedule, net);
  return sol;
}

}  // namespace fplinq::sched

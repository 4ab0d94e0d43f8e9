#pragma once
//
// FPLinQ and the benchmark schedulers.
//
// Every scheduler maps (instance, pair weights, config) to a SlotSolution. The
// FP iteration keeps per-receiver auxiliaries (Gamma_j, Y_j) and proposes, for
// each associated pair (j, i), a candidate beam that does not depend on the
// current schedule; two bipartite matchings then pick beams and the schedule.
//

#include <functional>
#include <string>
#include <vector>

#include "fplinq/linops.hpp"
#include "fplinq/matching.hpp"
#include "fplinq/network.hpp"

namespace fplinq::sched {

using linops::ComplexMatrix;
using linops::HermitianPSD;
using net::BeamformerSet;
using net::LinkWeights;
using net::NetworkInstance;
using net::Schedule;

enum class RankLimit { Full, One };
enum class Matcher { Hungarian, Auction };

/// ITLinQ admits link l when eta * SNR_l + m_db >= max(INR_out, INR_in), all
/// in dB, where the INRs are the strongest cross gains from and to the other
/// admitted links.
struct ItlinqParams {
  double m_db = 25.0;
  double eta = 0.5;
  /// Power backoff ladder tried by ITLinQ+, in dB below p_max, first level
  /// that satisfies the admission rule wins.
  std::vector<double> backoff_db = {0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0};
};

struct SchedulerConfig {
  int max_iters = 100;
  double conv_tol = 1e-6;  // relative change of the objective over one iteration
  double flash_theta_db = 9.0;
  ItlinqParams itlinq;
  double ridge = 1e-12;
  bool no_power_control = false;
  RankLimit rank_limit = RankLimit::Full;
  Matcher matcher = Matcher::Hungarian;
  double auction_epsilon = 1e-9;
  int bcd_inner_iters = 10;  // WMMSE iterations per BCD schedule update
  linops::BisectionOptions bisection;

  /// Throws ConfigError with a "scheduler." field path.
  void validate() const;
  int streams(int antennas) const { return rank_limit == RankLimit::One ? 1 : antennas; }
};

struct SlotSolution {
  Schedule schedule;
  BeamformerSet beams;
  std::vector<double> objective_trace;  // weighted sum rate, initial point first
  std::vector<Schedule> schedule_trace;
  double objective = 0.0;  // weighted sum rate of (schedule, beams)
  int iterations = 0;
  bool converged = false;
};

// ---- FP building blocks -------------------------------------------------------

struct AuxState {
  std::vector<HermitianPSD> gamma;  // d x d per receiver
  std::vector<ComplexMatrix> y;     // N x d per receiver
};

/// Gamma_j = V^H H^H F_j^{-1} H V for the scheduled pair, 0 otherwise.
std::vector<HermitianPSD> fplinq_update_gamma(const NetworkInstance& net, const LinkWeights& w,
                                              const BeamformerSet& v, const Schedule& s);

/// Y_j = (F_j + H V V^H H^H)^{-1} sqrt(w) H V for the scheduled pair, 0 otherwise.
std::vector<ComplexMatrix> fplinq_update_y(const NetworkInstance& net, const LinkWeights& w,
                                           const BeamformerSet& v, const Schedule& s);

/// Both auxiliaries from one interference computation per receiver.
AuxState fplinq_update_aux(const NetworkInstance& net, const LinkWeights& w, const BeamformerSet& v,
                           const Schedule& s);

/// Candidate beams of all associated pairs. `beam[j][k]` belongs to the pair
/// (j, net.candidates(j)[k]); `m[i]` is the quadratic-penalty matrix
/// sum_j' H_j'i^H Y_j' (I + Gamma_j') Y_j'^H H_j'i of transmitter i.
struct CandidateBeams {
  std::vector<std::vector<ComplexMatrix>> beam;
  std::vector<std::vector<double>> mu;
  std::vector<ComplexMatrix> m;

  const ComplexMatrix& at(const NetworkInstance& net, int j, int i) const;
};

CandidateBeams fplinq_candidate_beams(const NetworkInstance& net, const LinkWeights& w,
                                      const AuxState& aux, const SchedulerConfig& cfg = {});

/// Contribution of pair (j, i) to the joint FP objective when transmitter i
/// uses beam `v_i`; `m_i` is CandidateBeams::m[i].
double fplinq_pair_lambda(const NetworkInstance& net, const LinkWeights& w, const AuxState& aux,
                          const ComplexMatrix& m_i, int j, int i, const ComplexMatrix& v_i);

/// lambda_ji at the candidate beams, laid out like CandidateBeams::beam.
std::vector<std::vector<double>> fplinq_lambda_weights(const NetworkInstance& net,
                                                       const LinkWeights& w, const AuxState& aux,
                                                       const CandidateBeams& cand);

/// Rate r_ji with beams fixed, interference from every transmitter with a
/// nonzero beam other than i; laid out like candidates(j).
std::vector<std::vector<double>> fixed_beam_pair_rates(const NetworkInstance& net,
                                                       const BeamformerSet& v);

struct FplinqState {
  Schedule schedule;
  BeamformerSet beams;
};

/// Full-power beams and a greedy weight-descending injective schedule.
FplinqState initial_state(const NetworkInstance& net, const LinkWeights& w, int streams);

/// Schedule that greedily takes associated pairs by descending weight (ties by
/// receiver, then transmitter index), skipping nonpositive weights.
Schedule greedy_schedule(const NetworkInstance& net, const LinkWeights& w);

/// What one FPLinQ step saw and produced.
struct StepRecord {
  AuxState aux;
  CandidateBeams candidates;
  Schedule beam_matching;  // matching on lambda (only its beams are kept)
};

/// Aux update, beam matching on lambda, receiver matching on w r. Returns the
/// intermediate quantities; `state` is updated in place.
StepRecord fplinq_step(const NetworkInstance& net, const LinkWeights& w, FplinqState& state,
                       const SchedulerConfig& cfg);

SlotSolution fplinq_run(const NetworkInstance& net, const LinkWeights& w, const SchedulerConfig& cfg);

/// Beamforming for a fixed schedule by the WMMSE-recovering FP pattern,
/// starting from `v0`. Only scheduled transmitters are updated; the others are
/// set to zero.
BeamformerSet wmmse_power_control(const NetworkInstance& net, const LinkWeights& w,
                                  const Schedule& s, const BeamformerSet& v0,
                                  const SchedulerConfig& cfg, std::vector<double>* trace = nullptr);

/// Alternates WMMSE at fixed s (transmitters outside s are zeroed) and
/// matching over s at fixed beams, starting from the greedy schedule.
SlotSolution bcd_run(const NetworkInstance& net, const LinkWeights& w, const SchedulerConfig& cfg);

/// WMMSE on the greedy initial schedule.
SlotSolution wmmse_fixed_run(const NetworkInstance& net, const LinkWeights& w,
                             const SchedulerConfig& cfg);

/// Maximum-weight matching with the solver chosen in cfg.
match::Matching solve_matching(const match::MatchingProblem& p, const SchedulerConfig& cfg);

// ---- scalar benchmarks (N = 1, one transmitter per receiver) -------------------

/// Received powers normalized by noise: g(j, i) = p_i |h_ji|^2 / sigma^2.
Eigen::MatrixXd normalized_gains(const NetworkInstance& net, const Eigen::VectorXd& power);

/// TIN condition for link `l` within the links listed in `active` (receiver l
/// is served by transmitter l), in dB exponents clipped at 0:
/// SNR_l >= max_{k != l} INR_{k l} + max_{k != l} INR_{l k}, empty maxima = 0.
bool tin_check(int l, const std::vector<int>& active, const Eigen::MatrixXd& gains);

/// Transmitter of each receiver in fixed-single mode; throws Unsupported otherwise.
std::vector<int> single_association(const NetworkInstance& net);

/// Admission order: descending weight, ties by index.
std::vector<int> admission_order(const NetworkInstance& net, const LinkWeights& w);

struct PoweredSchedule {
  Schedule schedule;
  Eigen::VectorXd power;  // per transmitter, watts
};

PoweredSchedule flashlinq_schedule(const NetworkInstance& net, const LinkWeights& w,
                                   const SchedulerConfig& cfg, const Eigen::VectorXd* power = nullptr);
PoweredSchedule itlinq_schedule(const NetworkInstance& net, const LinkWeights& w,
                                const SchedulerConfig& cfg, const Eigen::VectorXd* power = nullptr);
PoweredSchedule itlinq_plus_schedule(const NetworkInstance& net, const LinkWeights& w,
                                     const SchedulerConfig& cfg,
                                     const Eigen::VectorXd* power = nullptr);
Schedule baseline_all_on(const NetworkInstance& net);
PoweredSchedule baseline_greedy_tin(const NetworkInstance& net, const LinkWeights& w);

/// Beams from per-transmitter powers: sqrt(p_i / N) I (or the all-ones column).
BeamformerSet beams_from_power(const NetworkInstance& net, const Eigen::VectorXd& power,
                               int streams);

enum class BaseScheduler { FlashLinQ, ItlinqPlus };

/// Base scheduler and WMMSE alternately; the best iterate is returned.
SlotSolution composite_pc(BaseScheduler base, const NetworkInstance& net, const LinkWeights& w,
                          const SchedulerConfig& cfg);

// ---- registry -----------------------------------------------------------------

const std::vector<std::string>& scheduler_ids();
bool is_scheduler_id(const std::string& id);

/// Runs the scheduler named `id` (see scheduler_ids()). Variants such as
/// fplinq-nopc and fplinq-vector override the relevant config fields.
SlotSolution run_scheduler(const std::string& id, const NetworkInstance& net, const LinkWeights& w,
                           const SchedulerConfig& cfg);

}  // namespace fplinq::sched

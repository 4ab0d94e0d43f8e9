#pragma once
//
// D2D network instances: topology generation, ITU-R P.1411 LOS path loss,
// Rayleigh MIMO channels, and exact rate / weighted-sum-rate evaluation.
//
// Conventions: receivers are indexed by j, transmitters by i. Channel H_ji
// maps transmitter i to receiver j and is N x N. A beamformer V_i is N x d
// where d is the number of streams (d = N unless a rank limit is imposed).
// Rates are in bits/s/Hz.
//

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fplinq/linops.hpp"
#include "fplinq/rng.hpp"

namespace fplinq::net {

using linops::ComplexMatrix;

enum class AssociationMode { FixedSingle, Flexible };

/// Where the extra candidate transmitters of flexible mode are dropped.
enum class ExtraTxPlacement {
  Annulus,  // uniform distance in [link_dist_min, link_dist_max] around the receiver
  Area,     // uniform in the whole square
};

struct TopologyConfig {
  double area_side_m = 1000.0;
  int num_links = 50;
  double link_dist_min_m = 2.0;
  double link_dist_max_m = 65.0;
  int num_antennas = 1;
  double carrier_hz = 2.4e9;
  double bandwidth_hz = 5e6;
  double tx_power_max_dbm = 20.0;
  double noise_psd_dbm_hz = -169.0;
  double noise_figure_db = 7.0;
  double antenna_gain_dbi = 2.5;
  double antenna_height_m = 1.5;
  double shadowing_std_db = 10.0;
  AssociationMode association_mode = AssociationMode::FixedSingle;
  int extra_tx_per_rx = 2;
  double frac_tx_extra_rx = 1.0 / 3.0;
  ExtraTxPlacement extra_tx_placement = ExtraTxPlacement::Annulus;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  double noise_power_w() const;
  double p_max_w() const;
  double wavelength_m() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

inline constexpr int kUnscheduled = -1;

/// Per-receiver choice of transmitter (or kUnscheduled).
struct Schedule {
  std::vector<int> tx_of_rx;

  static Schedule none(int num_rx) { return {std::vector<int>(num_rx, kUnscheduled)}; }
  int operator[](int j) const { return tx_of_rx[j]; }
  int size() const { return static_cast<int>(tx_of_rx.size()); }
  int num_scheduled() const;
  bool operator==(const Schedule&) const = default;
};

/// Per-transmitter precoder V_i (N x d).
struct BeamformerSet {
  std::vector<ComplexMatrix> v;

  const ComplexMatrix& operator[](int i) const { return v[i]; }
  ComplexMatrix& operator[](int i) { return v[i]; }
  int size() const { return static_cast<int>(v.size()); }
};

/// Pair weights w_ji, stored densely as a num_rx x num_tx matrix (zero for
/// non-associated pairs).
using LinkWeights = Eigen::MatrixXd;

class NetworkInstance {
 public:
  NetworkInstance() = default;

  /// Builds an instance from explicit data and checks every invariant.
  /// `candidates[j]` is K_j; channels are indexed [j * num_tx + i].
  NetworkInstance(int num_tx, int num_rx, int antennas, std::vector<std::vector<int>> candidates,
                  std::vector<ComplexMatrix> channels, double noise_power, double p_max,
                  std::vector<Point> tx_pos = {}, std::vector<Point> rx_pos = {});

  int num_tx() const { return num_tx_; }
  int num_rx() const { return num_rx_; }
  int antennas() const { return antennas_; }
  double noise_power() const { return noise_power_; }
  double p_max() const { return p_max_; }

  const ComplexMatrix& channel(int j, int i) const { return channels_[index(j, i)]; }
  const std::vector<int>& candidates(int j) const { return candidates_[j]; }  // K_j
  const std::vector<int>& served(int i) const { return served_[i]; }          // L_i
  bool associated(int j, int i) const { return assoc_(j, i) != 0; }
  int num_associations() const;

  const std::vector<Point>& tx_positions() const { return tx_pos_; }
  const std::vector<Point>& rx_positions() const { return rx_pos_; }

  /// True when every receiver has exactly one candidate, distinct across
  /// receivers, and every transmitter serves exactly one receiver.
  bool is_fixed_single() const;

  /// All-ones weights on associated pairs.
  LinkWeights unit_weights() const;

  /// Throws Error(InvalidArgument) when the schedule violates K_j membership
  /// or injectivity.
  void check_schedule(const Schedule& s) const;
  bool schedule_valid(const Schedule& s) const;

  /// Throws Error(InvalidArgument) on shape or power violations.
  void check_beams(const BeamformerSet& v, double rel_slack = 1e-9) const;

  /// sqrt(p_max / N) I for every transmitter (d = N), or sqrt(p_max / N) 1
  /// for a single stream (d = 1). Both spend the full budget isotropically.
  BeamformerSet full_power_beams(int streams) const;

  nlohmann::json to_json() const;
  static NetworkInstance from_json(const nlohmann::json& doc);

 private:
  std::size_t index(int j, int i) const { return static_cast<std::size_t>(j) * num_tx_ + i; }

  int num_tx_ = 0;
  int num_rx_ = 0;
  int antennas_ = 1;
  double noise_power_ = 1.0;
  double p_max_ = 1.0;
  std::vector<std::vector<int>> candidates_;
  std::vector<std::vector<int>> served_;
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> assoc_;
  std::vector<ComplexMatrix> channels_;
  std::vector<Point> tx_pos_;
  std::vector<Point> rx_pos_;
};

/// ITU-R P.1411 LOS lower-bound path loss in dB with both antenna gains
/// subtracted.
double pathloss_db(double distance_m, const TopologyConfig& cfg);

/// H = sqrt(10^(-(pl + shadow)/10)) G, G i.i.d. CN(0, 1), N x N.
ComplexMatrix draw_channel(double pl_db, double shadow_db, int antennas, rng::RandomStream& rng);

/// Deterministic in (cfg, seed). Positions and shadowing come from the
/// instance stream, small-scale fading from substream `fading_substream` of
/// the fading stream (vary it to redraw fading over fixed geometry).
NetworkInstance generate_topology(const TopologyConfig& cfg, std::uint64_t seed,
                                  std::uint32_t fading_substream = 0);

/// F_j = sigma^2 I + sum over scheduled j' != j of H_{j s_j'} V V^H H^H.
ComplexMatrix interference_plus_noise(int j, const BeamformerSet& v, const Schedule& s,
                                      const NetworkInstance& net);

/// log2 |I + V^H H^H F_j^{-1} H V|, 0 when j is unscheduled.
double link_rate(int j, const BeamformerSet& v, const Schedule& s, const NetworkInstance& net);

/// Rates of every receiver.
Eigen::VectorXd link_rates(const BeamformerSet& v, const Schedule& s, const NetworkInstance& net);

/// sum_j w_{j s_j} R_j.
double weighted_sum_rate(const LinkWeights& w, const BeamformerSet& v, const Schedule& s,
                         const NetworkInstance& net);

/// Rate of pair (j, i) under fixed beams when every transmitter in `active`
/// other than i interferes (schedule-free rate used by the receiver matching).
double pair_rate(int j, int i, const BeamformerSet& v, const std::vector<bool>& active,
                 const NetworkInstance& net);

}  // namespace fplinq::net

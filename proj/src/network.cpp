#include "fplinq/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fplinq/errors.hpp"

namespace fplinq::net {

using linops::Complex;

namespace {

constexpr double kSpeedOfLight = 299792458.0;

double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(std::string("topology.") + field, what);
}

std::string describe(const char* what, int j, int i) {
  std::ostringstream os;
  os << what << " (rx " << j << ", tx " << i << ")";
  return os.str();
}

}  // namespace

// ---- config -----------------------------------------------------------------

void TopologyConfig::validate() const {
  require(area_side_m > 0.0, "area_side_m", "must be positive");
  require(num_links >= 1, "num_links", "must be at least 1");
  require(link_dist_min_m > 0.0, "link_dist_min_m", "must be positive");
  require(link_dist_min_m < link_dist_max_m, "link_dist_max_m", "must exceed link_dist_min_m");
  require(num_antennas >= 1, "num_antennas", "must be at least 1");
  require(carrier_hz > 0.0, "carrier_hz", "must be positive");
  require(bandwidth_hz > 0.0, "bandwidth_hz", "must be positive");
  require(std::isfinite(tx_power_max_dbm), "tx_power_max_dbm", "must be finite");
  require(std::isfinite(noise_psd_dbm_hz), "noise_psd_dbm_hz", "must be finite");
  require(std::isfinite(noise_figure_db), "noise_figure_db", "must be finite");
  require(std::isfinite(antenna_gain_dbi), "antenna_gain_dbi", "must be finite");
  require(antenna_height_m > 0.0, "antenna_height_m", "must be positive");
  require(shadowing_std_db >= 0.0, "shadowing_std_db", "must be nonnegative");
  require(extra_tx_per_rx >= 0, "extra_tx_per_rx", "must be nonnegative");
  require(frac_tx_extra_rx >= 0.0 && frac_tx_extra_rx <= 1.0, "frac_tx_extra_rx",
          "must lie in [0, 1]");
}

double TopologyConfig::noise_power_w() const {
  return dbm_to_w(noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

double TopologyConfig::p_max_w() const { return dbm_to_w(tx_power_max_dbm); }

double TopologyConfig::wavelength_m() const { return kSpeedOfLight / carrier_hz; }

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

int Schedule::num_scheduled() const {
  return static_cast<int>(std::count_if(tx_of_rx.begin(), tx_of_rx.end(),
                                        [](int i) { return i != kUnscheduled; }));
}

// ---- instance ---------------------------------------------------------------

NetworkInstance::NetworkInstance(int num_tx, int num_rx, int antennas,
                                 std::vector<std::vector<int>> candidates,
                                 std::vector<ComplexMatrix> channels, double noise_power,
                                 double p_max, std::vector<Point> tx_pos, std::vector<Point> rx_pos)
    : num_tx_(num_tx),
      num_rx_(num_rx),
      antennas_(antennas),
      noise_power_(noise_power),
      p_max_(p_max),
      candidates_(std::move(candidates)),
      channels_(std::move(channels)),
      tx_pos_(std::move(tx_pos)),
      rx_pos_(std::move(rx_pos)) {
  if (num_tx < 1 || num_rx < 1 || antennas < 1) {
    throw Error(Errc::InvalidArgument, "NetworkInstance: sizes must be positive");
  }
  if (!(noise_power > 0.0) || !(p_max > 0.0)) {
    throw Error(Errc::InvalidArgument, "NetworkInstance: noise power and p_max must be positive");
  }
  if (static_cast<int>(candidates_.size()) != num_rx) {
    throw Error(Errc::DimensionMismatch, "NetworkInstance: one candidate list per receiver");
  }
  if (channels_.size() != static_cast<std::size_t>(num_tx) * num_rx) {
    throw Error(Errc::DimensionMismatch, "NetworkInstance: expected num_rx * num_tx channels");
  }
  if ((!tx_pos_.empty() && static_cast<int>(tx_pos_.size()) != num_tx) ||
      (!rx_pos_.empty() && static_cast<int>(rx_pos_.size()) != num_rx)) {
    throw Error(Errc::DimensionMismatch, "NetworkInstance: position list sizes");
  }

  assoc_.setZero(num_rx, num_tx);
  served_.assign(num_tx, {});
  for (int j = 0; j < num_rx; ++j) {
    auto& k = candidates_[j];
    std::sort(k.begin(), k.end());
    if (std::adjacent_find(k.begin(), k.end()) != k.end()) {
      throw Error(Errc::InvalidArgument, describe("duplicate candidate", j, -1));
    }
    for (int i : k) {
      if (i < 0 || i >= num_tx) throw Error(Errc::InvalidArgument, describe("bad candidate", j, i));
      assoc_(j, i) = 1;
      served_[i].push_back(j);
    }
  }
  for (int j = 0; j < num_rx; ++j) {
    for (int i = 0; i < num_tx; ++i) {
      const ComplexMatrix& h = channel(j, i);
      if (h.rows() != antennas || h.cols() != antennas) {
        throw Error(Errc::DimensionMismatch, describe("channel must be N x N", j, i));
      }
      if (!h.allFinite()) throw Error(Errc::InvalidArgument, describe("non-finite channel", j, i));
    }
  }
}

int NetworkInstance::num_associations() const {
  int n = 0;
  for (const auto& k : candidates_) n += static_cast<int>(k.size());
  return n;
}

bool NetworkInstance::is_fixed_single() const {
  if (num_tx_ != num_rx_) return false;
  for (int j = 0; j < num_rx_; ++j) {
    if (candidates_[j].size() != 1) return false;
  }
  for (int i = 0; i < num_tx_; ++i) {
    if (served_[i].size() != 1) return false;
  }
  return true;
}

LinkWeights NetworkInstance::unit_weights() const {
  return assoc_.cast<double>();
}

void NetworkInstance::check_schedule(const Schedule& s) const {
  if (s.size() != num_rx_) {
    throw Error(Errc::DimensionMismatch, "schedule must have one entry per receiver");
  }
  std::vector<int> owner(num_tx_, kUnscheduled);
  for (int j = 0; j < num_rx_; ++j) {
    const int i = s[j];
    if (i == kUnscheduled) continue;
    if (i < 0 || i >= num_tx_ || !associated(j, i)) {
      throw Error(Errc::InvalidArgument, describe("scheduled pair is not associated", j, i));
    }
    if (owner[i] != kUnscheduled) {
      throw Error(Errc::InvalidArgument, describe("transmitter scheduled twice", j, i));
    }
    owner[i] = j;
  }
}

bool NetworkInstance::schedule_valid(const Schedule& s) const {
  try {
    check_schedule(s);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void NetworkInstance::check_beams(const BeamformerSet& v, double rel_slack) const {
  if (v.size() != num_tx_) throw Error(Errc::DimensionMismatch, "one beamformer per transmitter");
  for (int i = 0; i < num_tx_; ++i) {
    if (v[i].rows() != antennas_ || v[i].cols() < 1) {
      throw Error(Errc::DimensionMismatch, describe("beamformer must be N x d", -1, i));
    }
    if (!v[i].allFinite()) throw Error(Errc::InvalidArgument, describe("non-finite beam", -1, i));
    if (v[i].squaredNorm() > p_max_ * (1.0 + rel_slack)) {
      throw Error(Errc::InvalidArgument, describe("power budget exceeded", -1, i));
    }
  }
}

BeamformerSet NetworkInstance::full_power_beams(int streams) const {
  const double scale = std::sqrt(p_max_ / antennas_);
  BeamformerSet out;
  out.v.reserve(num_tx_);
  for (int i = 0; i < num_tx_; ++i) {
    if (streams == 1) {
      out.v.push_back(ComplexMatrix::Constant(antennas_, 1, Complex(scale, 0.0)));
    } else {
      out.v.push_back(scale * ComplexMatrix::Identity(antennas_, antennas_));
    }
  }
  return out;
}

// ---- serialization ----------------------------------------------------------

namespace {

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  // Row-major, each entry as [re, im].
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const nlohmann::json& doc, int n) {
  ComplexMatrix m(n, n);
  if (!doc.is_array() || static_cast<int>(doc.size()) != n) {
    throw Error(Errc::DimensionMismatch, "channel JSON must have N rows");
  }
  for (int r = 0; r < n; ++r) {
    if (!doc[r].is_array() || static_cast<int>(doc[r].size()) != n) {
      throw Error(Errc::DimensionMismatch, "channel JSON must have N columns");
    }
    for (int c = 0; c < n; ++c) m(r, c) = Complex(doc[r][c].at(0), doc[r][c].at(1));
  }
  return m;
}

nlohmann::json points_to_json(const std::vector<Point>& pts) {
  nlohmann::json out = nlohmann::json::array();
  for (const Point& p : pts) out.push_back({p.x, p.y});
  return out;
}

std::vector<Point> points_from_json(const nlohmann::json& doc) {
  std::vector<Point> out;
  for (const auto& p : doc) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

}  // namespace

nlohmann::json NetworkInstance::to_json() const {
  nlohmann::json doc;
  doc["num_tx"] = num_tx_;
  doc["num_rx"] = num_rx_;
  doc["antennas"] = antennas_;
  doc["noise_power"] = noise_power_;
  doc["p_max"] = p_max_;
  doc["candidates"] = candidates_;
  doc["tx_positions"] = points_to_json(tx_pos_);
  doc["rx_positions"] = points_to_json(rx_pos_);
  nlohmann::json ch = nlohmann::json::array();
  for (const auto& h : channels_) ch.push_back(matrix_to_json(h));
  doc["channels"] = std::move(ch);
  return doc;
}

NetworkInstance NetworkInstance::from_json(const nlohmann::json& doc) {
  try {
    const int num_tx = doc.at("num_tx");
    const int num_rx = doc.at("num_rx");
    const int n = doc.at("antennas");
    std::vector<ComplexMatrix> channels;
    for (const auto& h : doc.at("channels")) channels.push_back(matrix_from_json(h, n));
    return NetworkInstance(num_tx, num_rx, n, doc.at("candidates").get<std::vector<std::vector<int>>>(),
                           std::move(channels), doc.at("noise_power"), doc.at("p_max"),
                           points_from_json(doc.value("tx_positions", nlohmann::json::array())),
                           points_from_json(doc.value("rx_positions", nlohmann::json::array())));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed instance JSON: ") + e.what());
  }
}

// ---- channel model ----------------------------------------------------------

double pathloss_db(double distance_m, const TopologyConfig& cfg) {
  if (!(distance_m > 0.0)) throw Error(Errc::InvalidArgument, "pathloss_db: distance must be > 0");
  const double lambda = cfg.wavelength_m();
  const double h = cfg.antenna_height_m;
  const double r_bp = 4.0 * h * h / lambda;
  const double l_bp = std::abs(20.0 * std::log10(lambda * lambda / (8.0 * std::numbers::pi * h * h)));
  const double slope = distance_m <= r_bp ? 20.0 : 40.0;
  return l_bp + slope * std::log10(distance_m / r_bp) - 2.0 * cfg.antenna_gain_dbi;
}

ComplexMatrix draw_channel(double pl_db, double shadow_db, int antennas, rng::RandomStream& rng) {
  if (antennas < 1) throw Error(Errc::InvalidArgument, "draw_channel: N must be >= 1");
  const double amp = std::sqrt(std::pow(10.0, -(pl_db + shadow_db) / 10.0));
  ComplexMatrix h(antennas, antennas);
  for (int r = 0; r < antennas; ++r) {
    for (int c = 0; c < antennas; ++c) h(r, c) = amp * rng.complex_normal();
  }
  return h;
}

NetworkInstance generate_topology(const TopologyConfig& cfg, std::uint64_t seed,
                                  std::uint32_t fading_substream) {
  cfg.validate();
  rng::RandomStream inst(seed, rng::Stream::Instance);
  rng::RandomStream fading(seed, rng::Stream::Fading, fading_substream);

  const int links = cfg.num_links;
  const bool flexible = cfg.association_mode == AssociationMode::Flexible;
  const int extra = flexible ? cfg.extra_tx_per_rx : 0;
  const int num_rx = links;
  const int num_tx = links * (1 + extra);

  std::vector<Point> tx(num_tx), rx(num_rx);
  auto around = [&](const Point& c) {
    const double d = inst.uniform(cfg.link_dist_min_m, cfg.link_dist_max_m);
    const double a = inst.uniform(0.0, 2.0 * std::numbers::pi);
    return Point{c.x + d * std::cos(a), c.y + d * std::sin(a)};
  };
  for (int k = 0; k < links; ++k) {
    tx[k] = {inst.uniform(0.0, cfg.area_side_m), inst.uniform(0.0, cfg.area_side_m)};
    rx[k] = around(tx[k]);
  }

  std::vector<std::vector<int>> cand(num_rx);
  for (int j = 0; j < num_rx; ++j) {
    cand[j].push_back(j);
    for (int e = 0; e < extra; ++e) {
      const int i = links + j * extra + e;
      if (cfg.extra_tx_placement == ExtraTxPlacement::Annulus) {
        tx[i] = around(rx[j]);
      } else {
        tx[i] = {inst.uniform(0.0, cfg.area_side_m), inst.uniform(0.0, cfg.area_side_m)};
      }
      cand[j].push_back(i);
    }
  }

  if (flexible) {
    // A random subset of transmitters also serves its nearest other receiver.
    const int picks = static_cast<int>(std::lround(cfg.frac_tx_extra_rx * num_tx));
    std::vector<int> order(num_tx);
    for (int i = 0; i < num_tx; ++i) order[i] = i;
    for (int k = 0; k < picks; ++k) {
      const int r = k + static_cast<int>(inst.below(static_cast<std::uint32_t>(num_tx - k)));
      std::swap(order[k], order[r]);
    }
    std::vector<int> chosen(order.begin(), order.begin() + picks);
    std::sort(chosen.begin(), chosen.end());
    for (int i : chosen) {
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < num_rx; ++j) {
        if (std::find(cand[j].begin(), cand[j].end(), i) != cand[j].end()) continue;
        const double d = distance(tx[i], rx[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best >= 0) cand[best].push_back(i);
    }
  }

  const int n = cfg.num_antennas;
  std::vector<ComplexMatrix> channels;
  channels.reserve(static_cast<std::size_t>(num_rx) * num_tx);
  for (int j = 0; j < num_rx; ++j) {
    for (int i = 0; i < num_tx; ++i) {
      const double d = std::max(distance(tx[i], rx[j]), cfg.link_dist_min_m);
      const double shadow = cfg.shadowing_std_db * inst.normal();
      channels.push_back(draw_channel(pathloss_db(d, cfg), shadow, n, fading));
    }
  }

  return NetworkInstance(num_tx, num_rx, n, std::move(cand), std::move(channels),
                         cfg.noise_power_w(), cfg.p_max_w(), std::move(tx), std::move(rx));
}

// ---- rates ------------------------------------------------------------------

namespace {

void add_covariance(ComplexMatrix& f, const ComplexMatrix& h, const ComplexMatrix& v) {
  if (f.rows() == 1 && v.cols() == 1) {
    f(0, 0) += std::norm(h(0, 0) * v(0, 0));
    return;
  }
  const ComplexMatrix hv = h * v;
  f.noalias() += hv * hv.adjoint();
}

double rate_given_f(const ComplexMatrix& f, const ComplexMatrix& h, const ComplexMatrix& v) {
  const ComplexMatrix hv = h * v;
  const ComplexMatrix x = linops::psd_solve_unchecked(f, hv);
  ComplexMatrix m = hv.adjoint() * x;
  m.diagonal().array() += 1.0;
  return linops::log_det_hpd(m) / std::numbers::ln2;
}

}  // namespace

ComplexMatrix interference_plus_noise(int j, const BeamformerSet& v, const Schedule& s,
                                      const NetworkInstance& net) {
  const int n = net.antennas();
  ComplexMatrix f = net.noise_power() * ComplexMatrix::Identity(n, n);
  for (int jp = 0; jp < s.size(); ++jp) {
    if (jp == j || s[jp] == kUnscheduled) continue;
    add_covariance(f, net.channel(j, s[jp]), v[s[jp]]);
  }
  return linops::hermitian_part(f);
}

double link_rate(int j, const BeamformerSet& v, const Schedule& s, const NetworkInstance& net) {
  const int i = s[j];
  if (i == kUnscheduled) return 0.0;
  return rate_given_f(interference_plus_noise(j, v, s, net), net.channel(j, i), v[i]);
}

Eigen::VectorXd link_rates(const BeamformerSet& v, const Schedule& s, const NetworkInstance& net) {
  Eigen::VectorXd r(net.num_rx());
  for (int j = 0; j < net.num_rx(); ++j) r(j) = link_rate(j, v, s, net);
  return r;
}

double weighted_sum_rate(const LinkWeights& w, const BeamformerSet& v, const Schedule& s,
                         const NetworkInstance& net) {
  double total = 0.0;
  for (int j = 0; j < net.num_rx(); ++j) {
    const int i = s[j];
    if (i == kUnscheduled || w(j, i) == 0.0) continue;
    total += w(j, i) * link_rate(j, v, s, net);
  }
  return total;
}

double pair_rate(int j, int i, const BeamformerSet& v, const std::vector<bool>& active,
                 const NetworkInstance& net) {
  const int n = net.antennas();
  ComplexMatrix f = net.noise_power() * ComplexMatrix::Identity(n, n);
  for (int ip = 0; ip < net.num_tx(); ++ip) {
    if (ip == i || !active[ip]) continue;
    add_covariance(f, net.channel(j, ip), v[ip]);
  }
  return rate_given_f(linops::hermitian_part(f), net.channel(j, i), v[i]);
}

}  // namespace fplinq::net

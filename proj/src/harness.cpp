#include "fplinq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <type_traits>

#include "fplinq/errors.hpp"
#include "fplinq/fairness.hpp"

namespace fplinq::harness {

using nlohmann::json;

namespace {

/// Typed access to one JSON object; remembers the keys it consumed so that
/// leftovers can be reported as unknown fields.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  template <class T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v->is_boolean()) throw ConfigError(where(key), "expected a boolean");
      out = v->get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) throw ConfigError(where(key), "expected an integer");
      if (v->is_number_unsigned()) {
        out = static_cast<T>(v->get<std::uint64_t>());
      } else {
        const auto x = v->get<std::int64_t>();
        if (std::is_unsigned_v<T> && x < 0) throw ConfigError(where(key), "must be nonnegative");
        out = static_cast<T>(x);
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v->is_number()) throw ConfigError(where(key), "expected a number");
      out = v->get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v->is_string()) throw ConfigError(where(key), "expected a string");
      out = v->get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  }

  template <class E>
  void get_enum(const std::string& key, E& out, const std::vector<std::pair<std::string, E>>& names) {
    std::string text;
    get(key, text);
    if (text.empty() && find(key) == nullptr) return;
    for (const auto& [name, value] : names) {
      if (name == text) {
        out = value;
        return;
      }
    }
    std::string allowed;
    for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : ", ") + name;
    throw ConfigError(where(key), "unknown value '" + text + "' (allowed: " + allowed + ")");
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where(it.key()), "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

const std::vector<std::pair<std::string, net::AssociationMode>> kModes = {
    {"fixed_single", net::AssociationMode::FixedSingle}, {"flexible", net::AssociationMode::Flexible}};
const std::vector<std::pair<std::string, net::ExtraTxPlacement>> kPlacements = {
    {"annulus", net::ExtraTxPlacement::Annulus}, {"area", net::ExtraTxPlacement::Area}};
const std::vector<std::pair<std::string, sched::RankLimit>> kRanks = {
    {"full", sched::RankLimit::Full}, {"one", sched::RankLimit::One}};
const std::vector<std::pair<std::string, sched::Matcher>> kMatchers = {
    {"hungarian", sched::Matcher::Hungarian}, {"auction", sched::Matcher::Auction}};
const std::vector<std::pair<std::string, Objective>> kObjectives = {
    {"sum_rate", Objective::SumRate}, {"pf_log_utility", Objective::PfLogUtility}};

template <class E>
std::string name_of(E value, const std::vector<std::pair<std::string, E>>& names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "?";
}

void parse_topology(const json& doc, net::TopologyConfig& t) {
  Fields f(doc, "topology");
  f.get("area_side_m", t.area_side_m);
  f.get("num_links", t.num_links);
  f.get("link_dist_min_m", t.link_dist_min_m);
  f.get("link_dist_max_m", t.link_dist_max_m);
  f.get("num_antennas", t.num_antennas);
  f.get("carrier_hz", t.carrier_hz);
  f.get("bandwidth_hz", t.bandwidth_hz);
  f.get("tx_power_max_dbm", t.tx_power_max_dbm);
  f.get("noise_psd_dbm_hz", t.noise_psd_dbm_hz);
  f.get("noise_figure_db", t.noise_figure_db);
  f.get("antenna_gain_dbi", t.antenna_gain_dbi);
  f.get("antenna_height_m", t.antenna_height_m);
  f.get("shadowing_std_db", t.shadowing_std_db);
  f.get_enum("association_mode", t.association_mode, kModes);
  f.get("extra_tx_per_rx", t.extra_tx_per_rx);
  f.get("frac_tx_extra_rx", t.frac_tx_extra_rx);
  f.get_enum("extra_tx_placement", t.extra_tx_placement, kPlacements);
  f.finish();
}

void parse_scheduler(const json& doc, ExperimentConfig& cfg) {
  Fields f(doc, "scheduler");
  if (const json* id = f.find("id")) {
    cfg.schedulers.clear();
    if (id->is_string()) {
      cfg.schedulers.push_back(id->get<std::string>());
    } else if (id->is_array()) {
      for (const auto& x : *id) {
        if (!x.is_string()) throw ConfigError("scheduler.id", "expected strings");
        cfg.schedulers.push_back(x.get<std::string>());
      }
    } else {
      throw ConfigError("scheduler.id", "expected a string or a list of strings");
    }
  }
  auto& s = cfg.scheduler;
  f.get("max_iters", s.max_iters);
  f.get("conv_tol", s.conv_tol);
  f.get("flash_theta_db", s.flash_theta_db);
  f.get("ridge", s.ridge);
  f.get("no_power_control", s.no_power_control);
  f.get_enum("rank_limit", s.rank_limit, kRanks);
  f.get_enum("matcher", s.matcher, kMatchers);
  f.get("auction_epsilon", s.auction_epsilon);
  f.get("bcd_inner_iters", s.bcd_inner_iters);
  if (const json* it = f.find("itlinq")) {
    Fields g(*it, "scheduler.itlinq");
    g.get("m_db", s.itlinq.m_db);
    g.get("eta", s.itlinq.eta);
    if (const json* b = g.find("backoff_db")) {
      if (!b->is_array()) throw ConfigError("scheduler.itlinq.backoff_db", "expected a list");
      s.itlinq.backoff_db.clear();
      for (const auto& x : *b) {
        if (!x.is_number()) throw ConfigError("scheduler.itlinq.backoff_db", "expected numbers");
        s.itlinq.backoff_db.push_back(x.get<double>());
      }
    }
    g.finish();
  }
  f.finish();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

// ---- config -----------------------------------------------------------------

void ExperimentConfig::validate() const {
  topology.validate();
  scheduler.validate();
  if (schedulers.empty()) throw ConfigError("scheduler.id", "at least one scheduler is required");
  for (const auto& id : schedulers) {
    if (!sched::is_scheduler_id(id)) throw ConfigError("scheduler.id", "unknown scheduler '" + id + "'");
  }
  if (num_seeds < 1) throw ConfigError("num_seeds", "must be at least 1");
  if (num_slots < 1) throw ConfigError("num_slots", "must be at least 1");
  if (threads < 0) throw ConfigError("threads", "must be nonnegative");
  if (!(pf_alpha > 0.0 && pf_alpha < 1.0)) throw ConfigError("fairness.alpha", "must lie in (0, 1)");
  if (!(pf_floor > 0.0)) throw ConfigError("fairness.floor", "must be positive");
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  Fields f(doc, "");
  if (const json* t = f.find("topology")) parse_topology(*t, cfg.topology);
  if (const json* s = f.find("scheduler")) parse_scheduler(*s, cfg);
  f.get("num_seeds", cfg.num_seeds);
  f.get("num_slots", cfg.num_slots);
  f.get_enum("objective", cfg.objective, kObjectives);
  f.get("output_dir", cfg.output_dir);
  f.get("seed", cfg.seed);
  f.get("redraw_fading", cfg.redraw_fading);
  f.get("threads", cfg.threads);
  if (const json* p = f.find("fairness")) {
    Fields g(*p, "fairness");
    g.get("alpha", cfg.pf_alpha);
    g.get("floor", cfg.pf_floor);
    g.finish();
  }
  f.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
  const auto& t = cfg.topology;
  const auto& s = cfg.scheduler;
  return {
      {"topology",
       {{"area_side_m", t.area_side_m},
        {"num_links", t.num_links},
        {"link_dist_min_m", t.link_dist_min_m},
        {"link_dist_max_m", t.link_dist_max_m},
        {"num_antennas", t.num_antennas},
        {"carrier_hz", t.carrier_hz},
        {"bandwidth_hz", t.bandwidth_hz},
        {"tx_power_max_dbm", t.tx_power_max_dbm},
        {"noise_psd_dbm_hz", t.noise_psd_dbm_hz},
        {"noise_figure_db", t.noise_figure_db},
        {"antenna_gain_dbi", t.antenna_gain_dbi},
        {"antenna_height_m", t.antenna_height_m},
        {"shadowing_std_db", t.shadowing_std_db},
        {"association_mode", name_of(t.association_mode, kModes)},
        {"extra_tx_per_rx", t.extra_tx_per_rx},
        {"frac_tx_extra_rx", t.frac_tx_extra_rx},
        {"extra_tx_placement", name_of(t.extra_tx_placement, kPlacements)}}},
      {"scheduler",
       {{"id", cfg.schedulers},
        {"max_iters", s.max_iters},
        {"conv_tol", s.conv_tol},
        {"flash_theta_db", s.flash_theta_db},
        {"itlinq", {{"m_db", s.itlinq.m_db}, {"eta", s.itlinq.eta}, {"backoff_db", s.itlinq.backoff_db}}},
        {"ridge", s.ridge},
        {"no_power_control", s.no_power_control},
        {"rank_limit", name_of(s.rank_limit, kRanks)},
        {"matcher", name_of(s.matcher, kMatchers)},
        {"auction_epsilon", s.auction_epsilon},
        {"bcd_inner_iters", s.bcd_inner_iters}}},
      {"num_seeds", cfg.num_seeds},
      {"num_slots", cfg.num_slots},
      {"objective", name_of(cfg.objective, kObjectives)},
      {"output_dir", cfg.output_dir},
      {"seed", cfg.seed},
      {"redraw_fading", cfg.redraw_fading},
      {"threads", cfg.threads},
      {"fairness", {{"alpha", cfg.pf_alpha}, {"floor", cfg.pf_floor}}},
  };
}

// ---- running ----------------------------------------------------------------

SeedResult run_seed(const ExperimentConfig& cfg, const std::string& scheduler, std::uint64_t seed) {
  SeedResult out;
  out.seed = seed;
  net::NetworkInstance net = net::generate_topology(cfg.topology, seed);
  fair::RateAverages avg = fair::RateAverages::start(net, cfg.pf_alpha, cfg.pf_floor);
  const net::LinkWeights unit = net.unit_weights();
  net::LinkWeights w = cfg.objective == Objective::PfLogUtility ? avg.weights(net) : unit;

  out.mean_rate = Eigen::VectorXd::Zero(net.num_rx());
  for (int slot = 0; slot < cfg.num_slots; ++slot) {
    if (cfg.redraw_fading && slot > 0) {
      net = net::generate_topology(cfg.topology, seed, static_cast<std::uint32_t>(slot));
    }
    const sched::SlotSolution sol = sched::run_scheduler(scheduler, net, w, cfg.scheduler);
    const Eigen::VectorXd rates = net::link_rates(sol.beams, sol.schedule, net);
    if (slot == 0) out.convergence = sol.objective_trace;
    out.slot_rates.push_back(rates);
    out.slot_sum_rate.push_back(rates.sum());
    out.mean_rate += rates;
    const net::LinkWeights next = fair::pf_update(avg, net, sol.schedule, rates);
    if (cfg.objective == Objective::PfLogUtility) w = next;
  }
  out.mean_rate /= cfg.num_slots;
  out.log_utility = fair::log_utility(avg);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  result.config = cfg;
  const int num_sched = static_cast<int>(cfg.schedulers.size());
  for (const auto& id : cfg.schedulers) {
    result.runs.push_back({id, std::vector<SeedResult>(cfg.num_seeds)});
  }

  const int tasks = num_sched * cfg.num_seeds;
  int workers = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, tasks);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int t = next++; t < tasks; t = next++) {
      const int s = t / cfg.num_seeds;
      const int k = t % cfg.num_seeds;
      try {
        result.runs[s].seeds[k] = run_seed(cfg, cfg.schedulers[s], cfg.seed + k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

double SchedulerResult::mean_sum_rate() const {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& s : seeds) {
    for (double r : s.slot_sum_rate) {
      total += r;
      ++count;
    }
  }
  return count ? total / count : 0.0;
}

double SchedulerResult::mean_log_utility() const {
  if (seeds.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : seeds) total += s.log_utility;
  return total / seeds.size();
}

std::vector<double> SchedulerResult::rate_samples() const {
  std::vector<double> out;
  for (const auto& s : seeds) {
    for (Eigen::Index j = 0; j < s.mean_rate.size(); ++j) out.push_back(s.mean_rate(j));
  }
  return out;
}

// ---- export -----------------------------------------------------------------

std::string export_cdf(const ExperimentResult& result) {
  std::ostringstream os;
  os << "scheduler,rate_bps,cdf\n";
  const double bw = result.config.topology.bandwidth_hz;
  for (const auto& run : result.runs) {
    std::vector<double> x = run.rate_samples();
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      os << run.id << ',' << fmt(x[k] * bw) << ',' << fmt((k + 1) / n) << '\n';
    }
  }
  return os.str();
}

std::string export_convergence(const ExperimentResult& result) {
  std::ostringstream os;
  os << "scheduler,antennas,iteration,sum_rate\n";
  for (const auto& run : result.runs) {
    std::size_t len = 0;
    for (const auto& s : run.seeds) len = std::max(len, s.convergence.size());
    for (std::size_t it = 0; it < len; ++it) {
      double total = 0.0;
      for (const auto& s : run.seeds) total += s.convergence[std::min(it, s.convergence.size() - 1)];
      os << run.id << ',' << result.config.topology.num_antennas << ',' << it << ','
         << fmt(total / run.seeds.size()) << '\n';
    }
  }
  return os.str();
}

json export_summary(const ExperimentResult& result) {
  json doc = json::object();
  const double bw = result.config.topology.bandwidth_hz;
  for (const auto& run : result.runs) {
    std::vector<double> x = run.rate_samples();
    double median = 0.0;
    if (!x.empty()) {
      std::sort(x.begin(), x.end());
      const std::size_t n = x.size();
      median = n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
    }
    doc[run.id] = {
        {"log_utility", run.mean_log_utility()},
        {"mean_sum_rate", run.mean_sum_rate()},
        {"mean_sum_rate_bps", run.mean_sum_rate() * bw},
        {"median_rate_bps", median * bw},
        {"num_seeds", run.seeds.size()},
        {"num_slots", result.config.num_slots},
        {"objective", name_of(result.config.objective, kObjectives)},
        {"rate_units", "bits/s/Hz"},
        {"utility_units", "sum over receivers of ln(average rate in bits/s/Hz)"},
    };
  }
  return doc;
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "cdf.csv", export_cdf(result));
  write_text(dir / "convergence.csv", export_convergence(result));
  write_text(dir / "summary.json", export_summary(result).dump(2) + "\n");
}

// ---- sweep helpers ----------------------------------------------------------

void set_dotted(json& doc, const std::string& dotted, const json& value) {
  if (dotted.empty()) throw ConfigError("--param", "empty parameter name");
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError(dotted, "malformed parameter name");
    if (!node->is_object()) throw ConfigError(dotted, "path crosses a non-object value");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

json parse_value(const std::string& text) {
  try {
    json v = json::parse(text);
    if (v.is_number() || v.is_boolean() || v.is_array() || v.is_string()) return v;
  } catch (const json::parse_error&) {
  }
  return text;
}

}  // namespace fplinq::harness

#pragma once
//
// Seeded Monte Carlo experiments: config parsing, the per-seed slot loop and
// CSV / JSON export.
//
// Config documents are JSON objects whose field names mirror the structs
// below; unknown or mistyped fields raise ConfigError with a dotted path.
//

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fplinq/network.hpp"
#include "fplinq/schedulers.hpp"

namespace fplinq::harness {

enum class Objective { SumRate, PfLogUtility };

struct ExperimentConfig {
  net::TopologyConfig topology;
  std::vector<std::string> schedulers = {"fplinq"};
  sched::SchedulerConfig scheduler;
  int num_seeds = 50;
  int num_slots = 1;
  Objective objective = Objective::SumRate;
  std::string output_dir = "out";
  std::uint64_t seed = 1;      // seed k of the run is seed + k
  bool redraw_fading = false;  // fresh small-scale fading every slot
  int threads = 0;             // 0: hardware concurrency
  double pf_alpha = 0.05;
  double pf_floor = 1e-6;

  void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<Eigen::VectorXd> slot_rates;  // per slot, per receiver (bits/s/Hz)
  std::vector<double> slot_sum_rate;
  std::vector<double> convergence;          // slot 0 objective trace
  Eigen::VectorXd mean_rate;                // per receiver, mean over slots
  double log_utility = 0.0;                 // of the smoothed receiver averages
};

struct SchedulerResult {
  std::string id;
  std::vector<SeedResult> seeds;  // in seed order

  double mean_sum_rate() const;
  double mean_log_utility() const;
  /// Per-receiver mean rates pooled over seeds.
  std::vector<double> rate_samples() const;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SchedulerResult> runs;  // in config.schedulers order
};

/// One seed of one scheduler: instance generation and the slot loop.
SeedResult run_seed(const ExperimentConfig& cfg, const std::string& scheduler, std::uint64_t seed);

/// All schedulers over all seeds; seeds run on worker threads.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// scheduler,rate_bps,cdf (empirical CDF of per-receiver mean rates).
std::string export_cdf(const ExperimentResult& result);
/// scheduler,antennas,iteration,sum_rate (slot-0 traces averaged over seeds;
/// a trace that stopped early is held at its last value).
std::string export_convergence(const ExperimentResult& result);
/// Keyed by scheduler id.
nlohmann::json export_summary(const ExperimentResult& result);

/// Writes cdf.csv, convergence.csv and summary.json into `dir`. Throws
/// std::runtime_error naming the path on IO failure.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// Sets a dotted field (e.g. "topology.num_links") in a config document.
void set_dotted(nlohmann::json& doc, const std::string& dotted, const nlohmann::json& value);

/// Parses a CLI value: number, boolean or bare string.
nlohmann::json parse_value(const std::string& text);

}  // namespace fplinq::harness

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "marketsim/core.hpp"

namespace marketsim {

/// A sweep over (mechanism x behavior x interarrival mu x seed). Every cell
/// inherits `base` with those four fields overridden.
struct ExperimentSpec {
  SimConfig base;
  std::vector<double> sweep;  // interarrival mu values, seconds
  std::vector<MechanismSpec> mechanisms;
  std::vector<Behavior> behaviors;
  std::vector<std::uint64_t> seeds;
  std::string output;  // default output directory, optional
};

/// Parses and validates the JSON experiment document. Unknown keys are an
/// error; so are empty sweeps, duplicate seeds and malformed fields. Throws
/// ConfigError naming the offending field.
ExperimentSpec parse_experiment(const std::string& json_text);
ExperimentSpec load_experiment(const std::string& path);

/// One row of runs.csv.
struct RunRow {
  std::string mechanism;
  std::string behavior;
  double mu = 0.0;
  double arrival_rate = 0.0;  // per user, 1/mu
  std::uint64_t seed = 0;
  double mean_utility = 0.0;
  double efficiency = 0.0;
  long tasks_arrived = 0;
  long tasks_completed = 0;
  long tasks_expired = 0;
  double total_spend = 0.0;
  double final_balance_sum = 0.0;
};

/// One row of agg.csv: mean and sample stddev across seeds per cell.
struct AggRow {
  std::string mechanism;
  std::string behavior;
  double mu = 0.0;
  double arrival_rate = 0.0;
  long n_seeds = 0;
  double mean_utility_mean = 0.0;
  double mean_utility_std = 0.0;
  double efficiency_mean = 0.0;
  double efficiency_std = 0.0;
  double tasks_arrived_mean = 0.0;
  double tasks_completed_mean = 0.0;
  double tasks_expired_mean = 0.0;
  double total_spend_mean = 0.0;
  double final_balance_sum_mean = 0.0;
};

/// Worker-pool size: the MARKETSIM_JOBS environment variable if set, else
/// the hardware concurrency.
int default_jobs();

/// Runs every cell of the sweep on a bounded worker pool. Rows come back
/// sorted by (mechanism, behavior, mu, seed) regardless of execution order.
std::vector<RunRow> run_experiment(const ExperimentSpec& spec, int jobs = 0, bool quiet = true);

std::vector<AggRow> aggregate(const std::vector<RunRow>& rows);

/// Doubles formatted with 9 significant digits ("%.9g"), '.' separator.
std::string format_double(double v);

void write_runs_csv(std::ostream& os, const std::vector<RunRow>& rows);
void write_agg_csv(std::ostream& os, const std::vector<AggRow>& rows);

/// Runs the experiment and writes <out_dir>/runs.csv and <out_dir>/agg.csv.
/// Throws std::runtime_error on I/O failure.
void run_experiment_to_dir(const ExperimentSpec& spec, const std::string& out_dir,
                           int jobs = 0, bool quiet = true);

}  // namespace marketsim

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace marketsim {

/// Configuration or input validation failure. `field` names the offending
/// entry (e.g. "base.dt"); the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& what_)
      : std::runtime_error(field_ + ": " + what_), field(std::move(field_)) {}
};

/// A unit of CPU-bound work. `size` is measured in resource-units
/// (CPU-seconds of a unit-capacity server); `deadline` is absolute.
struct Task {
  std::uint64_t id = 0;
  int owner = 0;
  double arrival_time = 0.0;
  double size = 0.0;
  double deadline = 0.0;
  double value = 0.0;  // in (0, 1]
  double accumulated = 0.0;
  std::optional<double> completed_at;

  double remaining() const { return size - accumulated; }
};

/// Utility realized by a task: value*size when it completed by its deadline
/// (boundary inclusive), 0 otherwise. Total function.
double task_utility(const Task& task, std::optional<double> completion_time);

enum class Behavior { Obedient, StrategicMax, MarketStrategic };

const char* behavior_name(Behavior b);
Behavior parse_behavior(const std::string& name);

struct MechanismSpec {
  enum class Kind { ProportionalShare, MarketPS, FixedPrice };
  Kind kind = Kind::ProportionalShare;
  double price = 0.0;  // credits per resource-unit, FixedPrice only

  bool uses_credits() const { return kind != Kind::ProportionalShare; }
  static MechanismSpec proportional_share() { return {}; }
  static MechanismSpec market_ps() { return {Kind::MarketPS, 0.0}; }
  static MechanismSpec fixed_price(double price) { return {Kind::FixedPrice, price}; }
};

/// Formats as "proportional_share", "market_ps" or "fixed_price:<price>".
std::string mechanism_name(const MechanismSpec& m);
MechanismSpec parse_mechanism(const std::string& name);

/// Per-user fractions of server capacity for one timestep. Shares sum to 1
/// whenever any input weight/bid was positive; a zero weight yields share 0.
struct AllocationVector {
  std::vector<double> shares;

  double sum() const;
};

/// One user's scheduling state: pending tasks, credit balance and policy.
struct UserState {
  int id = 0;
  double balance = 0.0;
  double income_rate = 0.0;  // credits per second
  std::vector<Task> queue;
  Behavior behavior = Behavior::Obedient;
  /// Service rate (resource-units/s) the user assumes when deciding whether a
  /// fresh task can still meet its deadline. Tracks the rate last observed
  /// while running; resets to full capacity whenever the server goes idle.
  /// Obedient and market users yield rather than start a hopeless task.
  double rate_estimate = 1.0;
  double cumulative_utility = 0.0;
  double cumulative_resources = 0.0;
  double cumulative_spend = 0.0;
  double cumulative_income = 0.0;
};

/// What happens to an obedient or market user's task when its deadline
/// passes while it is still pending. AbandonAtDeadline drops it from the
/// queue immediately and counts it expired (the default); RunToCompletion
/// leaves it queued to the end of the run, though the feasibility screen
/// still keeps those users from selecting it. Max-weight strategic users
/// grind every task to completion regardless of this setting: refusing to
/// yield is what defines them.
enum class ExpiryPolicy { AbandonAtDeadline, RunToCompletion };

const char* expiry_policy_name(ExpiryPolicy p);
ExpiryPolicy parse_expiry_policy(const std::string& name);

/// Full parameterization of one simulation run.
struct SimConfig {
  int n_users = 10;
  double horizon = 1000.0;  // seconds
  double dt = 0.1;          // seconds per step
  double capacity = 1.0;    // resource-units per second
  MechanismSpec mechanism{};
  Behavior behavior = Behavior::Obedient;
  double interarrival_mu = 60.0;  // Gaussian(mu, mu/2), resampled > 1e-3
  double size_mu = 10.0;
  double size_sigma = 5.0;
  double deadline_mu = 75.0;     // relative offset from arrival
  double deadline_sigma = 37.5;
  double value_lo = 0.0;  // value drawn from (value_lo, value_hi]
  double value_hi = 1.0;
  double income_rate = 1.0;           // credits per second, every user
  std::vector<double> income_rates;   // optional per-user override
  double max_weight = 1.0;
  double redistribution_tax = 0.0;       // in [0, 1]
  double redistribution_interval = 10.0; // seconds between redistributions
  double fairness_window = 60.0;         // seconds per usage window
  ExpiryPolicy expiry_policy = ExpiryPolicy::AbandonAtDeadline;
  std::uint64_t seed = 1;

  double income_rate_of(int user) const {
    return income_rates.empty() ? income_rate : income_rates[static_cast<std::size_t>(user)];
  }
};

/// Throws ConfigError naming the violated field.
void validate(const SimConfig& config);

/// Final disposition of one generated task.
enum class TaskStatus { Pending, Completed, Expired };

struct TaskOutcome {
  std::uint64_t id = 0;
  int owner = 0;
  double arrival_time = 0.0;
  double size = 0.0;
  double deadline = 0.0;
  double value = 0.0;
  double accumulated = 0.0;
  std::optional<double> completed_at;
  TaskStatus status = TaskStatus::Pending;
};

/// Time series and aggregates of one run. `completed` counts on-time
/// completions only; late finishers and abandoned tasks count as expired.
struct RunRecord {
  int n_users = 0;
  double horizon = 0.0;
  double dt = 0.0;

  std::vector<double> utility;        // per-user cumulative utility
  std::vector<double> spend;          // per-user cumulative charges
  std::vector<double> income;         // per-user cumulative income
  std::vector<double> resources;      // per-user resource-units consumed
  std::vector<double> final_balance;

  long tasks_arrived = 0;
  long tasks_completed = 0;
  long tasks_expired = 0;
  long tasks_pending = 0;

  double aggregate_utility = 0.0;
  double arrived_value_size = 0.0;  // sum of value*size over arrived tasks
  double total_charges = 0.0;
  double redistribution_drift = 0.0;  // max |sum after - sum before| seen

  double fairness_window_length = 0.0;
  std::vector<std::vector<double>> window_usage;  // [window][user]

  std::vector<TaskOutcome> task_log;

  double total_utility() const { return aggregate_utility; }
  double final_balance_sum() const;
  double total_spend() const;
};

}  // namespace marketsim

#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "marketsim/core.hpp"

namespace marketsim {

/// Number of fixed-size steps covering [0, horizon).
long step_count(double horizon, double dt);

/// The fixed-timestep simulation. Each step, in order: enqueue arrivals,
/// expire dead tasks, collect agent actions, allocate, accrue resources,
/// complete tasks, apply the credit economy, redistribute, record.
/// Strictly single-threaded and a deterministic function of its inputs.
class Simulation {
 public:
  Simulation(SimConfig config, std::vector<std::vector<Task>> arrivals);

  bool done() const { return step_index_ >= n_steps_; }
  void step();

  /// Runs the remaining steps and returns the completed record.
  RunRecord finish();

  double clock() const;
  long total_steps() const { return n_steps_; }
  const SimConfig& config() const { return config_; }
  const std::vector<UserState>& users() const { return users_; }

  // Last-step introspection, for invariant checks.
  const AllocationVector& last_allocation() const { return last_allocation_; }
  double last_step_delivered() const { return last_delivered_; }
  bool last_step_forfeited() const { return last_forfeited_; }

 private:
  void enqueue_arrivals(double window_end);
  void expire_dead_tasks();
  void accrue_and_complete(const AllocationVector& alloc,
                           const std::vector<std::uint64_t>& chosen);

  SimConfig config_;
  std::vector<std::vector<Task>> arrivals_;
  std::vector<std::size_t> arrival_cursor_;
  std::vector<UserState> users_;
  long n_steps_ = 0;
  long step_index_ = 0;

  RunRecord record_;
  std::unordered_map<std::uint64_t, std::size_t> log_index_;

  AllocationVector last_allocation_;
  double last_delivered_ = 0.0;
  bool last_forfeited_ = false;
  std::optional<int> fixed_price_holder_;
};

/// Validates the config, generates the seeded workload and runs it.
RunRecord run(const SimConfig& config);

/// Runs with externally supplied arrival streams (one vector per user,
/// sorted by arrival time). Used for hand-built scenarios.
RunRecord run_with_arrivals(const SimConfig& config, std::vector<std::vector<Task>> arrivals);

}  // namespace marketsim

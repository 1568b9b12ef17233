#pragma once

#include <optional>

#include "marketsim/core.hpp"

namespace marketsim {

/// One user's decision for a timestep: which task to run and the declared
/// weight / spending rate / willingness. declared is 0 whenever no task is
/// chosen.
struct Action {
  std::optional<std::uint64_t> task_id;
  double declared = 0.0;
};

/// Picks the densest task (value per unit of work); ties broken by earlier
/// deadline, then lower id. Returns nullptr on an empty queue.
const Task* select_task(const std::vector<Task>& queue, double now);

/// Picks the densest task worth running; same tie-breaks as select_task.
/// A fresh task is worth starting if it could finish at a small multiple of
/// the owner's observed service rate `rate` (capped at the whole server); a
/// started task is kept until even the whole server could no longer finish
/// it on time. Returns nullptr when nothing qualifies, in which case the
/// user yields the resource.
const Task* select_feasible_task(const std::vector<Task>& queue, double now, double rate,
                                 double capacity);

/// Declares a weight equal to the chosen task's true value. Runs only tasks
/// that pass the feasibility screen.
Action obedient_action(const UserState& user, double now, double capacity);

/// Declares max_weight whenever any task exists. Works tasks in arrival
/// order and never abandons one, regardless of its value or of whether it
/// can still meet its deadline.
Action strategic_max_action(const UserState& user, double now, double max_weight);

/// Budgets credits over the chosen task's remaining lifetime:
/// rate = balance * value / (deadline - now), clamped to [0, balance/dt].
/// Funds only tasks that pass the feasibility screen; declares 0 when none
/// qualifies or the deadline has passed.
Action market_bid_action(const UserState& user, double now, double dt, double capacity);

/// Dispatch on the user's behavior policy.
Action act(const UserState& user, double now, double dt, double max_weight, double capacity);

}  // namespace marketsim

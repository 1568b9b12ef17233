#include "marketsim/agents.hpp"

#include <algorithm>

namespace marketsim {

namespace {

double density(const Task& t) { return t.value / t.size; }

// Densest-first: the most value per unit of work, ties to the more urgent
// deadline, then the lower id.
bool better(const Task& t, const Task* best) {
  if (!best) return true;
  if (density(t) != density(*best)) return density(t) > density(*best);
  if (t.deadline != best->deadline) return t.deadline < best->deadline;
  return t.id < best->id;
}

// A fresh task is admitted if it could finish at this multiple of the
// owner's recently observed service rate (never assuming more than the whole
// server). The optimism is deliberate: contention that is visible today may
// clear tomorrow.
constexpr double kFreshGrace = 2.5;

}  // namespace

const Task* select_task(const std::vector<Task>& queue, double /*now*/) {
  const Task* best = nullptr;
  for (const Task& t : queue) {
    if (better(t, best)) best = &t;
  }
  return best;
}

const Task* select_feasible_task(const std::vector<Task>& queue, double now, double rate,
                                 double capacity) {
  const Task* best = nullptr;
  for (const Task& t : queue) {
    // Started tasks keep the benefit of the doubt until even the whole server
    // could no longer finish them on time.
    const double assumed =
        t.accumulated > 0.0 ? capacity : std::min(capacity, kFreshGrace * rate);
    if (t.remaining() > (t.deadline - now) * assumed) continue;
    if (better(t, best)) best = &t;
  }
  return best;
}

Action obedient_action(const UserState& user, double now, double capacity) {
  const Task* t = select_feasible_task(user.queue, now, user.rate_estimate, capacity);
  if (!t) return {};
  return {t->id, t->value};
}

Action strategic_max_action(const UserState& user, double /*now*/, double max_weight) {
  // Max weight on everything, worked in arrival order, no triage: the queue
  // head is ground to completion whether or not its deadline already passed.
  const Task* t = nullptr;
  for (const Task& cand : user.queue) {
    if (!t || cand.arrival_time < t->arrival_time ||
        (cand.arrival_time == t->arrival_time && cand.id < t->id)) {
      t = &cand;
    }
  }
  if (!t) return {};
  return {t->id, max_weight};
}

Action market_bid_action(const UserState& user, double now, double dt, double capacity) {
  const Task* t = select_feasible_task(user.queue, now, user.rate_estimate, capacity);
  if (!t) return {};
  const double remaining_time = t->deadline - now;
  if (remaining_time <= 0.0) return {t->id, 0.0};
  double rate = user.balance * t->value / remaining_time;
  rate = std::clamp(rate, 0.0, user.balance / dt);
  return {t->id, rate};
}

Action act(const UserState& user, double now, double dt, double max_weight, double capacity) {
  switch (user.behavior) {
    case Behavior::Obedient: return obedient_action(user, now, capacity);
    case Behavior::StrategicMax: return strategic_max_action(user, now, max_weight);
    case Behavior::MarketStrategic: return market_bid_action(user, now, dt, capacity);
  }
  return {};
}

}  // namespace marketsim

#include "marketsim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "marketsim/agents.hpp"
#include "marketsim/mechanisms.hpp"
#include "marketsim/workload.hpp"

namespace marketsim {

namespace {
constexpr std::uint64_t kNoTask = ~0ull;
}

long step_count(double horizon, double dt) {
  if (horizon <= 0.0) return 0;
  return static_cast<long>(std::ceil(horizon / dt - 1e-9));
}

Simulation::Simulation(SimConfig config, std::vector<std::vector<Task>> arrivals)
    : config_(std::move(config)), arrivals_(std::move(arrivals)) {
  validate(config_);
  if (arrivals_.size() != static_cast<std::size_t>(config_.n_users)) {
    throw ConfigError("arrivals", "need one arrival stream per user");
  }
  n_steps_ = step_count(config_.horizon, config_.dt);
  for (auto& stream : arrivals_) {
    std::sort(stream.begin(), stream.end(), [](const Task& a, const Task& b) {
      return a.arrival_time != b.arrival_time ? a.arrival_time < b.arrival_time : a.id < b.id;
    });
  }
  arrival_cursor_.assign(arrivals_.size(), 0);

  users_.resize(static_cast<std::size_t>(config_.n_users));
  for (int i = 0; i < config_.n_users; ++i) {
    UserState& u = users_[static_cast<std::size_t>(i)];
    u.id = i;
    u.income_rate = config_.income_rate_of(i);
    u.behavior = config_.behavior;
    u.rate_estimate = config_.capacity;
  }

  record_.n_users = config_.n_users;
  record_.horizon = config_.horizon;
  record_.dt = config_.dt;
  record_.utility.assign(users_.size(), 0.0);
  record_.spend.assign(users_.size(), 0.0);
  record_.income.assign(users_.size(), 0.0);
  record_.resources.assign(users_.size(), 0.0);
  record_.final_balance.assign(users_.size(), 0.0);
  record_.fairness_window_length = config_.fairness_window;
  const long n_windows = step_count(config_.horizon, config_.fairness_window);
  record_.window_usage.assign(static_cast<std::size_t>(n_windows),
                              std::vector<double>(users_.size(), 0.0));
}

double Simulation::clock() const {
  return static_cast<double>(step_index_) * config_.dt;
}

void Simulation::enqueue_arrivals(double window_end) {
  for (std::size_t u = 0; u < arrivals_.size(); ++u) {
    auto& stream = arrivals_[u];
    auto& cursor = arrival_cursor_[u];
    while (cursor < stream.size() && stream[cursor].arrival_time < window_end) {
      const Task& t = stream[cursor];
      users_[u].queue.push_back(t);
      ++record_.tasks_arrived;
      record_.arrived_value_size += t.value * t.size;
      log_index_[t.id] = record_.task_log.size();
      record_.task_log.push_back({t.id, t.owner, t.arrival_time, t.size, t.deadline, t.value,
                                  0.0, std::nullopt, TaskStatus::Pending});
      ++cursor;
    }
  }
}

void Simulation::expire_dead_tasks() {
  const double now = clock();
  for (UserState& u : users_) {
    // Max-weight strategists never give up on a task; their dead tasks stay
    // runnable and keep soaking up resources for zero utility.
    if (u.behavior == Behavior::StrategicMax) continue;
    auto it = u.queue.begin();
    while (it != u.queue.end()) {
      if (it->deadline <= now) {
        TaskOutcome& out = record_.task_log[log_index_.at(it->id)];
        out.accumulated = it->accumulated;
        out.status = TaskStatus::Expired;
        ++record_.tasks_expired;
        it = u.queue.erase(it);
      } else {
        ++it;
      }
    }
  }
}

void Simulation::accrue_and_complete(const AllocationVector& alloc,
                                     const std::vector<std::uint64_t>& chosen) {
  const double now = clock();
  const double dt = config_.dt;
  last_delivered_ = 0.0;
  last_forfeited_ = false;

  std::size_t window = 0;
  if (!record_.window_usage.empty()) {
    window = static_cast<std::size_t>((now + 1e-9) / config_.fairness_window);
    window = std::min(window, record_.window_usage.size() - 1);
  }

  for (std::size_t i = 0; i < users_.size(); ++i) {
    const double share = alloc.shares[i];
    if (share <= 0.0 || chosen[i] == kNoTask) continue;
    UserState& u = users_[i];
    auto it = std::find_if(u.queue.begin(), u.queue.end(),
                           [&](const Task& t) { return t.id == chosen[i]; });
    if (it == u.queue.end()) continue;

    const double remaining_before = it->remaining();
    const double potential = share * config_.capacity * dt;
    const double accrued = std::min(potential, remaining_before);
    it->accumulated += accrued;
    last_delivered_ += accrued;
    if (potential > remaining_before) last_forfeited_ = true;

    u.cumulative_resources += accrued;
    record_.resources[i] += accrued;
    if (!record_.window_usage.empty()) record_.window_usage[window][i] += accrued;

    if (it->accumulated >= it->size - 1e-12) {
      it->accumulated = it->size;
      const double completed_at = now + remaining_before / (share * config_.capacity);
      it->completed_at = completed_at;
      const double utility = task_utility(*it, completed_at);

      TaskOutcome& out = record_.task_log[log_index_.at(it->id)];
      out.accumulated = it->size;
      out.completed_at = completed_at;
      if (utility > 0.0) {
        out.status = TaskStatus::Completed;
        ++record_.tasks_completed;
        u.cumulative_utility += utility;
        record_.utility[i] += utility;
        record_.aggregate_utility += utility;
      } else {
        // Finished after its deadline; no utility.
        out.status = TaskStatus::Expired;
        ++record_.tasks_expired;
      }
      u.queue.erase(it);
    }
  }
}

void Simulation::step() {
  assert(!done());
  const double now = clock();
  const double dt = config_.dt;
  const double window_end = static_cast<double>(step_index_ + 1) * dt;

  // (1) arrivals in [now, now + dt)
  enqueue_arrivals(window_end);

  // (2) expiry at step start
  if (config_.expiry_policy == ExpiryPolicy::AbandonAtDeadline) {
    expire_dead_tasks();
  }

  // (3) agent decisions
  std::vector<std::uint64_t> chosen(users_.size(), kNoTask);
  BidVector declared(users_.size(), 0.0);
  for (std::size_t i = 0; i < users_.size(); ++i) {
    const Action a = act(users_[i], now, dt, config_.max_weight, config_.capacity);
    if (a.task_id) chosen[i] = *a.task_id;
    declared[i] = a.declared;
  }

  // (4) allocation
  BidVector charges(users_.size(), 0.0);
  switch (config_.mechanism.kind) {
    case MechanismSpec::Kind::ProportionalShare:
      last_allocation_ = proportional_share_allocate(declared);
      break;
    case MechanismSpec::Kind::MarketPS: {
      BidVector bids(users_.size(), 0.0);
      for (std::size_t i = 0; i < users_.size(); ++i) {
        bids[i] = std::min(declared[i], users_[i].balance / dt);
      }
      last_allocation_ = market_allocate(bids);
      charges = bids;
      break;
    }
    case MechanismSpec::Kind::FixedPrice: {
      const double price = config_.mechanism.price;
      BidVector willingness(users_.size(), 0.0);
      for (std::size_t i = 0; i < users_.size(); ++i) {
        if (chosen[i] == kNoTask) continue;
        double w = 0.0;
        if (users_[i].behavior == Behavior::Obedient) {
          // An honest buyer spreads its declared value over the whole job:
          // at most value/size per unit of work.
          for (const Task& t : users_[i].queue) {
            if (t.id == chosen[i]) {
              w = t.value / t.size;
              break;
            }
          }
        } else {
          // Strategists declare a rate in credits/second; spread over the
          // server's capacity that is a price per resource-unit.
          w = declared[i] / config_.capacity;
        }
        // A buyer must be able to cover one step at the posted price.
        const double step_cost = price * config_.capacity * dt;
        if (users_[i].balance + users_[i].income_rate * dt < step_cost) w = 0.0;
        willingness[i] = w;
      }
      const FixedPriceResult sale =
          fixed_price_allocate(price, willingness, config_.capacity, fixed_price_holder_);
      fixed_price_holder_ = sale.winner;
      last_allocation_.shares.assign(users_.size(), 0.0);
      if (sale.winner) {
        last_allocation_.shares[static_cast<std::size_t>(*sale.winner)] = 1.0;
        charges[static_cast<std::size_t>(*sale.winner)] = sale.charge_rate;
      }
      break;
    }
  }

  // (5)+(6) resource accrual and completions
  accrue_and_complete(last_allocation_, chosen);

  // Service-rate estimates for the feasibility screen: users that ran observe
  // the rate they got; an idle server tells everyone the next bidder would
  // have it all to itself.
  const bool server_idle = last_allocation_.sum() <= 0.0;
  for (std::size_t i = 0; i < users_.size(); ++i) {
    if (chosen[i] != kNoTask && last_allocation_.shares[i] > 0.0) {
      users_[i].rate_estimate = last_allocation_.shares[i] * config_.capacity;
    } else if (server_idle) {
      users_[i].rate_estimate = config_.capacity;
    }
  }

  // (7) credit economy
  if (config_.mechanism.uses_credits()) {
    charge_and_income(users_, charges, dt);
    for (std::size_t i = 0; i < users_.size(); ++i) {
      record_.total_charges += charges[i] * dt;
    }

    // (8) periodic redistribution
    if (config_.redistribution_tax > 0.0 && !users_.empty()) {
      const double interval = config_.redistribution_interval;
      const long before = static_cast<long>(std::floor((now + 1e-9) / interval));
      const long after = static_cast<long>(std::floor((window_end + 1e-9) / interval));
      if (after > before) {
        std::vector<double> balances(users_.size());
        double sum_before = 0.0;
        for (std::size_t i = 0; i < users_.size(); ++i) {
          balances[i] = users_[i].balance;
          sum_before += balances[i];
        }
        balances = redistribute(balances, config_.redistribution_tax);
        double sum_after = 0.0;
        for (std::size_t i = 0; i < users_.size(); ++i) {
          users_[i].balance = balances[i];
          sum_after += balances[i];
        }
        record_.redistribution_drift =
            std::max(record_.redistribution_drift, std::abs(sum_after - sum_before));
      }
    }
  }

  ++step_index_;
}

RunRecord Simulation::finish() {
  while (!done()) step();

  // Anything still queued (or never enqueued) at the horizon is pending.
  for (std::size_t i = 0; i < users_.size(); ++i) {
    record_.final_balance[i] = users_[i].balance;
    record_.spend[i] = users_[i].cumulative_spend;
    record_.income[i] = users_[i].cumulative_income;
    for (const Task& t : users_[i].queue) {
      TaskOutcome& out = record_.task_log[log_index_.at(t.id)];
      out.accumulated = t.accumulated;
      out.status = TaskStatus::Pending;
    }
  }
  record_.tasks_pending = record_.tasks_arrived - record_.tasks_completed - record_.tasks_expired;
  return record_;
}

RunRecord run(const SimConfig& config) {
  validate(config);
  return run_with_arrivals(config, generate_workload(config));
}

RunRecord run_with_arrivals(const SimConfig& config, std::vector<std::vector<Task>> arrivals) {
  Simulation sim(config, std::move(arrivals));
  return sim.finish();
}

}  // namespace marketsim

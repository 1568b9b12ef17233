#include "marketsim/core.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace marketsim {

double task_utility(const Task& task, std::optional<double> completion_time) {
  if (completion_time && *completion_time <= task.deadline) {
    return task.value * task.size;
  }
  return 0.0;
}

const char* behavior_name(Behavior b) {
  switch (b) {
    case Behavior::Obedient: return "obedient";
    case Behavior::StrategicMax: return "strategic_max";
    case Behavior::MarketStrategic: return "market_strategic";
  }
  return "?";
}

Behavior parse_behavior(const std::string& name) {
  if (name == "obedient") return Behavior::Obedient;
  if (name == "strategic_max") return Behavior::StrategicMax;
  if (name == "market_strategic") return Behavior::MarketStrategic;
  throw ConfigError("behavior", "unknown behavior '" + name + "'");
}

std::string mechanism_name(const MechanismSpec& m) {
  switch (m.kind) {
    case MechanismSpec::Kind::ProportionalShare: return "proportional_share";
    case MechanismSpec::Kind::MarketPS: return "market_ps";
    case MechanismSpec::Kind::FixedPrice: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "fixed_price:%.9g", m.price);
      return buf;
    }
  }
  return "?";
}

MechanismSpec parse_mechanism(const std::string& name) {
  if (name == "proportional_share") return MechanismSpec::proportional_share();
  if (name == "market_ps") return MechanismSpec::market_ps();
  const std::string prefix = "fixed_price:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string num = name.substr(prefix.size());
    std::size_t pos = 0;
    double price = 0.0;
    try {
      price = std::stod(num, &pos);
    } catch (const std::exception&) {
      throw ConfigError("mechanism", "bad fixed price '" + num + "'");
    }
    if (pos != num.size() || !(price >= 0.0) || !std::isfinite(price)) {
      throw ConfigError("mechanism", "fixed price must be a finite number >= 0");
    }
    return MechanismSpec::fixed_price(price);
  }
  throw ConfigError("mechanism", "unknown mechanism '" + name + "'");
}

const char* expiry_policy_name(ExpiryPolicy p) {
  return p == ExpiryPolicy::AbandonAtDeadline ? "abandon_at_deadline" : "run_to_completion";
}

ExpiryPolicy parse_expiry_policy(const std::string& name) {
  if (name == "abandon_at_deadline") return ExpiryPolicy::AbandonAtDeadline;
  if (name == "run_to_completion") return ExpiryPolicy::RunToCompletion;
  throw ConfigError("expiry_policy", "unknown expiry policy '" + name + "'");
}

double AllocationVector::sum() const {
  return std::accumulate(shares.begin(), shares.end(), 0.0);
}

void validate(const SimConfig& c) {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, what);
  };
  require(c.n_users >= 0, "n_users", "must be >= 0");
  require(c.horizon >= 0.0 && std::isfinite(c.horizon), "horizon", "must be >= 0");
  require(c.dt > 0.0 && std::isfinite(c.dt), "dt", "must be > 0");
  require(c.capacity > 0.0 && std::isfinite(c.capacity), "capacity", "must be > 0");
  require(c.mechanism.price >= 0.0 && std::isfinite(c.mechanism.price), "mechanism",
          "fixed price must be >= 0");
  require(c.interarrival_mu > 0.0, "interarrival_mu", "must be > 0");
  require(c.size_mu > 0.0, "size_mu", "must be > 0");
  require(c.size_sigma >= 0.0, "size_sigma", "must be >= 0");
  require(c.deadline_mu > 0.0, "deadline_mu", "must be > 0");
  require(c.deadline_sigma >= 0.0, "deadline_sigma", "must be >= 0");
  require(c.value_lo >= 0.0 && c.value_hi > c.value_lo, "value_range",
          "need 0 <= lo < hi");
  require(c.value_hi <= 1.0, "value_range", "task values must lie in (0, 1]");
  require(c.income_rate >= 0.0, "income_rate", "must be >= 0");
  if (!c.income_rates.empty()) {
    require(c.income_rates.size() == static_cast<std::size_t>(c.n_users), "income_rates",
            "must have one entry per user");
    for (double r : c.income_rates) require(r >= 0.0, "income_rates", "entries must be >= 0");
  }
  require(c.max_weight > 0.0, "max_weight", "must be > 0");
  require(c.redistribution_tax >= 0.0 && c.redistribution_tax <= 1.0, "redistribution_tax",
          "must lie in [0, 1]");
  require(c.redistribution_interval > 0.0, "redistribution_interval", "must be > 0");
  require(c.fairness_window > 0.0, "fairness_window", "must be > 0");
}

double RunRecord::final_balance_sum() const {
  return std::accumulate(final_balance.begin(), final_balance.end(), 0.0);
}

double RunRecord::total_spend() const {
  return std::accumulate(spend.begin(), spend.end(), 0.0);
}

}  // namespace marketsim

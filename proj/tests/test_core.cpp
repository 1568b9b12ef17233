#include <doctest.h>

#include "marketsim/core.hpp"

using namespace marketsim;

namespace {

Task make_task(double size, double deadline, double value) {
  Task t;
  t.id = 1;
  t.size = size;
  t.deadline = deadline;
  t.value = value;
  return t;
}

}  // namespace

TEST_CASE("task_utility pays value*size on time, zero otherwise") {
  const Task t = make_task(10.0, 50.0, 0.7);
  CHECK(task_utility(t, 30.0) == doctest::Approx(7.0));
  CHECK(task_utility(t, 50.0) == doctest::Approx(7.0));  // boundary inclusive
  CHECK(task_utility(t, 50.0 + 1e-9) == 0.0);
  CHECK(task_utility(t, std::nullopt) == 0.0);
}

TEST_CASE("remaining tracks accumulated work") {
  Task t = make_task(10.0, 50.0, 1.0);
  CHECK(t.remaining() == 10.0);
  t.accumulated = 4.0;
  CHECK(t.remaining() == 6.0);
}

TEST_CASE("behavior names round-trip") {
  for (Behavior b : {Behavior::Obedient, Behavior::StrategicMax, Behavior::MarketStrategic}) {
    CHECK(parse_behavior(behavior_name(b)) == b);
  }
  CHECK_THROWS_AS(parse_behavior("greedy"), ConfigError);
}

TEST_CASE("mechanism names round-trip") {
  CHECK(mechanism_name(MechanismSpec::proportional_share()) == "proportional_share");
  CHECK(mechanism_name(MechanismSpec::market_ps()) == "market_ps");
  CHECK(mechanism_name(MechanismSpec::fixed_price(0.5)) == "fixed_price:0.5");

  const MechanismSpec fp = parse_mechanism("fixed_price:1.25");
  CHECK(fp.kind == MechanismSpec::Kind::FixedPrice);
  CHECK(fp.price == 1.25);
  CHECK(parse_mechanism("market_ps").kind == MechanismSpec::Kind::MarketPS);
  CHECK_THROWS_AS(parse_mechanism("vickrey"), ConfigError);
  CHECK_THROWS_AS(parse_mechanism("fixed_price:abc"), ConfigError);
  CHECK_THROWS_AS(parse_mechanism("fixed_price:-1"), ConfigError);
  CHECK_THROWS_AS(parse_mechanism("fixed_price:1x"), ConfigError);
}

TEST_CASE("expiry policy names round-trip") {
  for (ExpiryPolicy p : {ExpiryPolicy::AbandonAtDeadline, ExpiryPolicy::RunToCompletion}) {
    CHECK(parse_expiry_policy(expiry_policy_name(p)) == p);
  }
  CHECK_THROWS_AS(parse_expiry_policy("never"), ConfigError);
}

TEST_CASE("uses_credits distinguishes the free scheduler") {
  CHECK_FALSE(MechanismSpec::proportional_share().uses_credits());
  CHECK(MechanismSpec::market_ps().uses_credits());
  CHECK(MechanismSpec::fixed_price(1.0).uses_credits());
}

TEST_CASE("validate accepts the defaults") {
  CHECK_NOTHROW(validate(SimConfig{}));
}

TEST_CASE("validate names the offending field") {
  auto field_of = [](SimConfig c) -> std::string {
    try {
      validate(c);
    } catch (const ConfigError& e) {
      return e.field;
    }
    return "";
  };

  SimConfig c;
  c.dt = 0.0;
  CHECK(field_of(c) == "dt");

  c = SimConfig{};
  c.capacity = -1.0;
  CHECK(field_of(c) == "capacity");

  c = SimConfig{};
  c.n_users = -1;
  CHECK(field_of(c) == "n_users");

  c = SimConfig{};
  c.redistribution_tax = 1.5;
  CHECK(field_of(c) == "redistribution_tax");

  c = SimConfig{};
  c.value_lo = 0.8;
  c.value_hi = 0.5;
  CHECK(field_of(c) == "value_range");

  c = SimConfig{};
  c.value_hi = 2.0;
  CHECK(field_of(c) == "value_range");

  c = SimConfig{};
  c.income_rates = {1.0, 1.0};  // 10 users configured
  CHECK(field_of(c) == "income_rates");

  c = SimConfig{};
  c.interarrival_mu = 0.0;
  CHECK(field_of(c) == "interarrival_mu");

  c = SimConfig{};
  c.max_weight = 0.0;
  CHECK(field_of(c) == "max_weight");
}

TEST_CASE("ConfigError carries the field in the message") {
  const ConfigError e("base.dt", "must be > 0");
  CHECK(e.field == "base.dt");
  CHECK(std::string(e.what()) == "base.dt: must be > 0");
}

TEST_CASE("allocation sum") {
  AllocationVector a;
  a.shares = {0.25, 0.5, 0.25};
  CHECK(a.sum() == doctest::Approx(1.0));
  CHECK(AllocationVector{}.sum() == 0.0);
}

// Acceptance gate: each numbered criterion prints its measured values against
// pinned bounds and one final PASS/FAIL line. Run with a criterion number
// (1-7) or with no arguments to run them all. Exit code 0 iff everything
// requested passed.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "marketsim/engine.hpp"
#include "marketsim/harness.hpp"
#include "marketsim/mechanisms.hpp"
#include "marketsim/metrics.hpp"
#include "marketsim/workload.hpp"

using namespace marketsim;

namespace {

int g_failures = 0;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

void report(bool ok, const std::string& msg) {
  std::printf("  %s %s\n", ok ? "[ok]  " : "[FAIL]", msg.c_str());
  if (!ok) ++g_failures;
}

// ---------------------------------------------------------------- criterion 1

void criterion1() {
  SplitMix64 rng(424242);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 1 + rng.next() % 16;
    BidVector w(n);
    double total = 0.0;
    for (double& x : w) {
      x = rng.uniform_oc() * 10.0;
      total += x;
    }
    const AllocationVector alloc = proportional_share_allocate(w);
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(alloc.shares[i] - w[i] / total));
    }
  }
  report(worst <= 1e-9,
         fmt("10^4 random weight vectors: max |share - w/sum| = %.3g (bound 1e-9)", worst));

  double worst_scale = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 2 + rng.next() % 8;
    BidVector w(n);
    for (double& x : w) x = rng.uniform_oc() * 10.0;
    const double lambda = rng.uniform_oc() * 1000.0;
    BidVector scaled = w;
    for (double& x : scaled) x *= lambda;
    const AllocationVector a = proportional_share_allocate(w);
    const AllocationVector b = proportional_share_allocate(scaled);
    for (std::size_t i = 0; i < n; ++i) {
      worst_scale = std::max(worst_scale, std::abs(a.shares[i] - b.shares[i]));
    }
  }
  report(worst_scale <= 1e-9,
         fmt("scale invariance over 2000 rescalings: max drift %.3g (bound 1e-9)", worst_scale));

  bool monotone = true;
  for (int t = 0; t < 2000 && monotone; ++t) {
    const std::size_t n = 2 + rng.next() % 8;
    BidVector w(n);
    for (double& x : w) x = rng.uniform_oc() * 10.0;
    const std::size_t i = rng.next() % n;
    BidVector bumped = w;
    bumped[i] += rng.uniform_oc() * 5.0;
    monotone = proportional_share_allocate(bumped).shares[i] >=
               proportional_share_allocate(w).shares[i] - 1e-12;
  }
  report(monotone, "raising one weight never lowers that user's share (2000 trials)");
}

// ---------------------------------------------------------------- criterion 2

Task backlog_task(std::uint64_t id, int owner, double value) {
  Task t;
  t.id = id;
  t.owner = owner;
  t.arrival_time = 0.0;
  t.size = 1e9;
  t.deadline = 1e12;
  t.value = value;
  return t;
}

void criterion2() {
  SimConfig cfg;
  cfg.n_users = 2;
  cfg.horizon = 1000.0;
  const RunRecord rec =
      run_with_arrivals(cfg, {{backlog_task(1, 0, 1.0)}, {backlog_task(2, 1, 0.5)}});
  const double ratio = rec.resources[0] / rec.resources[1];
  report(std::abs(ratio - 2.0) <= 0.02,
         fmt("two backlogged users, weights 2:1, 1000 s: resource ratio %.6f (2.0 +/- 1%%)",
             ratio));

  const FairnessRatio fr = fairness_ratio(fairness_windows(rec), 0, 1);
  report(fr.aggregate.has_value() && std::abs(*fr.aggregate - 2.0) <= 0.02,
         fmt("windowed aggregate ratio %.6f (2.0 +/- 1%%)",
             fr.aggregate.value_or(0.0)));
}

// ---------------------------------------------------------------- criterion 3

void criterion3() {
  SimConfig cfg;
  cfg.mechanism = MechanismSpec::market_ps();
  cfg.behavior = Behavior::MarketStrategic;

  cfg.redistribution_tax = 0.0;
  const RunRecord zero_tax = run(cfg);
  double income_sum = 0.0;
  for (double v : zero_tax.income) income_sum += v;
  const double rel = std::abs(zero_tax.final_balance_sum() - (income_sum - zero_tax.total_spend())) /
                     std::max(1.0, income_sum);
  report(rel <= 1e-6,
         fmt("tax 0: |balances - (income - spend)| / income = %.3g (bound 1e-6)", rel));

  cfg.redistribution_tax = 0.5;
  const RunRecord taxed = run(cfg);
  report(taxed.redistribution_drift <= 1e-9,
         fmt("tax 0.5: max redistribution drift %.3g (bound 1e-9)", taxed.redistribution_drift));
  double income_sum2 = 0.0;
  for (double v : taxed.income) income_sum2 += v;
  const double rel2 = std::abs(taxed.final_balance_sum() - (income_sum2 - taxed.total_spend())) /
                      std::max(1.0, income_sum2);
  report(rel2 <= 1e-6,
         fmt("tax 0.5: |balances - (income - spend)| / income = %.3g (bound 1e-6)", rel2));
}

// ---------------------------------------------------------------- criterion 4

const AggRow* find_cell(const std::vector<AggRow>& agg, const std::string& mech,
                        const std::string& behavior, double mu) {
  for (const AggRow& a : agg) {
    if (a.mechanism == mech && a.behavior == behavior && a.mu == mu) return &a;
  }
  return nullptr;
}

void criterion4() {
  const std::vector<double> sweep = {120, 100, 90, 80, 70, 60, 40, 20};

  ExperimentSpec spec;
  spec.sweep = sweep;
  spec.mechanisms = {MechanismSpec::proportional_share()};
  spec.behaviors = {Behavior::Obedient, Behavior::StrategicMax};
  for (std::uint64_t s = 1; s <= 30; ++s) spec.seeds.push_back(s);
  std::vector<RunRow> rows = run_experiment(spec);

  spec.mechanisms = {MechanismSpec::market_ps()};
  spec.behaviors = {Behavior::MarketStrategic};
  for (const RunRow& r : run_experiment(spec)) rows.push_back(r);
  const std::vector<AggRow> agg = aggregate(rows);

  const auto cell = [&](const char* mech, const char* behavior, double mu) {
    const AggRow* a = find_cell(agg, mech, behavior, mu);
    if (!a) {
      report(false, fmt("missing cell %s/%s mu=%g", mech, behavior, mu));
      return 0.0;
    }
    return a->mean_utility_mean;
  };

  // (a) strategic users without a market collapse under load.
  const double strat_light = cell("proportional_share", "strategic_max", 120);
  for (double mu : {60.0, 40.0, 20.0}) {
    const double r = cell("proportional_share", "strategic_max", mu) / strat_light;
    report(r < 0.10,
           fmt("(a) strategic, no market: utility at mu=%g is %.3f of its mu=120 value "
               "(bound < 0.10)",
               mu, r));
  }

  // (b) obedient users degrade gracefully at every load.
  double obed_max = 0.0;
  for (double mu : sweep) obed_max = std::max(obed_max, cell("proportional_share", "obedient", mu));
  double worst_b = 1e300;
  double worst_b_mu = 0.0;
  for (double mu : sweep) {
    const double r = cell("proportional_share", "obedient", mu) / obed_max;
    if (r < worst_b) {
      worst_b = r;
      worst_b_mu = mu;
    }
  }
  report(worst_b >= 0.75,
         fmt("(b) obedient, no market: worst utility %.3f of own max, at mu=%g (bound >= 0.75)",
             worst_b, worst_b_mu));

  // (c) the market restores strategic users to near-obedient utility.
  double worst_c = 1e300;
  double worst_c_mu = 0.0;
  for (double mu : sweep) {
    const double r = cell("market_ps", "market_strategic", mu) /
                     cell("proportional_share", "obedient", mu);
    if (r < worst_c) {
      worst_c = r;
      worst_c_mu = mu;
    }
  }
  report(worst_c >= 0.80,
         fmt("(c) strategic with market vs obedient: worst ratio %.3f at mu=%g (bound >= 0.80)",
             worst_c, worst_c_mu));
}

// ---------------------------------------------------------------- criterion 5

void criterion5() {
  SimConfig cfg;
  cfg.interarrival_mu = 40.0;
  cfg.seed = 1;

  cfg.mechanism = MechanismSpec::market_ps();
  const double market_total = run(cfg).aggregate_utility;

  double best_fixed = -1.0;
  double best_price = 0.0;
  bool all_below = true;
  for (int i = 1; i <= 20; ++i) {
    const double price = static_cast<double>(i) / 10.0;
    cfg.mechanism = MechanismSpec::fixed_price(price);
    const double total = run(cfg).aggregate_utility;
    if (total >= market_total) all_below = false;
    if (total > best_fixed) {
      best_fixed = total;
      best_price = price;
    }
  }
  report(all_below,
         fmt("variable pricing total %.3f beats every fixed price in {0.1..2.0} "
             "(best fixed %.3f at p=%.1f)",
             market_total, best_fixed, best_price));
}

// ---------------------------------------------------------------- criterion 6

void criterion6() {
  SplitMix64 rng(20260814);
  const DistributionSpec size_dist = DistributionSpec::gaussian(10.0, 5.0, 0.01);
  const DistributionSpec slack_dist = DistributionSpec::gaussian(75.0, 37.5, 0.01);

  int violations = 0;
  int instances_short = 0;
  double achieved_total = 0.0;
  double optimal_total = 0.0;
  const int kInstances = 40;
  for (int inst = 0; inst < kInstances; ++inst) {
    const int k = 1 + static_cast<int>(rng.next() % 8);
    std::vector<Task> tasks;
    for (int i = 0; i < k; ++i) {
      Task t;
      t.id = static_cast<std::uint64_t>(i + 1);
      t.owner = 0;
      t.arrival_time = rng.uniform_co() * 120.0;
      t.size = size_dist.sample(rng);
      t.deadline = t.arrival_time + slack_dist.sample(rng);
      t.value = rng.uniform_oc();
      tasks.push_back(t);
    }
    SimConfig cfg;
    cfg.n_users = 1;
    cfg.horizon = 400.0;
    const double achieved = run_with_arrivals(cfg, {tasks}).aggregate_utility;
    const double optimal = optimal_utility_bruteforce(tasks, cfg.capacity);
    if (achieved > optimal + 1e-9) ++violations;
    if (optimal > 0.0 && achieved < 0.9 * optimal) ++instances_short;
    achieved_total += achieved;
    optimal_total += optimal;
  }
  report(violations == 0,
         fmt("%d random 1-user instances (<= 8 tasks): %d exceeded the brute-force optimum",
             kInstances, violations));
  const double aggregate = achieved_total / optimal_total;
  report(aggregate >= 0.90,
         fmt("aggregate achieved/optimal = %.4f (bound >= 0.90; %d instances individually "
             "below 0.90)",
             aggregate, instances_short));
}

// ---------------------------------------------------------------- criterion 7

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion7() {
  ExperimentSpec spec;
  spec.sweep = {60, 20};
  spec.mechanisms = {MechanismSpec::market_ps()};
  spec.behaviors = {Behavior::MarketStrategic};
  spec.seeds = {1, 2, 3};

  const auto base = std::filesystem::temp_directory_path();
  const auto dir1 = base / "marketsim_accept_a";
  const auto dir2 = base / "marketsim_accept_b";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  run_experiment_to_dir(spec, dir1.string(), 4);
  run_experiment_to_dir(spec, dir2.string(), 1);
  const bool runs_same = slurp(dir1 / "runs.csv") == slurp(dir2 / "runs.csv");
  const bool agg_same = slurp(dir1 / "agg.csv") == slurp(dir2 / "agg.csv");
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  report(runs_same && agg_same,
         "repeated sweep with different worker counts: csv outputs byte-identical");

  SimConfig cfg;
  cfg.interarrival_mu = 60.0;
  cfg.seed = 1;
  const RunRecord pinned = run(cfg);
  const double measured = mean_utility_per_host(pinned, cfg.n_users, cfg.horizon);
  const double golden = 0.044474555312599411;
  report(std::abs(measured - golden) <= 1e-9 * golden,
         fmt("pinned run mean utility %.17g (golden %.17g, rel tol 1e-9)", measured, golden));

  cfg.dt = 0.05;
  const RunRecord halved = run(cfg);
  const double rel =
      std::abs(halved.aggregate_utility - pinned.aggregate_utility) / pinned.aggregate_utility;
  report(rel < 0.02,
         fmt("halving dt 0.1 -> 0.05 changes aggregate utility by %.3g%% (bound < 2%%)",
             rel * 100.0));
}

// -----------------------------------------------------------------------------

const char* kTitles[8] = {nullptr,
                          "allocation correctness",
                          "weighted fairness",
                          "credit conservation",
                          "utility vs load",
                          "variable vs fixed pricing",
                          "single-user optimality",
                          "determinism and discretization"};

int run_criterion(int k) {
  g_failures = 0;
  std::printf("criterion %d: %s\n", k, kTitles[k]);
  switch (k) {
    case 1: criterion1(); break;
    case 2: criterion2(); break;
    case 3: criterion3(); break;
    case 4: criterion4(); break;
    case 5: criterion5(); break;
    case 6: criterion6(); break;
    case 7: criterion7(); break;
  }
  const bool pass = g_failures == 0;
  std::printf("CRITERION %d %s\n", k, pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 2) {
    std::fprintf(stderr, "usage: %s [criterion 1-7]\n", argv[0]);
    return 2;
  }
  if (argc == 2) {
    const int k = std::atoi(argv[1]);
    if (k < 1 || k > 7) {
      std::fprintf(stderr, "usage: %s [criterion 1-7]\n", argv[0]);
      return 2;
    }
    return run_criterion(k);
  }
  int rc = 0;
  for (int k = 1; k <= 7; ++k) rc |= run_criterion(k);
  return rc;
}

#include "marketsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "marketsim/engine.hpp"
#include "marketsim/metrics.hpp"

namespace marketsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field, what);
}

void check_known_keys(const json& obj, const std::string& prefix,
                      const std::set<std::string>& known) {
  for (const auto& item : obj.items()) {
    if (!known.count(item.key())) {
      fail(prefix.empty() ? item.key() : prefix + "." + item.key(), "unknown key");
    }
  }
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

std::uint64_t as_seed(const json& j, const std::string& field) {
  if (!j.is_number_unsigned()) fail(field, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

SimConfig parse_base(const json& obj) {
  static const std::set<std::string> known = {
      "n_users",       "horizon",
      "dt",            "capacity",
      "mechanism",     "behavior",
      "interarrival_mu", "size_mu",
      "size_sigma",    "deadline_mu",
      "deadline_sigma", "value_range",
      "income_rate",   "income_rates",
      "max_weight",    "redistribution_tax",
      "redistribution_interval", "fairness_window",
      "expiry_policy", "seed"};
  if (!obj.is_object()) fail("base", "expected an object");
  check_known_keys(obj, "base", known);

  SimConfig c;
  if (obj.contains("n_users")) c.n_users = as_int(obj["n_users"], "base.n_users");
  if (obj.contains("horizon")) c.horizon = as_number(obj["horizon"], "base.horizon");
  if (obj.contains("dt")) c.dt = as_number(obj["dt"], "base.dt");
  if (obj.contains("capacity")) c.capacity = as_number(obj["capacity"], "base.capacity");
  if (obj.contains("mechanism"))
    c.mechanism = parse_mechanism(as_string(obj["mechanism"], "base.mechanism"));
  if (obj.contains("behavior"))
    c.behavior = parse_behavior(as_string(obj["behavior"], "base.behavior"));
  if (obj.contains("interarrival_mu"))
    c.interarrival_mu = as_number(obj["interarrival_mu"], "base.interarrival_mu");
  if (obj.contains("size_mu")) c.size_mu = as_number(obj["size_mu"], "base.size_mu");
  if (obj.contains("size_sigma")) c.size_sigma = as_number(obj["size_sigma"], "base.size_sigma");
  if (obj.contains("deadline_mu"))
    c.deadline_mu = as_number(obj["deadline_mu"], "base.deadline_mu");
  if (obj.contains("deadline_sigma"))
    c.deadline_sigma = as_number(obj["deadline_sigma"], "base.deadline_sigma");
  if (obj.contains("value_range")) {
    const json& vr = obj["value_range"];
    if (!vr.is_array() || vr.size() != 2) fail("base.value_range", "expected [lo, hi]");
    c.value_lo = as_number(vr[0], "base.value_range[0]");
    c.value_hi = as_number(vr[1], "base.value_range[1]");
  }
  if (obj.contains("income_rate"))
    c.income_rate = as_number(obj["income_rate"], "base.income_rate");
  if (obj.contains("income_rates")) {
    const json& arr = obj["income_rates"];
    if (!arr.is_array()) fail("base.income_rates", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.income_rates.push_back(as_number(arr[i], "base.income_rates[" + std::to_string(i) + "]"));
  }
  if (obj.contains("max_weight")) c.max_weight = as_number(obj["max_weight"], "base.max_weight");
  if (obj.contains("redistribution_tax"))
    c.redistribution_tax = as_number(obj["redistribution_tax"], "base.redistribution_tax");
  if (obj.contains("redistribution_interval"))
    c.redistribution_interval =
        as_number(obj["redistribution_interval"], "base.redistribution_interval");
  if (obj.contains("fairness_window"))
    c.fairness_window = as_number(obj["fairness_window"], "base.fairness_window");
  if (obj.contains("expiry_policy"))
    c.expiry_policy = parse_expiry_policy(as_string(obj["expiry_policy"], "base.expiry_policy"));
  if (obj.contains("seed")) c.seed = as_seed(obj["seed"], "base.seed");
  return c;
}

}  // namespace

ExperimentSpec parse_experiment(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("json", e.what());
  }
  if (!doc.is_object()) fail("json", "top level must be an object");
  static const std::set<std::string> known = {"base",      "sweep", "mechanisms",
                                              "behaviors", "seeds", "output"};
  check_known_keys(doc, "", known);

  ExperimentSpec spec;
  if (doc.contains("base")) spec.base = parse_base(doc["base"]);

  if (!doc.contains("sweep")) fail("sweep", "required");
  const json& sweep = doc["sweep"];
  if (!sweep.is_array() || sweep.empty()) fail("sweep", "expected a non-empty array");
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    double mu = as_number(sweep[i], "sweep[" + std::to_string(i) + "]");
    if (!(mu > 0)) fail("sweep[" + std::to_string(i) + "]", "must be > 0");
    spec.sweep.push_back(mu);
  }

  if (!doc.contains("mechanisms")) fail("mechanisms", "required");
  const json& mechs = doc["mechanisms"];
  if (!mechs.is_array() || mechs.empty()) fail("mechanisms", "expected a non-empty array");
  for (std::size_t i = 0; i < mechs.size(); ++i)
    spec.mechanisms.push_back(
        parse_mechanism(as_string(mechs[i], "mechanisms[" + std::to_string(i) + "]")));

  if (!doc.contains("behaviors")) fail("behaviors", "required");
  const json& behs = doc["behaviors"];
  if (!behs.is_array() || behs.empty()) fail("behaviors", "expected a non-empty array");
  for (std::size_t i = 0; i < behs.size(); ++i)
    spec.behaviors.push_back(
        parse_behavior(as_string(behs[i], "behaviors[" + std::to_string(i) + "]")));

  if (!doc.contains("seeds")) fail("seeds", "required");
  const json& seeds = doc["seeds"];
  if (!seeds.is_array() || seeds.empty()) fail("seeds", "expected a non-empty array");
  std::set<std::uint64_t> seen;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    std::uint64_t s = as_seed(seeds[i], "seeds[" + std::to_string(i) + "]");
    if (!seen.insert(s).second) fail("seeds[" + std::to_string(i) + "]", "duplicate seed");
    spec.seeds.push_back(s);
  }

  if (doc.contains("output")) spec.output = as_string(doc["output"], "output");

  SimConfig probe = spec.base;
  probe.mechanism = spec.mechanisms.front();
  probe.behavior = spec.behaviors.front();
  probe.interarrival_mu = spec.sweep.front();
  probe.seed = spec.seeds.front();
  validate(probe);
  return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("config", "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_experiment(text);
}

int default_jobs() {
  if (const char* env = std::getenv("MARKETSIM_JOBS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

namespace {

struct Cell {
  MechanismSpec mechanism;
  Behavior behavior;
  double mu = 0.0;
  std::uint64_t seed = 0;
};

RunRow run_cell(const SimConfig& base, const Cell& cell) {
  SimConfig cfg = base;
  cfg.mechanism = cell.mechanism;
  cfg.behavior = cell.behavior;
  cfg.interarrival_mu = cell.mu;
  cfg.seed = cell.seed;
  RunRecord rec = run(cfg);

  RunRow row;
  row.mechanism = mechanism_name(cell.mechanism);
  row.behavior = behavior_name(cell.behavior);
  row.mu = cell.mu;
  row.arrival_rate = 1.0 / cell.mu;
  row.seed = cell.seed;
  row.mean_utility = mean_utility_per_host(rec, cfg.n_users, cfg.horizon);
  row.efficiency = efficiency(rec);
  row.tasks_arrived = rec.tasks_arrived;
  row.tasks_completed = rec.tasks_completed;
  row.tasks_expired = rec.tasks_expired;
  row.total_spend = rec.total_spend();
  row.final_balance_sum = rec.final_balance_sum();
  return row;
}

}  // namespace

std::vector<RunRow> run_experiment(const ExperimentSpec& spec, int jobs, bool quiet) {
  std::vector<Cell> cells;
  for (const MechanismSpec& m : spec.mechanisms)
    for (Behavior b : spec.behaviors)
      for (double mu : spec.sweep)
        for (std::uint64_t s : spec.seeds) cells.push_back({m, b, mu, s});

  std::vector<RunRow> rows(cells.size());
  if (jobs <= 0) jobs = default_jobs();
  jobs = std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        rows[i] = run_cell(spec.base, cells[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      std::size_t k = done.fetch_add(1) + 1;
      if (!quiet) {
        std::fprintf(stderr, "[%zu/%zu] %s %s mu=%g seed=%llu\n", k, cells.size(),
                     rows[i].mechanism.c_str(), rows[i].behavior.c_str(), rows[i].mu,
                     static_cast<unsigned long long>(rows[i].seed));
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
    return std::tie(a.mechanism, a.behavior, a.mu, a.seed) <
           std::tie(b.mechanism, b.behavior, b.mu, b.seed);
  });
  return rows;
}

std::vector<AggRow> aggregate(const std::vector<RunRow>& rows) {
  std::vector<AggRow> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].mechanism == rows[i].mechanism &&
           rows[j].behavior == rows[i].behavior && rows[j].mu == rows[i].mu)
      ++j;
    const std::size_t n = j - i;

    auto mean_of = [&](auto get) {
      double s = 0.0;
      for (std::size_t k = i; k < j; ++k) s += get(rows[k]);
      return s / static_cast<double>(n);
    };
    auto std_of = [&](auto get, double mean) {
      if (n < 2) return 0.0;
      double ss = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        double d = get(rows[k]) - mean;
        ss += d * d;
      }
      return std::sqrt(ss / static_cast<double>(n - 1));
    };

    AggRow a;
    a.mechanism = rows[i].mechanism;
    a.behavior = rows[i].behavior;
    a.mu = rows[i].mu;
    a.arrival_rate = rows[i].arrival_rate;
    a.n_seeds = static_cast<long>(n);
    a.mean_utility_mean = mean_of([](const RunRow& r) { return r.mean_utility; });
    a.mean_utility_std =
        std_of([](const RunRow& r) { return r.mean_utility; }, a.mean_utility_mean);
    a.efficiency_mean = mean_of([](const RunRow& r) { return r.efficiency; });
    a.efficiency_std = std_of([](const RunRow& r) { return r.efficiency; }, a.efficiency_mean);
    a.tasks_arrived_mean =
        mean_of([](const RunRow& r) { return static_cast<double>(r.tasks_arrived); });
    a.tasks_completed_mean =
        mean_of([](const RunRow& r) { return static_cast<double>(r.tasks_completed); });
    a.tasks_expired_mean =
        mean_of([](const RunRow& r) { return static_cast<double>(r.tasks_expired); });
    a.total_spend_mean = mean_of([](const RunRow& r) { return r.total_spend; });
    a.final_balance_sum_mean = mean_of([](const RunRow& r) { return r.final_balance_sum; });
    out.push_back(std::move(a));
    i = j;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  for (char& c : buf) {
    if (c == '\0') break;
    if (c == ',') c = '.';
  }
  return buf;
}

void write_runs_csv(std::ostream& os, const std::vector<RunRow>& rows) {
  os << "mechanism,behavior,mu,arrival_rate,seed,mean_utility,efficiency,"
        "tasks_arrived,tasks_completed,tasks_expired,total_spend,final_balance_sum\n";
  for (const RunRow& r : rows) {
    os << r.mechanism << ',' << r.behavior << ',' << format_double(r.mu) << ','
       << format_double(r.arrival_rate) << ',' << r.seed << ',' << format_double(r.mean_utility)
       << ',' << format_double(r.efficiency) << ',' << r.tasks_arrived << ',' << r.tasks_completed
       << ',' << r.tasks_expired << ',' << format_double(r.total_spend) << ','
       << format_double(r.final_balance_sum) << '\n';
  }
}

void write_agg_csv(std::ostream& os, const std::vector<AggRow>& rows) {
  os << "mechanism,behavior,mu,arrival_rate,n_seeds,mean_utility_mean,mean_utility_std,"
        "efficiency_mean,efficiency_std,tasks_arrived_mean,tasks_completed_mean,"
        "tasks_expired_mean,total_spend_mean,final_balance_sum_mean\n";
  for (const AggRow& a : rows) {
    os << a.mechanism << ',' << a.behavior << ',' << format_double(a.mu) << ','
       << format_double(a.arrival_rate) << ',' << a.n_seeds << ','
       << format_double(a.mean_utility_mean) << ',' << format_double(a.mean_utility_std) << ','
       << format_double(a.efficiency_mean) << ',' << format_double(a.efficiency_std) << ','
       << format_double(a.tasks_arrived_mean) << ',' << format_double(a.tasks_completed_mean)
       << ',' << format_double(a.tasks_expired_mean) << ',' << format_double(a.total_spend_mean)
       << ',' << format_double(a.final_balance_sum_mean) << '\n';
  }
}

void run_experiment_to_dir(const ExperimentSpec& spec, const std::string& out_dir, int jobs,
                           bool quiet) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir + ": " + ec.message());

  std::vector<RunRow> rows = run_experiment(spec, jobs, quiet);
  std::vector<AggRow> aggs = aggregate(rows);

  auto write_file = [&](const std::string& name, auto writer) {
    fs::path p = fs::path(out_dir) / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + p.string());
    writer(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + p.string());
  };
  write_file("runs.csv", [&](std::ostream& os) { write_runs_csv(os, rows); });
  write_file("agg.csv", [&](std::ostream& os) { write_agg_csv(os, aggs); });
}

}  // namespace marketsim

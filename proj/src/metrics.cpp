#include "marketsim/metrics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace marketsim {

double mean_utility_per_host(const RunRecord& record, int n_users, double horizon) {
  assert(n_users >= 1 && horizon > 0.0);
  return record.aggregate_utility / (static_cast<double>(n_users) * horizon);
}

double efficiency(const RunRecord& record) {
  return efficiency_against(record.aggregate_utility, record.arrived_value_size);
}

double efficiency_against(double achieved_utility, double bound) {
  if (bound <= 0.0) return 0.0;
  return achieved_utility / bound;
}

namespace {

// Can every task in `subset` finish by its deadline? Event-driven preemptive
// EDF in continuous time on a single server of the given capacity.
bool edf_feasible(const std::vector<const Task*>& subset, double capacity) {
  const std::size_t n = subset.size();
  if (n == 0) return true;

  std::vector<double> remaining(n);
  std::vector<bool> finished(n, false);
  std::vector<std::size_t> by_arrival(n);
  for (std::size_t i = 0; i < n; ++i) {
    remaining[i] = subset[i]->size;
    by_arrival[i] = i;
  }
  std::sort(by_arrival.begin(), by_arrival.end(), [&](std::size_t a, std::size_t b) {
    return subset[a]->arrival_time < subset[b]->arrival_time;
  });

  double now = subset[by_arrival[0]]->arrival_time;
  std::size_t next_arrival = 0;
  std::size_t done = 0;

  while (done < n) {
    while (next_arrival < n && subset[by_arrival[next_arrival]]->arrival_time <= now) {
      ++next_arrival;
    }
    // Earliest-deadline pending task.
    std::size_t current = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (finished[i] || subset[i]->arrival_time > now) continue;
      if (current == n || subset[i]->deadline < subset[current]->deadline) current = i;
    }
    if (current == n) {
      // Idle until the next arrival.
      if (next_arrival >= n) return false;
      now = subset[by_arrival[next_arrival]]->arrival_time;
      continue;
    }
    double horizon = now + remaining[current] / capacity;
    if (next_arrival < n) {
      horizon = std::min(horizon, subset[by_arrival[next_arrival]]->arrival_time);
    }
    remaining[current] -= (horizon - now) * capacity;
    now = horizon;
    if (remaining[current] <= 1e-12) {
      if (now > subset[current]->deadline + 1e-9) return false;
      finished[current] = true;
      ++done;
    } else if (now > subset[current]->deadline + 1e-9) {
      return false;
    }
  }
  return true;
}

}  // namespace

double optimal_utility_bruteforce(const std::vector<Task>& tasks, double capacity) {
  const std::size_t n = tasks.size();
  assert(n <= 20);
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double value = 0.0;
    std::vector<const Task*> subset;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        subset.push_back(&tasks[i]);
        value += tasks[i].value * tasks[i].size;
      }
    }
    if (value <= best) continue;
    if (edf_feasible(subset, capacity)) best = value;
  }
  return best;
}

std::vector<FairnessWindow> fairness_windows(const RunRecord& record) {
  std::vector<FairnessWindow> windows;
  windows.reserve(record.window_usage.size());
  for (std::size_t w = 0; w < record.window_usage.size(); ++w) {
    const double start = static_cast<double>(w) * record.fairness_window_length;
    FairnessWindow win;
    win.window_length = std::min(record.fairness_window_length, record.horizon - start);
    win.usage = record.window_usage[w];
    windows.push_back(std::move(win));
  }
  return windows;
}

FairnessRatio fairness_ratio(const std::vector<FairnessWindow>& windows, int i, int j) {
  FairnessRatio out;
  double total_i = 0.0;
  double total_j = 0.0;
  for (const FairnessWindow& w : windows) {
    const double ui = w.usage[static_cast<std::size_t>(i)];
    const double uj = w.usage[static_cast<std::size_t>(j)];
    if (ui <= 0.0 || uj <= 0.0) continue;  // someone idle: skip the window
    out.per_window.push_back(ui / uj);
    total_i += ui;
    total_j += uj;
  }
  if (!out.per_window.empty()) out.aggregate = total_i / total_j;
  return out;
}

}  // namespace marketsim

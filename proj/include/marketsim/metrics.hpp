#pragma once

#include <optional>
#include <vector>

#include "marketsim/core.hpp"

namespace marketsim {

/// aggregate utility / (n_users * horizon).
double mean_utility_per_host(const RunRecord& record, int n_users, double horizon);

/// Achieved utility over an offline upper bound. The default bound is the
/// sum of value*size over every arrived task, which is loose but monotone
/// and cheap; 0 when nothing arrived.
double efficiency(const RunRecord& record);

/// Achieved utility against an explicit bound (e.g. the brute-force optimum
/// on small instances). 0 when the bound is not positive.
double efficiency_against(double achieved_utility, double bound);

/// Exact optimal utility of a small task set on one server: enumerates every
/// subset and keeps the most valuable one whose tasks can all meet their
/// deadlines under preemptive earliest-deadline-first. EDF is feasibility-
/// optimal on a single resource, so this dominates every schedule the engine
/// can produce. Cost is O(2^n * n log n); intended for n <= ~16.
double optimal_utility_bruteforce(const std::vector<Task>& tasks, double capacity);

/// Per-window resource usage, for the fairness analysis.
struct FairnessWindow {
  double window_length = 0.0;
  std::vector<double> usage;  // per-user resource-units consumed
};

std::vector<FairnessWindow> fairness_windows(const RunRecord& record);

/// Consumption ratios usage[i]/usage[j]. Windows where either user consumed
/// nothing are skipped; the aggregate is total-over-total across the
/// windows kept, absent when every window was skipped.
struct FairnessRatio {
  std::vector<double> per_window;
  std::optional<double> aggregate;
};

FairnessRatio fairness_ratio(const std::vector<FairnessWindow>& windows, int i, int j);

}  // namespace marketsim

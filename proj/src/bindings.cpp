#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "marketsim/agents.hpp"
#include "marketsim/core.hpp"
#include "marketsim/engine.hpp"
#include "marketsim/harness.hpp"
#include "marketsim/mechanisms.hpp"
#include "marketsim/metrics.hpp"
#include "marketsim/workload.hpp"

namespace py = pybind11;
using namespace marketsim;

PYBIND11_MODULE(_core, m) {
  m.doc() = "market-based CPU allocation simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Behavior>(m, "Behavior")
      .value("OBEDIENT", Behavior::Obedient)
      .value("STRATEGIC_MAX", Behavior::StrategicMax)
      .value("MARKET_STRATEGIC", Behavior::MarketStrategic);

  py::enum_<ExpiryPolicy>(m, "ExpiryPolicy")
      .value("ABANDON_AT_DEADLINE", ExpiryPolicy::AbandonAtDeadline)
      .value("RUN_TO_COMPLETION", ExpiryPolicy::RunToCompletion);

  py::enum_<TaskStatus>(m, "TaskStatus")
      .value("PENDING", TaskStatus::Pending)
      .value("COMPLETED", TaskStatus::Completed)
      .value("EXPIRED", TaskStatus::Expired);

  py::class_<MechanismSpec>(m, "MechanismSpec")
      .def_static("proportional_share", &MechanismSpec::proportional_share)
      .def_static("market_ps", &MechanismSpec::market_ps)
      .def_static("fixed_price", &MechanismSpec::fixed_price, py::arg("price"))
      .def_readonly("price", &MechanismSpec::price)
      .def("uses_credits", &MechanismSpec::uses_credits)
      .def("__repr__", [](const MechanismSpec& s) { return mechanism_name(s); });

  m.def("parse_mechanism", &parse_mechanism, py::arg("name"));
  m.def("mechanism_name", &mechanism_name, py::arg("mechanism"));
  m.def("parse_behavior", &parse_behavior, py::arg("name"));
  m.def("behavior_name", &behavior_name, py::arg("behavior"));

  py::class_<Task>(m, "Task")
      .def(py::init<>())
      .def_readwrite("id", &Task::id)
      .def_readwrite("owner", &Task::owner)
      .def_readwrite("arrival_time", &Task::arrival_time)
      .def_readwrite("size", &Task::size)
      .def_readwrite("deadline", &Task::deadline)
      .def_readwrite("value", &Task::value)
      .def_readwrite("accumulated", &Task::accumulated)
      .def_readwrite("completed_at", &Task::completed_at)
      .def("remaining", &Task::remaining);

  m.def("task_utility", &task_utility, py::arg("task"), py::arg("completion_time"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n_users", &SimConfig::n_users)
      .def_readwrite("horizon", &SimConfig::horizon)
      .def_readwrite("dt", &SimConfig::dt)
      .def_readwrite("capacity", &SimConfig::capacity)
      .def_readwrite("mechanism", &SimConfig::mechanism)
      .def_readwrite("behavior", &SimConfig::behavior)
      .def_readwrite("interarrival_mu", &SimConfig::interarrival_mu)
      .def_readwrite("size_mu", &SimConfig::size_mu)
      .def_readwrite("size_sigma", &SimConfig::size_sigma)
      .def_readwrite("deadline_mu", &SimConfig::deadline_mu)
      .def_readwrite("deadline_sigma", &SimConfig::deadline_sigma)
      .def_readwrite("value_lo", &SimConfig::value_lo)
      .def_readwrite("value_hi", &SimConfig::value_hi)
      .def_readwrite("income_rate", &SimConfig::income_rate)
      .def_readwrite("income_rates", &SimConfig::income_rates)
      .def_readwrite("max_weight", &SimConfig::max_weight)
      .def_readwrite("redistribution_tax", &SimConfig::redistribution_tax)
      .def_readwrite("redistribution_interval", &SimConfig::redistribution_interval)
      .def_readwrite("fairness_window", &SimConfig::fairness_window)
      .def_readwrite("expiry_policy", &SimConfig::expiry_policy)
      .def_readwrite("seed", &SimConfig::seed);

  m.def("validate", &validate, py::arg("config"));

  py::class_<TaskOutcome>(m, "TaskOutcome")
      .def_readonly("id", &TaskOutcome::id)
      .def_readonly("owner", &TaskOutcome::owner)
      .def_readonly("arrival_time", &TaskOutcome::arrival_time)
      .def_readonly("size", &TaskOutcome::size)
      .def_readonly("deadline", &TaskOutcome::deadline)
      .def_readonly("value", &TaskOutcome::value)
      .def_readonly("accumulated", &TaskOutcome::accumulated)
      .def_readonly("completed_at", &TaskOutcome::completed_at)
      .def_readonly("status", &TaskOutcome::status);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("n_users", &RunRecord::n_users)
      .def_readonly("horizon", &RunRecord::horizon)
      .def_readonly("dt", &RunRecord::dt)
      .def_readonly("utility", &RunRecord::utility)
      .def_readonly("spend", &RunRecord::spend)
      .def_readonly("income", &RunRecord::income)
      .def_readonly("resources", &RunRecord::resources)
      .def_readonly("final_balance", &RunRecord::final_balance)
      .def_readonly("tasks_arrived", &RunRecord::tasks_arrived)
      .def_readonly("tasks_completed", &RunRecord::tasks_completed)
      .def_readonly("tasks_expired", &RunRecord::tasks_expired)
      .def_readonly("tasks_pending", &RunRecord::tasks_pending)
      .def_readonly("aggregate_utility", &RunRecord::aggregate_utility)
      .def_readonly("arrived_value_size", &RunRecord::arrived_value_size)
      .def_readonly("total_charges", &RunRecord::total_charges)
      .def_readonly("redistribution_drift", &RunRecord::redistribution_drift)
      .def_readonly("fairness_window_length", &RunRecord::fairness_window_length)
      .def_readonly("window_usage", &RunRecord::window_usage)
      .def_readonly("task_log", &RunRecord::task_log)
      .def("total_utility", &RunRecord::total_utility)
      .def("final_balance_sum", &RunRecord::final_balance_sum)
      .def("total_spend", &RunRecord::total_spend);

  m.def(
      "proportional_share_allocate",
      [](const BidVector& w) { return proportional_share_allocate(w).shares; }, py::arg("weights"));
  m.def(
      "market_allocate", [](const BidVector& b) { return market_allocate(b).shares; },
      py::arg("bids"));
  m.def(
      "fixed_price_allocate",
      [](double price, const BidVector& willingness, double capacity,
         std::optional<int> holder) {
        FixedPriceResult r = fixed_price_allocate(price, willingness, capacity, holder);
        return py::make_tuple(r.winner, r.charge_rate);
      },
      py::arg("price"), py::arg("willingness"), py::arg("capacity") = 1.0,
      py::arg("holder") = py::none());
  m.def("redistribute", &redistribute, py::arg("balances"), py::arg("tax"));

  m.def("generate_workload", &generate_workload, py::arg("config"));
  m.def("run", &run, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_with_arrivals", &run_with_arrivals, py::arg("config"), py::arg("arrivals"),
        py::call_guard<py::gil_scoped_release>());

  m.def("mean_utility_per_host", &mean_utility_per_host, py::arg("record"), py::arg("n_users"),
        py::arg("horizon"));
  m.def("efficiency", &efficiency, py::arg("record"));
  m.def("optimal_utility_bruteforce", &optimal_utility_bruteforce, py::arg("tasks"),
        py::arg("capacity") = 1.0);
}

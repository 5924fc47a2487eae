#pragma once

#include "epictrl/metrics.hpp"
#include "epictrl/scenario.hpp"
#include "epictrl/simulation.hpp"

#include <functional>
#include <string>
#include <vector>

namespace epictrl {

struct TrajectoryRow {
    Aggregates a;
    double cost_accum = 0.0;
};

/// Maximal run of steps with the same controller driver.
struct ActivityInterval {
    double start = 0.0;
    double end = 0.0;
    Driver driver = Driver::Idle;
};

struct RunSummary {
    std::string scenario;
    double horizon_days = 0.0;
    double alpha = 2.0;
    double econ = 0.0;
    std::array<double, 3> econ_by_alpha{};
    double deaths = 0.0;
    double deaths_strain2 = 0.0;
    double peak_I = 0.0, peak_H = 0.0, peak_T = 0.0;
    double days_H_over_capacity = 0.0;
    double days_T_over_capacity = 0.0;
    double initial_mass = 0.0;
    double final_mass = 0.0;
    double first_doses = 0.0;
    double second_doses = 0.0;
    std::size_t steps = 0;
    bool fault = false;
    std::string fault_message;
};

struct RunOutput {
    std::vector<TrajectoryRow> rows;
    std::vector<ActivityInterval> activity;
    RunSummary summary;
    CostAccumulator costs;
};

/// Called after every accepted step.
using StepObserver = std::function<void(const Simulation&, const StepRecord&)>;

/// Runs a built scenario to its horizon. An IntegrationFault ends the run
/// early and is reported in the summary rather than thrown.
RunOutput run_built(const BuiltScenario& built, double alpha, double output_interval, const std::string& name,
                    const StepObserver& observer = {});
RunOutput run_scenario(const ScenarioConfig& cfg, const StepObserver& observer = {});

std::string trajectory_csv(const RunOutput& out);
std::string activity_csv(const RunOutput& out);
std::string summary_json(const RunOutput& out);
std::string plot_script();

/// Writes trajectory.csv, summary.json, activity.csv and plot.py to `dir`.
void write_run_files(const RunOutput& out, const std::string& dir, bool with_plot = true);

/// Config with one sweep coordinate applied. Keys: lambda_C, tmax_hmax
/// (value = T_max, value2 = H_max), mu, alpha, Delta.
ScenarioConfig apply_sweep_value(const ScenarioConfig& cfg, const std::string& key, const SweepValue& v);

/// Parses "1000,2000" or "10000:20000,5000:10000" for paired keys.
std::vector<SweepValue> parse_sweep_values(const std::string& key, const std::string& text);

std::vector<ParetoPoint> run_sweep(const ScenarioConfig& cfg, const std::string& key,
                                   const std::vector<SweepValue>& values, unsigned threads = 0);

struct ComparePair {
    RunOutput multi;
    RunOutput single;
};

/// The config and its single-class collapse (R0 preserved).
ComparePair compare_single_vs_multi(const ScenarioConfig& cfg);
std::string compare_csv(const ComparePair& pair);

} // namespace epictrl

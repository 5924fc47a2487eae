#pragma once

#include "epictrl/simulation.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace epictrl {

/// (rho - 1)^alpha.
double econ_cost_rate(double rho, double alpha);

/// Running economic and social cost of one trajectory. Econ is integrated
/// by the trapezoid rule on step endpoints for the configured alpha and,
/// in the same pass, for alpha = 1, 2, 3.
struct CostAccumulator {
    double alpha = 2.0;
    double econ = 0.0;
    std::array<double, 3> econ_by_alpha{};
    double deaths = 0.0;
    double elapsed = 0.0;

    void add_interval(double dt, double rho0, double rho1);
};

void accumulate(const StepRecord& step, CostAccumulator& acc);

/// kappa * deaths + econ.
double weighted_objective(const CostAccumulator& acc, double kappa);

/// Integral of (R0/R - 1)^alpha over a piecewise-constant R^rho path.
double piecewise_policy_cost(std::span<const double> R_values, std::span<const double> durations, double R0,
                             double alpha);

/// One coordinate of a parameter sweep. `value2` is used for paired keys
/// such as (T_max, H_max).
struct SweepValue {
    double value = 0.0;
    double value2 = 0.0;
    bool paired = false;
    std::string label() const;
};

struct ParetoPoint {
    std::string key;
    SweepValue coordinate;
    std::array<double, 3> econ_by_alpha{};
    double econ = 0.0;
    double deaths = 0.0;
    double horizon_days = 0.0;
    bool ok = true;
    std::string error;
};

/// Runs `run` for every value, concurrently up to `threads` (0 = hardware
/// concurrency, capped by EPICTRL_THREADS), and returns points in input
/// order. A throwing run yields a point with ok = false.
std::vector<ParetoPoint> pareto_sweep(const std::string& key, std::span<const SweepValue> values,
                                      const std::function<ParetoPoint(const SweepValue&)>& run,
                                      unsigned threads = 0);

/// Worker count honoring EPICTRL_THREADS.
unsigned sweep_threads(unsigned requested, std::size_t jobs);

/// Index of the successful point minimizing kappa * deaths + econ, or -1.
long argmin_objective(std::span<const ParetoPoint> points, double kappa);

/// True if some other successful point is no worse in both econ and deaths
/// and strictly better in one.
bool is_dominated(std::span<const ParetoPoint> points, std::size_t i);

/// `sweep_key,sweep_value,econ_alpha1,econ_alpha2,econ_alpha3,deaths,horizon_days`
void write_pareto_csv(std::span<const ParetoPoint> points, const std::string& path);
std::string pareto_csv(std::span<const ParetoPoint> points);

} // namespace epictrl

#pragma once

#include "epictrl/history.hpp"

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace epictrl {

struct DiracKernel {
    double d = 0.0;
    bool operator==(const DiracKernel&) const = default;
};
struct ExponentialKernel {
    double delta = 1.0;
    bool operator==(const ExponentialKernel&) const = default;
};
struct ShiftedExponentialKernel {
    double d = 0.0;
    double delta = 1.0;
    bool operator==(const ShiftedExponentialKernel&) const = default;
};

/// Distribution of the measurement delay between infections and the
/// restriction decision they trigger.
using DelayKernel = std::variant<DiracKernel, ExponentialKernel, ShiftedExponentialKernel>;

/// Throws ParameterError for d < 0 or delta <= 0.
void validate(const DelayKernel& k);

/// Exponential tails are cut where the remaining mass is e^-10.
inline constexpr double kKernelTailCut = 10.0;

/// Largest delay the kernel reads (days).
double kernel_support(const DelayKernel& k);

/// Density of a continuous kernel at delay tau (0 for a Dirac kernel).
double kernel_density(const DelayKernel& k, double tau);

/// Truncated-kernel average of the history at time t, normalized by the
/// truncated mass. Dirac kernels read one interpolated sample.
double kernel_average(const HistoryBuffer& history, const DelayKernel& k, double t);

/// max{1, kernel_average / lambda_C}.
double rate_control(const HistoryBuffer& history, double lambda_C, const DelayKernel& k, double t);

/// max{1, lambda_U(t - epsilon) / lambda_C}.
double instantaneous_rate_control(const HistoryBuffer& history, double lambda_C, double epsilon, double t);

/// Monotone restriction curve rho(x) = 1 + (rho_max - 1) (x / x_max)^k on
/// [0, x_max]; k = 1 is the linear controller.
class ControllerCurve {
public:
    ControllerCurve() = default;
    static ControllerCurve linear(double x_max, double rho_max);
    static ControllerCurve power(double x_max, double rho_max, double exponent);

    double x_max() const { return x_max_; }
    double rho_max() const { return rho_max_; }
    double exponent() const { return exponent_; }

    /// Clamped to [1, rho_max] outside [0, x_max].
    double operator()(double x) const;
    double derivative(double x) const;
    /// x with rho(x) = rho; rho must lie in [1, rho_max].
    double inverse(double rho) const;

    bool operator==(const ControllerCurve&) const = default;

private:
    ControllerCurve(double x_max, double rho_max, double exponent);
    double x_max_ = 1.0;
    double rho_max_ = 2.0;
    double exponent_ = 1.0;
};

/// Who set rho during a step; used for the activity intervals.
enum class Driver { Idle, Rate, Hospital, Icu, Constant };
std::string_view driver_name(Driver d);

struct ControlDecision {
    double rho = 1.0;
    Driver driver = Driver::Idle;
};

/// Stricter of the two curves; rho_max once either occupancy reaches its
/// x_max. Reports Icu when rho_T >= rho_H and Idle when rho = 1.
ControlDecision ht_control(double H_total, double T_total, const ControllerCurve& rho_H,
                           const ControllerCurve& rho_T);

/// Discrete alert levels keyed to x = max(H / H_max, T / T_max).
struct TierTable {
    std::vector<double> levels{1, 2, 3, 5, 12, 15};
    std::vector<double> thresholds{0.01, 0.1, 0.2, 0.4, 1.0};
    double dwell_min = 21.0;
    double period = 7.0;
    double H_max = 40000.0;
    double T_max = 20000.0;

    /// levels.size() == thresholds.size() + 1, levels increasing from 1,
    /// thresholds increasing in (0, 1].
    void validate() const;
    /// Level index for a normalized occupancy (count of thresholds <= x).
    std::size_t level_for(double x) const;

    bool operator==(const TierTable&) const = default;
};

struct TierState {
    std::size_t level = 0;
    double entered_at = -1e300;
    double next_evaluation = -1e300;
    Driver driver = Driver::Idle;
};

/// Re-evaluates the level when t reaches the next weekly slot; otherwise
/// keeps the current level. Downward moves wait for dwell_min days at the
/// current level.
ControlDecision tiered_ht_control(double H_total, double T_total, const TierTable& table, TierState& state,
                                  double t);

struct NoControl {
    bool operator==(const NoControl&) const = default;
};
struct ConstantControl {
    double rho = 1.0;
    bool operator==(const ConstantControl&) const = default;
};
struct InstantaneousRateControl {
    double lambda_C = 4000.0;
    std::optional<double> epsilon; // defaults to one integration step
    bool operator==(const InstantaneousRateControl&) const = default;
};
struct DelayedRateControl {
    double lambda_C = 4000.0;
    DelayKernel kernel = DiracKernel{0.0};
    bool operator==(const DelayedRateControl&) const = default;
};
struct HtControl {
    ControllerCurve rho_H = ControllerCurve::linear(40000.0, 15.0);
    ControllerCurve rho_T = ControllerCurve::linear(20000.0, 15.0);
    bool operator==(const HtControl&) const = default;
};
struct TieredHtControl {
    TierTable table;
    bool operator==(const TieredHtControl&) const = default;
};

using ControlPolicy = std::variant<NoControl, ConstantControl, InstantaneousRateControl, DelayedRateControl,
                                   HtControl, TieredHtControl>;

/// What a controller may observe at a step boundary.
struct ControlInputs {
    double t = 0.0;
    double H_total = 0.0;
    double T_total = 0.0;
};

/// Stateful wrapper that evaluates a policy once per integration step.
class Controller {
public:
    Controller(ControlPolicy policy, double dt);

    ControlDecision evaluate(const ControlInputs& in, const HistoryBuffer& history);

    /// Look-back the history buffer must retain.
    double history_span() const;
    const ControlPolicy& policy() const { return policy_; }
    const TierState& tier_state() const { return tiers_; }

private:
    ControlPolicy policy_;
    double dt_;
    TierState tiers_;
};

/// Constant R^rho meeting Ĩ(t_max) = Ĩ* from Ĩ(0) in the edge equation.
struct ConstantPolicy {
    double R_rho = 1.0;
    double rho = 1.0;
};

/// R^rho = 1 + log(Ĩ*/Ĩ0)/(gamma t_max), rho = R0/R^rho. Throws
/// InfeasibleError when R^rho <= 0 or rho < 1.
ConstantPolicy optimal_constant_policy(double I_tilde_0, double I_tilde_star, double t_max, double gamma,
                                       double R0);

/// Strongest restriction (R^rho = R0 / rho_max) until Ĩ reaches Ĩ*, then
/// R^rho = 1 to hold it. Only meaningful for Ĩ* < Ĩ0.
struct TwoPhasePolicy {
    double R_min = 1.0;
    double switch_time = 0.0;
    double rho_first = 1.0;
    double rho_hold = 1.0;
};

TwoPhasePolicy two_phase_policy(double I_tilde_0, double I_tilde_star, double t_max, double gamma, double R0,
                                double rho_max);

} // namespace epictrl

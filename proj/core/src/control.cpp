#include "epictrl/control.hpp"

#include "epictrl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace epictrl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Delay range [lo, hi] read by a continuous kernel.
std::pair<double, double> kernel_window(const DelayKernel& k)
{
    return std::visit(overloaded{
                          [](const DiracKernel& x) { return std::pair{x.d, x.d}; },
                          [](const ExponentialKernel& x) { return std::pair{0.0, kKernelTailCut / x.delta}; },
                          [](const ShiftedExponentialKernel& x) {
                              return std::pair{x.d, x.d + kKernelTailCut / x.delta};
                          },
                      },
                      k);
}

} // namespace

void validate(const DelayKernel& k)
{
    std::visit(overloaded{
                   [](const DiracKernel& x) {
                       if (!(x.d >= 0.0)) throw ParameterError("delay d must be non-negative");
                   },
                   [](const ExponentialKernel& x) {
                       if (!(x.delta > 0.0)) throw ParameterError("kernel delta must be positive");
                   },
                   [](const ShiftedExponentialKernel& x) {
                       if (!(x.d >= 0.0)) throw ParameterError("delay d must be non-negative");
                       if (!(x.delta > 0.0)) throw ParameterError("kernel delta must be positive");
                   },
               },
               k);
}

double kernel_support(const DelayKernel& k)
{
    return kernel_window(k).second;
}

double kernel_density(const DelayKernel& k, double tau)
{
    return std::visit(overloaded{
                          [](const DiracKernel&) { return 0.0; },
                          [tau](const ExponentialKernel& x) {
                              return tau < 0.0 ? 0.0 : x.delta * std::exp(-x.delta * tau);
                          },
                          [tau](const ShiftedExponentialKernel& x) {
                              return tau < x.d ? 0.0 : x.delta * std::exp(-x.delta * (tau - x.d));
                          },
                      },
                      k);
}

double kernel_average(const HistoryBuffer& history, const DelayKernel& k, double t)
{
    validate(k);
    if (const auto* dirac = std::get_if<DiracKernel>(&k)) {
        return history.at(t - dirac->d);
    }
    const auto [lo, hi] = kernel_window(k);
    const double u_lo = t - hi;
    const double u_hi = t - lo;

    // Trapezoid over the sample grid clipped to [u_lo, u_hi].
    double num = 0.0;
    double den = 0.0;
    double prev_u = u_lo;
    double prev_w = kernel_density(k, t - u_lo);
    double prev_v = history.at(u_lo);
    auto add = [&](double u, double v) {
        const double w = kernel_density(k, t - u);
        const double h = u - prev_u;
        num += 0.5 * h * (prev_w * prev_v + w * v);
        den += 0.5 * h * (prev_w + w);
        prev_u = u;
        prev_w = w;
        prev_v = v;
    };
    const auto& s = history.samples();
    constexpr double eps = 1e-12;
    for (std::size_t i = history.floor_index(u_lo); i < s.size() && s[i].t < u_hi - eps; ++i) {
        if (s[i].t > prev_u + eps) {
            add(s[i].t, s[i].lambda_u);
        }
    }
    add(u_hi, history.at(u_hi));
    if (!(den > 0.0)) {
        throw InsufficientHistory("kernel window has no mass on the history grid");
    }
    return num / den;
}

double rate_control(const HistoryBuffer& history, double lambda_C, const DelayKernel& k, double t)
{
    if (!(lambda_C > 0.0)) {
        throw ParameterError("lambda_C must be positive");
    }
    return std::max(1.0, kernel_average(history, k, t) / lambda_C);
}

double instantaneous_rate_control(const HistoryBuffer& history, double lambda_C, double epsilon, double t)
{
    return rate_control(history, lambda_C, DiracKernel{epsilon}, t);
}

ControllerCurve::ControllerCurve(double x_max, double rho_max, double exponent)
    : x_max_(x_max)
    , rho_max_(rho_max)
    , exponent_(exponent)
{
    if (!(x_max > 0.0)) {
        throw ParameterError("controller x_max must be positive");
    }
    if (!(rho_max > 1.0)) {
        throw ParameterError("controller rho_max must exceed 1");
    }
    if (!(exponent > 0.0)) {
        throw ParameterError("controller exponent must be positive");
    }
}

ControllerCurve ControllerCurve::linear(double x_max, double rho_max)
{
    return {x_max, rho_max, 1.0};
}

ControllerCurve ControllerCurve::power(double x_max, double rho_max, double exponent)
{
    return {x_max, rho_max, exponent};
}

double ControllerCurve::operator()(double x) const
{
    const double u = std::clamp(x / x_max_, 0.0, 1.0);
    return 1.0 + (rho_max_ - 1.0) * (exponent_ == 1.0 ? u : std::pow(u, exponent_));
}

double ControllerCurve::derivative(double x) const
{
    if (x < 0.0 || x > x_max_) {
        return 0.0;
    }
    const double u = x / x_max_;
    if (exponent_ == 1.0) {
        return (rho_max_ - 1.0) / x_max_;
    }
    return (rho_max_ - 1.0) * exponent_ * std::pow(u, exponent_ - 1.0) / x_max_;
}

double ControllerCurve::inverse(double rho) const
{
    if (!(rho >= 1.0 && rho <= rho_max_)) {
        throw ParameterError("rho outside the controller range");
    }
    const double u = (rho - 1.0) / (rho_max_ - 1.0);
    return x_max_ * (exponent_ == 1.0 ? u : std::pow(u, 1.0 / exponent_));
}

std::string_view driver_name(Driver d)
{
    switch (d) {
    case Driver::Idle: return "idle";
    case Driver::Rate: return "rate";
    case Driver::Hospital: return "H";
    case Driver::Icu: return "T";
    case Driver::Constant: return "constant";
    }
    return "idle";
}

ControlDecision ht_control(double H_total, double T_total, const ControllerCurve& rho_H,
                           const ControllerCurve& rho_T)
{
    const bool h_sat = H_total >= rho_H.x_max();
    const bool t_sat = T_total >= rho_T.x_max();
    if (h_sat || t_sat) {
        return {std::max(rho_H.rho_max(), rho_T.rho_max()), t_sat ? Driver::Icu : Driver::Hospital};
    }
    const double a = rho_H(H_total);
    const double b = rho_T(T_total);
    if (a <= 1.0 && b <= 1.0) {
        return {1.0, Driver::Idle};
    }
    return b >= a ? ControlDecision{b, Driver::Icu} : ControlDecision{a, Driver::Hospital};
}

void TierTable::validate() const
{
    if (levels.size() != thresholds.size() + 1 || levels.empty()) {
        throw ParameterError("tier table needs one more level than thresholds");
    }
    if (levels.front() != 1.0) {
        throw ParameterError("the first tier must be rho = 1");
    }
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!(levels[i] > levels[i - 1])) throw ParameterError("tier levels must be strictly increasing");
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0 && thresholds[i] <= 1.0)) {
            throw ParameterError("tier thresholds must lie in (0, 1]");
        }
        if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
            throw ParameterError("tier thresholds must be strictly increasing");
        }
    }
    if (!(dwell_min >= 0.0) || !(period > 0.0) || !(H_max > 0.0) || !(T_max > 0.0)) {
        throw ParameterError("tier dwell, period and occupancy limits must be positive");
    }
}

std::size_t TierTable::level_for(double x) const
{
    return static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), x) - thresholds.begin());
}

ControlDecision tiered_ht_control(double H_total, double T_total, const TierTable& table, TierState& state,
                                  double t)
{
    constexpr double eps = 1e-9;
    if (t >= state.next_evaluation - eps) {
        const double xh = H_total / table.H_max;
        const double xt = T_total / table.T_max;
        const std::size_t target = table.level_for(std::max(xh, xt));
        const bool first = state.next_evaluation < -1e299;
        if (first || target > state.level ||
            (target < state.level && t - state.entered_at >= table.dwell_min - eps)) {
            if (target != state.level || first) {
                state.entered_at = t;
            }
            state.level = target;
        }
        state.driver = state.level == 0 ? Driver::Idle : (xt >= xh ? Driver::Icu : Driver::Hospital);
        state.next_evaluation = first ? t + table.period : state.next_evaluation + table.period;
        if (state.next_evaluation <= t + eps) {
            state.next_evaluation = t + table.period;
        }
    }
    return {table.levels[state.level], state.driver};
}

Controller::Controller(ControlPolicy policy, double dt)
    : policy_(std::move(policy))
    , dt_(dt)
{
    if (!(dt > 0.0)) {
        throw ParameterError("controller step must be positive");
    }
    std::visit(overloaded{
                   [](const NoControl&) {},
                   [](const ConstantControl& c) {
                       if (!(c.rho >= 1.0)) throw ParameterError("constant rho must be >= 1");
                   },
                   [](const InstantaneousRateControl& c) {
                       if (!(c.lambda_C > 0.0)) throw ParameterError("lambda_C must be positive");
                       if (c.epsilon && !(*c.epsilon >= 0.0)) throw ParameterError("epsilon must be >= 0");
                   },
                   [](const DelayedRateControl& c) {
                       if (!(c.lambda_C > 0.0)) throw ParameterError("lambda_C must be positive");
                       epictrl::validate(c.kernel);
                   },
                   [](const HtControl&) {},
                   [](const TieredHtControl& c) { c.table.validate(); },
               },
               policy_);
}

double Controller::history_span() const
{
    return std::visit(overloaded{
                          [this](const InstantaneousRateControl& c) { return c.epsilon.value_or(dt_); },
                          [](const DelayedRateControl& c) { return kernel_support(c.kernel); },
                          [](const auto&) { return 0.0; },
                      },
                      policy_);
}

ControlDecision Controller::evaluate(const ControlInputs& in, const HistoryBuffer& history)
{
    auto rate = [](double rho) { return ControlDecision{rho, rho > 1.0 ? Driver::Rate : Driver::Idle}; };
    return std::visit(
        overloaded{
            [](const NoControl&) { return ControlDecision{}; },
            [](const ConstantControl& c) {
                return ControlDecision{c.rho, c.rho > 1.0 ? Driver::Constant : Driver::Idle};
            },
            [&](const InstantaneousRateControl& c) {
                return rate(instantaneous_rate_control(history, c.lambda_C, c.epsilon.value_or(dt_), in.t));
            },
            [&](const DelayedRateControl& c) { return rate(rate_control(history, c.lambda_C, c.kernel, in.t)); },
            [&](const HtControl& c) { return ht_control(in.H_total, in.T_total, c.rho_H, c.rho_T); },
            [&](const TieredHtControl& c) {
                return tiered_ht_control(in.H_total, in.T_total, c.table, tiers_, in.t);
            },
        },
        policy_);
}

ConstantPolicy optimal_constant_policy(double I_tilde_0, double I_tilde_star, double t_max, double gamma,
                                       double R0)
{
    if (!(I_tilde_0 > 0.0) || !(I_tilde_star > 0.0) || !(t_max > 0.0) || !(gamma > 0.0) || !(R0 > 0.0)) {
        throw ParameterError("optimal_constant_policy needs positive inputs");
    }
    const double R = 1.0 + std::log(I_tilde_star / I_tilde_0) / (gamma * t_max);
    if (!(R > 0.0)) {
        throw InfeasibleError("target cannot be reached with R^rho > 0");
    }
    const double rho = R0 / R;
    if (rho < 1.0) {
        throw InfeasibleError("target needs R^rho above R0 (rho < 1)");
    }
    return {R, rho};
}

TwoPhasePolicy two_phase_policy(double I_tilde_0, double I_tilde_star, double t_max, double gamma, double R0,
                                double rho_max)
{
    if (!(I_tilde_0 > 0.0) || !(I_tilde_star > 0.0) || !(t_max > 0.0) || !(gamma > 0.0) || !(R0 > 0.0)) {
        throw ParameterError("two_phase_policy needs positive inputs");
    }
    if (!(rho_max >= 1.0)) {
        throw ParameterError("rho_max must be >= 1");
    }
    TwoPhasePolicy p;
    p.R_min = R0 / rho_max;
    p.rho_first = rho_max;
    p.rho_hold = R0;
    if (I_tilde_star >= I_tilde_0) {
        const auto c = optimal_constant_policy(I_tilde_0, I_tilde_star, t_max, gamma, R0);
        p.R_min = c.R_rho;
        p.rho_first = c.rho;
        p.rho_hold = c.rho;
        p.switch_time = t_max;
        return p;
    }
    if (!(p.R_min < 1.0)) {
        throw InfeasibleError("rho_max too small to reduce infections");
    }
    p.switch_time = std::log(I_tilde_0 / I_tilde_star) / (gamma * (1.0 - p.R_min));
    if (p.switch_time > t_max) {
        throw InfeasibleError("target not reachable within the horizon at rho_max");
    }
    return p;
}

} // namespace epictrl

#include "epictrl/control.hpp"
#include "epictrl/errors.hpp"
#include "epictrl/history.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace epictrl;

namespace {

HistoryBuffer constant_history(double value, double span = 200.0, double dt = 0.05)
{
    HistoryBuffer h(span);
    h.prefill(0.0, dt, value);
    h.push(0.0, value);
    return h;
}

// Samples f on [-span, 0] at step dt.
template <class F>
HistoryBuffer sampled_history(F f, double span, double dt)
{
    HistoryBuffer h(span);
    const long n = std::lround(span / dt);
    for (long k = -n; k <= 0; ++k) h.push(k * dt, f(k * dt));
    return h;
}

} // namespace

TEST(History, InterpolatesAndTrims)
{
    HistoryBuffer h(1.0);
    h.push(0.0, 0.0);
    h.push(0.5, 1.0);
    h.push(1.0, 3.0);
    EXPECT_DOUBLE_EQ(h.at(0.25), 0.5);
    EXPECT_DOUBLE_EQ(h.at(0.75), 2.0);
    EXPECT_DOUBLE_EQ(h.at(1.0), 3.0);
    EXPECT_THROW(h.at(1.1), InsufficientHistory);
    EXPECT_THROW(h.push(1.0, 4.0), ParameterError);
    for (int k = 3; k <= 10; ++k) h.push(0.5 * k, k);
    EXPECT_LE(h.front_time(), 5.0 - 1.0);
    EXPECT_NO_THROW(h.at(4.0));
    EXPECT_THROW(h.at(3.0), InsufficientHistory);
}

TEST(History, PrefillCoversSpan)
{
    HistoryBuffer h(12.5);
    h.prefill(10.0, 0.05, 7.0);
    EXPECT_LE(h.front_time(), 10.0 - 12.5);
    EXPECT_LT(h.back_time(), 10.0);
    EXPECT_DOUBLE_EQ(h.at(0.0), 7.0);
}

TEST(Kernels, Validation)
{
    EXPECT_THROW(validate(DelayKernel{DiracKernel{-1.0}}), ParameterError);
    EXPECT_THROW(validate(DelayKernel{ExponentialKernel{0.0}}), ParameterError);
    EXPECT_THROW(validate(DelayKernel{ShiftedExponentialKernel{1.0, -1.0}}), ParameterError);
    EXPECT_EQ(kernel_support(DelayKernel{ShiftedExponentialKernel{2.0, 0.5}}), 2.0 + kKernelTailCut / 0.5);
}

TEST(RateControl, Examples)
{
    const double lc = 4000.0;
    const auto flat = constant_history(lc);
    EXPECT_EQ(rate_control(flat, lc, DiracKernel{3.0}, 0.0), 1.0);
    const auto triple = constant_history(3 * lc);
    for (DelayKernel k : {DelayKernel{DiracKernel{5.0}}, DelayKernel{ExponentialKernel{0.2}},
                          DelayKernel{ShiftedExponentialKernel{4.0, 0.5}}}) {
        EXPECT_NEAR(rate_control(triple, lc, k, 0.0), 3.0, 1e-12);
    }
    auto h = sampled_history([](double t) { return t < -2.0 ? 5000.0 : 100.0; }, 10.0, 0.05);
    EXPECT_DOUBLE_EQ(rate_control(h, lc, DiracKernel{5.0}, 0.0), 1.25);
    EXPECT_DOUBLE_EQ(instantaneous_rate_control(h, lc, 5.0, 0.0), 1.25);
    EXPECT_EQ(instantaneous_rate_control(h, lc, 0.0, 0.0), 1.0);
    EXPECT_THROW(rate_control(h, lc, DiracKernel{20.0}, 0.0), InsufficientHistory);
    EXPECT_THROW(rate_control(h, 0.0, DiracKernel{1.0}, 0.0), ParameterError);
}

TEST(RateControl, ExponentialAverageMatchesClosedForm)
{
    // lambda(t) = e^{a t}: the kernel average is delta/(delta + a) up to the
    // truncated tail, renormalized.
    const double a = 0.05, delta = 0.4, dt = 0.01;
    const auto h = sampled_history([&](double t) { return std::exp(a * t); }, 40.0, dt);
    const double L = kKernelTailCut / delta;
    const double num = delta / (delta + a) * (1.0 - std::exp(-(delta + a) * L));
    const double den = 1.0 - std::exp(-delta * L);
    const double got = kernel_average(h, ExponentialKernel{delta}, 0.0);
    EXPECT_NEAR(got, num / den, 1e-5);
}

TEST(RateControl, DiracZeroEqualsInstantaneous)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1e4);
    HistoryBuffer h(5.0);
    for (int k = 0; k <= 200; ++k) h.push(0.05 * k, u(rng));
    for (double t : {5.0, 7.5, 10.0}) {
        EXPECT_EQ(rate_control(h, 2000.0, DiracKernel{0.0}, t), instantaneous_rate_control(h, 2000.0, 0.0, t));
    }
}

TEST(ControllerCurve, LinearAndPower)
{
    const auto c = ControllerCurve::linear(40000.0, 15.0);
    EXPECT_EQ(c(0.0), 1.0);
    EXPECT_EQ(c(40000.0), 15.0);
    EXPECT_EQ(c(20000.0), 8.0);
    EXPECT_EQ(c(1e6), 15.0);
    EXPECT_NEAR(c.inverse(6.0), 5.0 / 14.0 * 40000.0, 1e-9);
    EXPECT_DOUBLE_EQ(c.derivative(100.0), 14.0 / 40000.0);
    const auto p = ControllerCurve::power(100.0, 5.0, 2.0);
    EXPECT_DOUBLE_EQ(p(50.0), 2.0);
    EXPECT_NEAR(p.inverse(p(37.0)), 37.0, 1e-12);
    EXPECT_NEAR(p.derivative(50.0), (p(50.0 + 1e-6) - p(50.0 - 1e-6)) / 2e-6, 1e-6);
    EXPECT_THROW(ControllerCurve::linear(0.0, 15.0), ParameterError);
    EXPECT_THROW(ControllerCurve::linear(10.0, 1.0), ParameterError);
    EXPECT_THROW(c.inverse(16.0), ParameterError);
}

TEST(HtControl, Examples)
{
    const auto H = ControllerCurve::linear(40000.0, 15.0);
    const auto T = ControllerCurve::linear(20000.0, 15.0);
    auto d = ht_control(0.0, 0.0, H, T);
    EXPECT_EQ(d.rho, 1.0);
    EXPECT_EQ(d.driver, Driver::Idle);
    d = ht_control(20000.0, 0.0, H, T);
    EXPECT_EQ(d.rho, 8.0);
    EXPECT_EQ(d.driver, Driver::Hospital);
    d = ht_control(45000.0, 0.0, H, T);
    EXPECT_EQ(d.rho, 15.0);
    d = ht_control(20000.0, 10000.0, H, T); // tie
    EXPECT_EQ(d.rho, 8.0);
    EXPECT_EQ(d.driver, Driver::Icu);
}

TEST(HtControlProperty, MonotoneInEachOccupancy)
{
    const auto H = ControllerCurve::power(40000.0, 15.0, 1.5);
    const auto T = ControllerCurve::linear(20000.0, 12.0);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 60000.0);
    for (int k = 0; k < 2000; ++k) {
        const double h = u(rng), t = u(rng) / 2.0, dh = u(rng) / 10.0;
        const double base = ht_control(h, t, H, T).rho;
        EXPECT_GE(base, 1.0);
        EXPECT_GE(ht_control(h + dh, t, H, T).rho, base);
        EXPECT_GE(ht_control(h, t + dh, H, T).rho, base);
    }
}

TEST(TierTable, LevelsAndValidation)
{
    TierTable t;
    EXPECT_NO_THROW(t.validate());
    EXPECT_EQ(t.levels[t.level_for(0.0)], 1.0);
    EXPECT_EQ(t.levels[t.level_for(0.25)], 5.0);
    EXPECT_EQ(t.levels[t.level_for(0.01)], 2.0);
    EXPECT_EQ(t.levels[t.level_for(3.0)], 15.0);
    TierTable bad = t;
    bad.levels = {2, 3, 5, 12, 15, 20};
    EXPECT_THROW(bad.validate(), ParameterError);
    bad = t;
    bad.thresholds = {0.1, 0.05, 0.2, 0.4, 1.0};
    EXPECT_THROW(bad.validate(), ParameterError);
    bad = t;
    bad.thresholds.pop_back();
    EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(TieredControl, WeeklyEvaluationAndDwell)
{
    TierTable table;
    TierState s;
    // Week 0: high occupancy -> level 4 (rho 12).
    EXPECT_EQ(tiered_ht_control(0.5 * table.H_max, 0.0, table, s, 0.0).rho, 12.0);
    // Mid-week changes are ignored.
    EXPECT_EQ(tiered_ht_control(0.0, 0.0, table, s, 3.0).rho, 12.0);
    // Weeks 1 and 2: occupancy gone, but the 21-day dwell holds.
    EXPECT_EQ(tiered_ht_control(0.0, 0.0, table, s, 7.0).rho, 12.0);
    EXPECT_EQ(tiered_ht_control(0.0, 0.0, table, s, 14.0).rho, 12.0);
    // Week 3: may drop.
    EXPECT_EQ(tiered_ht_control(0.0, 0.0, table, s, 21.0).rho, 1.0);
    // Increases take effect at the next slot.
    EXPECT_EQ(tiered_ht_control(0.0, 0.25 * table.T_max, table, s, 25.0).rho, 1.0);
    const auto d = tiered_ht_control(0.0, 0.25 * table.T_max, table, s, 28.0);
    EXPECT_EQ(d.rho, 5.0);
    EXPECT_EQ(d.driver, Driver::Icu);
}

TEST(TieredControlProperty, NeverDropsWithinDwellOfIncrease)
{
    TierTable table;
    TierState s;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.2);
    double prev = 1.0, last_up = -1e9;
    for (int k = 0; k < 5000; ++k) {
        const double t = 0.05 * k;
        const double x = u(rng);
        const double rho = tiered_ht_control(x * table.H_max, 0.0, table, s, t).rho;
        if (rho > prev) last_up = t;
        if (rho < prev) EXPECT_GE(t - last_up, table.dwell_min - 1e-9);
        EXPECT_TRUE(std::find(table.levels.begin(), table.levels.end(), rho) != table.levels.end());
        prev = rho;
    }
}

TEST(Controller, PoliciesNeverGoBelowOne)
{
    HistoryBuffer h(1.0);
    h.prefill(0.0, 0.05, 10.0);
    h.push(0.0, 10.0);
    const std::vector<ControlPolicy> policies{NoControl{},
                                              ConstantControl{3.0},
                                              InstantaneousRateControl{4000.0, std::nullopt},
                                              DelayedRateControl{4000.0, DiracKernel{0.5}},
                                              HtControl{},
                                              TieredHtControl{}};
    for (const auto& p : policies) {
        Controller c(p, 0.05);
        EXPECT_GE(c.evaluate({0.0, 100.0, 50.0}, h).rho, 1.0);
    }
    EXPECT_THROW(Controller(ConstantControl{0.5}, 0.05), ParameterError);
    EXPECT_THROW(Controller(NoControl{}, 0.0), ParameterError);
}

TEST(Controller, InstantaneousWaitsUntilAboveTarget)
{
    HistoryBuffer h(1.0);
    h.prefill(0.0, 0.05, 3999.0);
    h.push(0.0, 3999.0);
    Controller c(InstantaneousRateControl{4000.0, std::nullopt}, 0.05);
    const auto d = c.evaluate({0.0, 0.0, 0.0}, h);
    EXPECT_EQ(d.rho, 1.0);
    EXPECT_EQ(d.driver, Driver::Idle);
    EXPECT_GE(c.history_span(), 0.05);
}

TEST(ConstantPolicy, Examples)
{
    auto c = optimal_constant_policy(100.0, 100.0, 365.0, 0.125, 6.0);
    EXPECT_DOUBLE_EQ(c.R_rho, 1.0);
    EXPECT_DOUBLE_EQ(c.rho, 6.0);
    c = optimal_constant_policy(100.0, 100.0 * std::exp(0.125 * 30.0), 30.0, 0.125, 6.0);
    EXPECT_NEAR(c.R_rho, 2.0, 1e-14);
    EXPECT_NEAR(c.rho, 3.0, 1e-13);
    EXPECT_THROW(optimal_constant_policy(100.0, 1e-30, 10.0, 0.125, 6.0), InfeasibleError);
    EXPECT_THROW(optimal_constant_policy(1.0, 1e30, 10.0, 0.125, 6.0), InfeasibleError);
}

TEST(ConstantPolicy, MeetsEndpointOnEdgeEquation)
{
    const double I0 = 5e4, Istar = 2e4, t_max = 200.0, gamma = 0.125, R0 = 6.0;
    const auto c = optimal_constant_policy(I0, Istar, t_max, gamma, R0);
    // Independent integration of dI/dt = gamma (R0 / rho - 1) I by RK4.
    double I = I0;
    const double k = gamma * (R0 / c.rho - 1.0);
    const double h = 0.01;
    for (int i = 0; i < 20000; ++i) {
        const double k1 = k * I, k2 = k * (I + 0.5 * h * k1), k3 = k * (I + 0.5 * h * k2), k4 = k * (I + h * k3);
        I += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    EXPECT_NEAR(I / Istar, 1.0, 1e-6);
}

TEST(TwoPhasePolicy, ReachesTargetThenHolds)
{
    const double I0 = 1e5, Istar = 1e4, gamma = 0.125, R0 = 6.0, rho_max = 15.0;
    const auto p = two_phase_policy(I0, Istar, 365.0, gamma, R0, rho_max);
    EXPECT_DOUBLE_EQ(p.R_min, R0 / rho_max);
    EXPECT_DOUBLE_EQ(p.rho_first, rho_max);
    EXPECT_DOUBLE_EQ(p.rho_hold, R0);
    EXPECT_NEAR(I0 * std::exp(gamma * (p.R_min - 1.0) * p.switch_time), Istar, 1e-6 * Istar);
}

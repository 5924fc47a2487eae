#include "epictrl/errors.hpp"
#include "epictrl/stability.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace epictrl;

namespace {

constexpr double kGamma = 1.0 / 8.0;

struct Setup {
    EpidemicParams params;
    PopulationDistribution dist;
    HtControl policy;
};

Setup italy_setup(double phi, double tau, double R0 = 6.0)
{
    auto dist = italy_like(60e6);
    EpidemicParams p;
    p.gamma = kGamma;
    p.phi = phi;
    p.tau = tau;
    p.sigma = {calibrate_sigma(R0, kGamma, dist), 0.0};
    p.pin_susceptibles = true;
    return {p, dist, HtControl{ControllerCurve::linear(40000.0, 15.0), ControllerCurve::linear(20000.0, 15.0)}};
}

} // namespace

TEST(CriticalDelay, Dirac)
{
    EXPECT_NEAR(critical_delay_dirac(1.0), 1.5708, 1e-4);
    EXPECT_NEAR(critical_delay_dirac(kGamma), 4.0 * std::numbers::pi, 1e-12);
    EXPECT_THROW(critical_delay_dirac(0.0), ParameterError);
}

TEST(CriticalDelay, DiracRootIsImaginaryAtTheBoundary)
{
    const double d = critical_delay_dirac(kGamma);
    const auto s = dominant_root({kGamma, DiracKernel{d}});
    EXPECT_NEAR(s.real(), 0.0, 1e-6);
    EXPECT_NEAR(s.imag(), kGamma, 1e-6);
    EXPECT_LT(dominant_root({kGamma, DiracKernel{0.9 * d}}).real(), 0.0);
    EXPECT_GT(dominant_root({kGamma, DiracKernel{1.1 * d}}).real(), 0.0);
}

TEST(CriticalDelay, ShiftedExponentialRootOnAxis)
{
    for (double delta : {0.01, 0.125, 1.0, 10.0}) {
        const auto c = critical_delay_shifted_exp(kGamma, delta);
        const CharacteristicProblem p{kGamma, ShiftedExponentialKernel{c.d, delta}};
        EXPECT_LT(std::abs(characteristic_function(p, {0.0, c.omega})), 1e-12) << delta;
    }
}

TEST(CriticalDelay, ShiftedExponentialMonotoneAndBounded)
{
    double prev = 0.0;
    for (int k = 0; k <= 40; ++k) {
        const double delta = kGamma * std::pow(10.0, -3.0 + 6.0 * k / 40.0);
        const double d = critical_delay_shifted_exp(kGamma, delta).d;
        EXPECT_GT(d, prev);
        EXPECT_GE(d * kGamma, 1.0 - 1e-12);
        EXPECT_LE(d, critical_delay_dirac(kGamma) * (1.0 + 1e-12));
        prev = d;
    }
}

TEST(DominantRoot, ExponentialMatchesQuadratic)
{
    for (double delta : {1e-3, 0.05, 0.5, 0.125 * 4, 100.0}) {
        const double disc = delta * delta - 4.0 * kGamma * delta;
        std::complex<double> expect;
        if (disc >= 0.0) {
            expect = {(-delta + std::sqrt(disc)) / 2.0, 0.0};
        } else {
            expect = {-delta / 2.0, std::sqrt(-disc) / 2.0};
        }
        const auto s = dominant_root({kGamma, ExponentialKernel{delta}});
        EXPECT_NEAR(s.real(), expect.real(), 1e-10) << delta;
        EXPECT_NEAR(s.imag(), expect.imag(), 1e-10) << delta;
        EXPECT_LT(s.real(), 0.0);
    }
}

TEST(DominantRoot, InstantaneousControlDecaysAtGamma)
{
    const auto s = dominant_root({kGamma, DiracKernel{0.0}});
    EXPECT_NEAR(s.real(), -kGamma, 1e-10);
    EXPECT_NEAR(s.imag(), 0.0, 1e-10);
}

TEST(DominantRoot, HtChainBoundaryFrequency)
{
    const double phi = 0.1, tau = 0.05;
    HtChain h;
    h.phi = phi;
    h.tau = tau;
    h.R0 = 6.0;
    h.alpha = 1.0;
    h.x_star = (phi + tau) * h.R0 / kGamma; // K = phi + tau
    const auto s = dominant_root({kGamma, h});
    EXPECT_NEAR(s.real(), 0.0, 1e-10);
    EXPECT_NEAR(s.imag(), std::sqrt(phi * tau), 1e-10);
    h.active = ActiveConstraint::Hospital;
    EXPECT_LT(dominant_root({kGamma, h}).real(), 0.0);
}

TEST(Equilibrium, HtExamples)
{
    const auto s = italy_setup(1.0 / 16.0, 1.0 / 16.0);
    EXPECT_NEAR(s.policy.rho_T.inverse(6.0), 5.0 / 14.0 * 20000.0, 1e-9);
    const auto eq = ht_equilibrium(s.params, 6.0, s.policy.rho_H, s.policy.rho_T, s.dist);
    if (eq.active == ActiveConstraint::Icu) {
        EXPECT_NEAR(eq.T_star, 5.0 / 14.0 * 20000.0, 1e-6);
        EXPECT_LE(eq.H_star, 5.0 / 14.0 * 40000.0 * (1.0 + 1e-12));
    } else {
        EXPECT_NEAR(eq.H_star, 5.0 / 14.0 * 40000.0, 1e-6);
        EXPECT_LE(eq.T_star, 5.0 / 14.0 * 20000.0 * (1.0 + 1e-12));
    }
    double I = 0.0, H = 0.0, T = 0.0;
    for (std::size_t c = 0; c < s.dist.size(); ++c) {
        I += eq.I[c];
        H += eq.H[c];
        T += eq.T[c];
    }
    EXPECT_NEAR(H, eq.H_star, 1e-9 * eq.H_star);
    EXPECT_NEAR(T, eq.T_star, 1e-9 * eq.T_star);
    EXPECT_NEAR(I, eq.I_star, 1e-9 * eq.I_star);
}

TEST(Equilibrium, RateControl)
{
    const auto s = italy_setup(1.0 / 16.0, 1.0 / 16.0);
    const auto eq = rate_equilibrium(s.params, 4000.0, s.dist);
    EXPECT_NEAR(eq.I_star, 32000.0, 1e-8);
    EXPECT_THROW(rate_equilibrium(s.params, 0.0, s.dist), ParameterError);
}

TEST(Equilibrium, InfeasibleWhenR0ExceedsRhoMax)
{
    const auto s = italy_setup(1.0 / 16.0, 1.0 / 16.0, 20.0);
    EXPECT_THROW(ht_equilibrium(s.params, 20.0, s.policy.rho_H, s.policy.rho_T, s.dist), InfeasibleError);
    EXPECT_THROW(ht_equilibrium(s.params, 0.5, s.policy.rho_H, s.policy.rho_T, s.dist), InfeasibleError);
}

TEST(Equilibrium, IsAFixedPointOfTheDynamics)
{
    const auto s = italy_setup(1.0 / 16.0, 1.0 / 16.0);
    const EpidemicModel model(s.dist, s.params);
    const auto eq = ht_equilibrium(s.params, 6.0, s.policy.rho_H, s.policy.rho_T, s.dist);
    auto y = equilibrium_state(model, eq);
    // Large-population limit: susceptibles at their full class size.
    for (std::size_t c = 0; c < model.classes(); ++c) y(Field::S, c) = s.dist.N() * s.dist[c].fraction;
    const auto dy = model.derivative(y, 6.0);
    double norm = 0.0;
    for (Field f : {Field::I1, Field::H1, Field::T1}) {
        for (double v : dy.field(f)) norm += v * v;
    }
    EXPECT_LT(std::sqrt(norm), 1e-8 * s.dist.N());
    EXPECT_GT(eq.I_star, 0.0);
}

TEST(StabilityCheck, Cases)
{
    EXPECT_TRUE(ht_stability_check(1e-3, 1e-3, kGamma, 1e6, 1.0, 6.0, ActiveConstraint::Hospital));
    // Linear curve: T* alpha = R0 - 1, so the boundary is gamma (R0 - 1) / R0.
    const double bound = kGamma * 5.0 / 6.0;
    const double T_star = 20000.0 * 5.0 / 14.0, alpha = 14.0 / 20000.0;
    EXPECT_TRUE(ht_stability_check(bound / 2, bound / 2, kGamma, T_star, alpha, 6.0, ActiveConstraint::Icu));
    EXPECT_FALSE(ht_stability_check(0.999 * bound / 2, bound / 2, kGamma, T_star, alpha, 6.0,
                                    ActiveConstraint::Icu));
    EXPECT_TRUE(ht_stability_check(1.0 / 10.0, 1.0 / 20.0, kGamma, T_star, alpha, 6.0, ActiveConstraint::Icu));
    EXPECT_FALSE(ht_stability_check(1.0 / 16.0, 1.0 / 40.0, kGamma, T_star, alpha, 6.0, ActiveConstraint::Icu));
}

TEST(StabilityCheckProperty, AgreesWithDominantRoot)
{
    for (double phi : {0.02, 0.05, 0.0625, 0.1, 0.2}) {
        for (double tau : {0.02, 0.025, 0.05, 0.0625, 0.1}) {
            const auto s = italy_setup(phi, tau);
            const auto eq = ht_equilibrium(s.params, 6.0, s.policy.rho_H, s.policy.rho_T, s.dist);
            const auto h = ht_chain(s.params, 6.0, eq, s.policy.rho_H, s.policy.rho_T);
            const double re = dominant_root({kGamma, h}).real();
            const bool stable = ht_stability_check(phi, tau, kGamma, eq.T_star, h.alpha, 6.0, eq.active);
            if (std::abs(re) < 1e-9) continue;
            EXPECT_EQ(stable, re < 0.0) << phi << " " << tau;
        }
    }
}

TEST(StabilityCheckProperty, TransitionInEffectiveReproduction)
{
    // With the linear ICU curve the loop is stable iff R < gamma / (gamma - phi - tau).
    const double phi = 0.05, tau = 0.05;
    const double R_crit = kGamma / (kGamma - phi - tau);
    for (double R : {0.8 * R_crit, 0.95 * R_crit, 1.05 * R_crit, 1.5 * R_crit, 3.0 * R_crit}) {
        HtChain h;
        h.phi = phi;
        h.tau = tau;
        h.R0 = R;
        h.alpha = 14.0 / 20000.0;
        h.x_star = (R - 1.0) / h.alpha;
        EXPECT_EQ(dominant_root({kGamma, h}).real() < 0.0, R < R_crit) << R;
    }
}

TEST(IcuSizing, Examples)
{
    const auto d = italy_like(60e6);
    EXPECT_TRUE(icu_sizing_check(20000.0, 40000.0, d, 1.0 / 16.0, 1.0 / 16.0));
    EXPECT_FALSE(icu_sizing_check(13000.0, 40000.0, d, 1.0 / 16.0, 1.0 / 16.0));
    PopulationDistribution certain({{5.0, 1.0, 1.0}}, 100.0);
    EXPECT_TRUE(icu_sizing_check(40001.0, 40000.0, certain, 0.1, 0.1));
    EXPECT_FALSE(icu_sizing_check(39999.0, 40000.0, certain, 0.1, 0.1));
}

TEST(Oscillation, Classification)
{
    std::vector<double> t, grow, decay;
    for (int k = 0; k < 4000; ++k) {
        const double x = 0.1 * k;
        t.push_back(x);
        grow.push_back(100.0 + std::exp(0.01 * x) * std::sin(x));
        decay.push_back(100.0 + std::exp(-0.01 * x) * std::sin(x));
    }
    const auto g = classify_oscillation(t, grow, 100.0);
    const auto d = classify_oscillation(t, decay, 100.0);
    EXPECT_EQ(g.outcome, ProbeOutcome::Growing);
    EXPECT_EQ(d.outcome, ProbeOutcome::Decaying);
    EXPECT_NEAR(g.period, 2.0 * std::numbers::pi, 0.05);
    EXPECT_NEAR(std::log(d.extrema_ratio), -0.01 * std::numbers::pi, 1e-3);
    const auto f = classify_oscillation(t, std::vector<double>(t.size(), 100.0), 100.0);
    EXPECT_EQ(f.outcome, ProbeOutcome::Flat);
}

class Probe : public ::testing::Test {
protected:
    static ProbeSetup make(double perturbation, double horizon)
    {
        const auto s = italy_setup(1.0 / 16.0, 1.0 / 16.0);
        const EpidemicModel model(s.dist, s.params);
        const auto eq = ht_equilibrium(s.params, 6.0, s.policy.rho_H, s.policy.rho_T, s.dist);
        auto y = equilibrium_state(model, eq);
        for (std::size_t c = 0; c < model.classes(); ++c) y(Field::S, c) = s.dist.N() * s.dist[c].fraction;
        ProbeSetup ps{model, y, s.policy};
        ps.baseline = eq.I_tilde_star;
        ps.perturbation = perturbation;
        ps.horizon_days = horizon;
        ps.initial_lambda = model.uncontrolled_rate(y);
        return ps;
    }
};

TEST_F(Probe, UnperturbedEquilibriumIsFlat)
{
    const auto r = empirical_stability_probe(make(0.0, 50.0));
    EXPECT_EQ(r.outcome, ProbeOutcome::Flat);
    EXPECT_TRUE(r.warning.empty());
}

TEST_F(Probe, LargePerturbationWarns)
{
    const auto r = empirical_stability_probe(make(0.05, 20.0));
    EXPECT_FALSE(r.warning.empty());
    EXPECT_TRUE(empirical_stability_probe(make(0.01, 20.0)).warning.empty());
}

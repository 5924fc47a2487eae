#include "epictrl/errors.hpp"
#include "epictrl/runner.hpp"
#include "epictrl/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace epictrl;

namespace {

ScenarioConfig small_config()
{
    ScenarioConfig c;
    c.name = "small";
    c.population.source = "classes";
    c.population.N = 1e6;
    c.population.classes = {{3.0, 0.001, 0.5}, {10.0, 0.01, 0.3}, {20.0, 0.05, 0.2}};
    c.strains = {StrainConfig{4.0, 0.0, 10.0}};
    c.control.kind = "ht";
    c.control.H_max = 2000.0;
    c.control.T_max = 1000.0;
    c.run.horizon_days = 200.0;
    return c;
}

} // namespace

TEST(Presets, ReferenceValues)
{
    const auto c = presets::reference();
    EXPECT_EQ(c.population.N, 60e6);
    EXPECT_DOUBLE_EQ(c.epidemic.gamma_per_day, 1.0 / 8.0);
    EXPECT_DOUBLE_EQ(c.epidemic.phi_per_day, 1.0 / 16.0);
    EXPECT_DOUBLE_EQ(c.epidemic.tau_per_day, 1.0 / 16.0);
    EXPECT_EQ(c.epidemic.theta, 10.0);
    EXPECT_EQ(c.epidemic.T_hat, 20000.0);
    EXPECT_EQ(c.epidemic.q21, 5.0);
    EXPECT_EQ(c.epidemic.q_post, 20.0);
    ASSERT_EQ(c.strains.size(), 2u);
    EXPECT_EQ(c.strains[0].R0, 6.0);
    EXPECT_EQ(c.strains[1].R0, 12.0);
    EXPECT_EQ(c.strains[1].seed_day, 730.0);
    EXPECT_EQ(c.control.H_max, 40000.0);
    EXPECT_EQ(c.control.T_max, 20000.0);
    EXPECT_EQ(c.control.rho_max, 15.0);
    EXPECT_EQ(c.vax.delta_days, 21.0);
    EXPECT_EQ(c.vax.novax_count, 6e6);
    EXPECT_EQ(c.run.horizon_days, 1095.0);
    const auto plan = make_vaccination(c.vax);
    ASSERT_TRUE(plan.has_value());
    EXPECT_DOUBLE_EQ(plan->rate(60e6), 60e6 / 249.0);
    EXPECT_NEAR(plan->ve1()[0], 0.54, 1e-15);
    for (const auto& name : presets::names()) EXPECT_NO_THROW(validate(presets::by_name(name))) << name;
    EXPECT_THROW(presets::by_name("nope"), SchemaError);
}

TEST(ScenarioJson, RoundTripIsExact)
{
    for (const auto& name : presets::names()) {
        const auto c = presets::by_name(name);
        const auto text = scenario_to_json(c);
        const auto back = scenario_from_json(text);
        EXPECT_EQ(back, c) << name;
        EXPECT_EQ(scenario_to_json(back), text) << name;
    }
    auto c = small_config();
    c.epidemic.gamma_per_day = 0.1 + 1e-17 * 3.0; // not a short decimal
    c.control.epsilon_days = 0.05;
    EXPECT_EQ(scenario_from_json(scenario_to_json(c)), c);
}

TEST(ScenarioJson, SchemaErrors)
{
    EXPECT_THROW(scenario_from_json(R"({"nmae": "x"})"), SchemaError);
    EXPECT_THROW(scenario_from_json(R"({"control": {"kind": "ht", "hmax": 1}})"), SchemaError);
    EXPECT_THROW(scenario_from_json(R"({"run": {"horizon_days": "long"}})"), SchemaError);
    EXPECT_THROW(scenario_from_json("{not json"), SchemaError);
    EXPECT_THROW(scenario_from_json(R"({"control": {"kind": "psychic"}})"), SchemaError);
}

TEST(ScenarioValidate, SeedDayInsideHorizon)
{
    auto c = small_config();
    c.strains[0].seed_day = c.run.horizon_days;
    EXPECT_THROW(validate(c), SchemaError);
    c.strains[0].seed_day = -1.0;
    EXPECT_THROW(validate(c), SchemaError);
    c = small_config();
    c.run.dt_days = 0.0;
    EXPECT_THROW(validate(c), SchemaError);
}

TEST(Runner, Deterministic)
{
    const auto c = small_config();
    const auto a = run_scenario(c);
    const auto b = run_scenario(c);
    EXPECT_EQ(trajectory_csv(a), trajectory_csv(b));
    EXPECT_EQ(summary_json(a), summary_json(b));
    EXPECT_FALSE(a.summary.fault);
    EXPECT_NEAR(a.summary.final_mass, 1e6, 1e-6);
}

TEST(Runner, ActivityIntervalsPartitionTheHorizon)
{
    const auto out = run_scenario(small_config());
    ASSERT_FALSE(out.activity.empty());
    EXPECT_DOUBLE_EQ(out.activity.front().start, 0.0);
    EXPECT_NEAR(out.activity.back().end, 200.0, 1e-9);
    for (std::size_t i = 1; i < out.activity.size(); ++i) {
        EXPECT_DOUBLE_EQ(out.activity[i].start, out.activity[i - 1].end);
        EXPECT_NE(out.activity[i].driver, out.activity[i - 1].driver);
    }
    bool hospital_or_icu = false;
    for (const auto& a : out.activity) hospital_or_icu |= a.driver == Driver::Hospital || a.driver == Driver::Icu;
    EXPECT_TRUE(hospital_or_icu);
}

TEST(Runner, DiseaseFreeRunIsFlat)
{
    auto c = small_config();
    c.strains[0].seed_count = 0.0;
    const auto out = run_scenario(c);
    EXPECT_EQ(out.summary.econ, 0.0);
    EXPECT_EQ(out.summary.deaths, 0.0);
    for (const auto& row : out.rows) {
        EXPECT_EQ(row.a.I, 0.0);
        EXPECT_EQ(row.a.rho, 1.0);
        EXPECT_DOUBLE_EQ(row.a.S, 1e6);
    }
}

TEST(Runner, OutputInterval)
{
    auto c = small_config();
    c.run.output_interval_days = 10.0;
    const auto out = run_scenario(c);
    ASSERT_EQ(out.rows.size(), 21u);
    EXPECT_NEAR(out.rows[3].a.t, 30.0, 1e-9);
}

TEST(Sweep, ParseValues)
{
    const auto v = parse_sweep_values("lambda_C", "1000,2000.5");
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[1].value, 2000.5);
    EXPECT_FALSE(v[1].paired);
    const auto pairs = parse_sweep_values(
        "tmax_hmax", "10000:20000,10000:40000,20000:40000,20000:80000,40000:80000,40000:160000");
    ASSERT_EQ(pairs.size(), 6u);
    EXPECT_TRUE(pairs[5].paired);
    EXPECT_EQ(pairs[5].value, 40000.0);
    EXPECT_EQ(pairs[5].value2, 160000.0);
    EXPECT_THROW(parse_sweep_values("lambda_C", ""), Error);
    EXPECT_THROW(parse_sweep_values("tmax_hmax", "10000"), Error);
    EXPECT_THROW(parse_sweep_values("lambda_C", "abc"), Error);
}

TEST(Sweep, ApplyValue)
{
    auto c = presets::ht_table();
    const auto t = apply_sweep_value(c, "tmax_hmax", {5000.0, 7000.0, true});
    EXPECT_EQ(t.control.T_max, 5000.0);
    EXPECT_EQ(t.control.H_max, 7000.0);
    EXPECT_EQ(apply_sweep_value(c, "alpha", {3.0}).costs.alpha, 3.0);
    EXPECT_EQ(apply_sweep_value(presets::reference(), "Delta", {42.0}).vax.delta_days, 42.0);
}

TEST(Compare, SingleClassCollapse)
{
    PopulationDistribution one({{7.0, 0.02, 1.0}}, 1e6);
    const auto c1 = single_class_collapse(one);
    ASSERT_EQ(c1.size(), 1u);
    EXPECT_EQ(c1[0], one[0]);

    auto cfg = small_config();
    cfg.population.classes = {{7.0, 0.02, 1.0}};
    const auto pair = compare_single_vs_multi(cfg);
    EXPECT_EQ(trajectory_csv(pair.multi), trajectory_csv(pair.single));
}

TEST(Compare, HeterogeneityLowersDeathsAtEqualSeverity)
{
    // Same p everywhere: deaths follow the attack size, which contact
    // heterogeneity reduces at equal R0.
    auto cfg = small_config();
    cfg.population.classes = {{3.0, 0.01, 0.5}, {10.0, 0.01, 0.3}, {20.0, 0.01, 0.2}};
    cfg.control.kind = "none";
    cfg.strains[0].R0 = 2.0;
    cfg.run.horizon_days = 400.0;
    const auto pair = compare_single_vs_multi(cfg);
    EXPECT_GT(pair.single.summary.deaths, pair.multi.summary.deaths);
    const auto text = compare_csv(pair);
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "t,I_multi,I_single,H_multi,H_single,T_multi,T_single,D_multi,D_single,rho_multi,rho_single");
}

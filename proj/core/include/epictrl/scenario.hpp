#pragma once

#include "epictrl/control.hpp"
#include "epictrl/epidemic.hpp"
#include "epictrl/population.hpp"
#include "epictrl/simulation.hpp"
#include "epictrl/vaccination.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epictrl {

struct PopulationConfig {
    std::string source = "italy_like"; // italy_like | tables | distribution | classes
    double N = 60e6;
    std::string contacts_csv;
    std::string cfr_csv;
    std::string distribution_csv;
    std::vector<RiskClass> classes;
    bool operator==(const PopulationConfig&) const = default;
};

struct EpidemicConfig {
    double gamma_per_day = 1.0 / 8.0;
    double phi_per_day = 1.0 / 16.0;
    double tau_per_day = 1.0 / 16.0;
    double mu_per_day = 0.0;
    double theta = 10.0;
    double T_hat = 20000.0;
    double H_hat = 50000.0;
    /// When set, T_hat is overwritten by control.T_max.
    bool T_hat_tracks_T_max = false;
    double q21 = 5.0;
    double q_post = 20.0;
    SeverityExponents exponents{};
    bool pin_susceptibles = false;
    bool operator==(const EpidemicConfig&) const = default;
};

struct StrainConfig {
    double R0 = 6.0;
    double seed_day = 0.0;
    double seed_count = 1.0;
    bool operator==(const StrainConfig&) const = default;
};

struct ControlConfig {
    std::string kind = "ht"; // none | constant | rate | rate_delayed | ht | tiered
    double lambda_C = 4000.0;
    std::optional<double> epsilon_days;
    std::string kernel = "dirac"; // dirac | exp | shifted
    double kernel_d_days = 0.0;
    double kernel_delta_per_day = 1.0;
    double H_max = 40000.0;
    double T_max = 20000.0;
    double rho_max = 15.0;
    double curve_exponent = 1.0;
    double rho = 1.0; // constant kind
    std::vector<double> tier_levels{1, 2, 3, 5, 12, 15};
    std::vector<double> tier_thresholds{0.01, 0.1, 0.2, 0.4, 1.0};
    double tier_dwell_days = 21.0;
    double tier_period_days = 7.0;
    bool operator==(const ControlConfig&) const = default;
};

struct VaxConfig {
    bool enabled = false;
    std::string policy = "mvf";
    double delta_days = 21.0;
    double Tv_days = 270.0;
    double xi_per_day = 0.0; // 0 derives N / (Tv - delta)
    double ve1_ratio = 0.6;
    double ve2 = 0.9;
    double ve2_strain2 = 0.7;
    double novax_count = 0.0;
    double start_day = 365.0;
    bool operator==(const VaxConfig&) const = default;
};

struct RunConfig {
    double horizon_days = 365.0;
    double dt_days = 0.05;
    double output_interval_days = 1.0;
    std::string initial = "seed"; // seed | rate_equilibrium | ht_equilibrium
    bool operator==(const RunConfig&) const = default;
};

struct CostConfig {
    double alpha = 2.0;
    std::vector<double> kappa;
    bool operator==(const CostConfig&) const = default;
};

struct ScenarioConfig {
    std::string name = "custom";
    PopulationConfig population;
    EpidemicConfig epidemic;
    std::vector<StrainConfig> strains{StrainConfig{}};
    ControlConfig control;
    VaxConfig vax;
    RunConfig run;
    CostConfig costs;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Throws SchemaError on unknown keys, wrong types or invalid values.
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Reads a config file; relative CSV paths resolve against its directory.
ScenarioConfig load_scenario(const std::string& path);

/// Range and consistency checks beyond the schema. Throws SchemaError.
void validate(const ScenarioConfig& cfg);

namespace presets {
/// Three-year reference: two strains, MVF vaccination from year 1, HT
/// control.
ScenarioConfig reference();
/// Reference with instantaneous rate control at lambda_C = 4000.
ScenarioConfig reference_rate();
/// Reference with tiered (alert level) HT control.
ScenarioConfig tiered();
/// One-year single-strain HT run for the (T_max, H_max) study.
ScenarioConfig ht_table(double T_max = 10000.0, double H_max = 20000.0);
/// Two-year single-strain run from the rate-control equilibrium with
/// vaccination from day 365.
ScenarioConfig vaccination_study();

std::vector<std::string> names();
ScenarioConfig by_name(const std::string& name);
} // namespace presets

PopulationDistribution make_population(const PopulationConfig& cfg);
/// One class with the mean contact rate and mean death probability.
PopulationDistribution single_class_collapse(const PopulationDistribution& dist);

ControlPolicy make_policy(const ControlConfig& cfg);
std::optional<VaccinationPlan> make_vaccination(const VaxConfig& cfg);

/// Everything a Simulation needs, derived from a config.
struct BuiltScenario {
    EpidemicModel model;
    EpidemicState initial;
    ControlPolicy policy;
    std::optional<VaccinationPlan> vaccination;
    std::vector<StrainSeed> seeds;
    SimulationOptions options;
    double horizon_days = 0.0;
};

BuiltScenario build_scenario(const ScenarioConfig& cfg);
BuiltScenario build_scenario(const ScenarioConfig& cfg, const PopulationDistribution& dist);

} // namespace epictrl

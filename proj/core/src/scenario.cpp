#include "epictrl/scenario.hpp"

#include "epictrl/errors.hpp"
#include "epictrl/stability.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace epictrl {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kYear = 365.0;

class Section {
public:
    Section(const json& j, std::string name, std::set<std::string> allowed)
        : j_(j)
        , name_(std::move(name))
    {
        if (!j_.is_object()) {
            throw SchemaError("section '" + name_ + "' must be an object");
        }
        for (const auto& [key, value] : j_.items()) {
            if (!allowed.count(key)) {
                throw SchemaError("unknown key '" + name_ + "." + key + "'");
            }
        }
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json& at(const char* key) const { return j_.at(key); }

    void number(const char* key, double& out) const
    {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw SchemaError("'" + name_ + "." + key + "' must be a number");
        out = v.get<double>();
    }
    void number(const char* key, std::optional<double>& out) const
    {
        if (!j_.contains(key)) return;
        if (j_.at(key).is_null()) {
            out.reset();
            return;
        }
        double v = 0.0;
        number(key, v);
        out = v;
    }
    void boolean(const char* key, bool& out) const
    {
        if (!has(key)) return;
        if (!j_.at(key).is_boolean()) throw SchemaError("'" + name_ + "." + key + "' must be a boolean");
        out = j_.at(key).get<bool>();
    }
    void string(const char* key, std::string& out) const
    {
        if (!has(key)) return;
        if (!j_.at(key).is_string()) throw SchemaError("'" + name_ + "." + key + "' must be a string");
        out = j_.at(key).get<std::string>();
    }
    void numbers(const char* key, std::vector<double>& out) const
    {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_array()) throw SchemaError("'" + name_ + "." + key + "' must be an array");
        out.clear();
        for (const auto& x : v) {
            if (!x.is_number()) throw SchemaError("'" + name_ + "." + key + "' must hold numbers");
            out.push_back(x.get<double>());
        }
    }
    Section sub(const char* key, std::set<std::string> allowed) const
    {
        return Section(j_.at(key), name_ + "." + key, std::move(allowed));
    }

private:
    const json& j_;
    std::string name_;
};

void read_population(const Section& s, PopulationConfig& p)
{
    s.string("source", p.source);
    s.number("N", p.N);
    s.string("contacts_csv", p.contacts_csv);
    s.string("cfr_csv", p.cfr_csv);
    s.string("distribution_csv", p.distribution_csv);
    if (s.has("classes")) {
        const auto& arr = s.at("classes");
        if (!arr.is_array()) throw SchemaError("'population.classes' must be an array");
        p.classes.clear();
        for (const auto& c : arr) {
            Section cs(c, "population.classes[]", {"r", "p", "fraction"});
            RiskClass rc;
            cs.number("r", rc.r);
            cs.number("p", rc.p);
            cs.number("fraction", rc.fraction);
            p.classes.push_back(rc);
        }
    }
}

void read_epidemic(const Section& s, EpidemicConfig& e)
{
    s.number("gamma_per_day", e.gamma_per_day);
    s.number("phi_per_day", e.phi_per_day);
    s.number("tau_per_day", e.tau_per_day);
    s.number("mu_per_day", e.mu_per_day);
    s.number("theta", e.theta);
    s.number("T_hat", e.T_hat);
    s.number("H_hat", e.H_hat);
    s.boolean("T_hat_tracks_T_max", e.T_hat_tracks_T_max);
    s.number("q21", e.q21);
    s.number("q_post", e.q_post);
    s.boolean("pin_susceptibles", e.pin_susceptibles);
    if (s.has("severity_exponents")) {
        std::vector<double> v;
        s.numbers("severity_exponents", v);
        if (v.size() != 3) throw SchemaError("'epidemic.severity_exponents' needs three values");
        e.exponents = {v[0], v[1], v[2]};
    }
}

void read_control(const Section& s, ControlConfig& c)
{
    s.string("kind", c.kind);
    s.number("lambda_C", c.lambda_C);
    s.number("epsilon_days", c.epsilon_days);
    if (s.has("kernel")) {
        const auto k = s.sub("kernel", {"type", "d_days", "delta_per_day"});
        k.string("type", c.kernel);
        k.number("d_days", c.kernel_d_days);
        k.number("delta_per_day", c.kernel_delta_per_day);
    }
    s.number("H_max", c.H_max);
    s.number("T_max", c.T_max);
    s.number("rho_max", c.rho_max);
    s.number("curve_exponent", c.curve_exponent);
    s.number("rho", c.rho);
    if (s.has("tiers")) {
        const auto t = s.sub("tiers", {"levels", "thresholds", "dwell_days", "period_days"});
        t.numbers("levels", c.tier_levels);
        t.numbers("thresholds", c.tier_thresholds);
        t.number("dwell_days", c.tier_dwell_days);
        t.number("period_days", c.tier_period_days);
    }
}

void read_vax(const Section& s, VaxConfig& v)
{
    s.boolean("enabled", v.enabled);
    s.string("policy", v.policy);
    s.number("delta_days", v.delta_days);
    s.number("Tv_days", v.Tv_days);
    s.number("xi_per_day", v.xi_per_day);
    s.number("ve1_ratio", v.ve1_ratio);
    s.number("ve2", v.ve2);
    s.number("ve2_strain2", v.ve2_strain2);
    s.number("novax_count", v.novax_count);
    s.number("start_day", v.start_day);
}

ordered_json kernel_json(const ControlConfig& c)
{
    ordered_json k;
    k["type"] = c.kernel;
    k["d_days"] = c.kernel_d_days;
    k["delta_per_day"] = c.kernel_delta_per_day;
    return k;
}

} // namespace

ScenarioConfig scenario_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("config is not valid JSON: ") + e.what());
    }
    const Section root(j, "config",
                       {"name", "population", "epidemic", "strains", "control", "vax", "run", "costs"});
    ScenarioConfig cfg;
    root.string("name", cfg.name);
    if (root.has("population")) {
        read_population(root.sub("population", {"source", "N", "contacts_csv", "cfr_csv", "distribution_csv",
                                                "classes"}),
                        cfg.population);
    }
    if (root.has("epidemic")) {
        read_epidemic(root.sub("epidemic", {"gamma_per_day", "phi_per_day", "tau_per_day", "mu_per_day", "theta",
                                            "T_hat", "H_hat", "T_hat_tracks_T_max", "q21", "q_post",
                                            "severity_exponents", "pin_susceptibles"}),
                      cfg.epidemic);
    }
    if (root.has("strains")) {
        const auto& arr = root.at("strains");
        if (!arr.is_array()) throw SchemaError("'strains' must be an array");
        cfg.strains.clear();
        for (const auto& s : arr) {
            Section ss(s, "strains[]", {"R0", "seed_day", "seed_count"});
            StrainConfig sc;
            ss.number("R0", sc.R0);
            ss.number("seed_day", sc.seed_day);
            ss.number("seed_count", sc.seed_count);
            cfg.strains.push_back(sc);
        }
    }
    if (root.has("control")) {
        read_control(root.sub("control", {"kind", "lambda_C", "epsilon_days", "kernel", "H_max", "T_max", "rho_max",
                                          "curve_exponent", "rho", "tiers"}),
                     cfg.control);
    }
    if (root.has("vax")) {
        read_vax(root.sub("vax", {"enabled", "policy", "delta_days", "Tv_days", "xi_per_day", "ve1_ratio", "ve2",
                                  "ve2_strain2", "novax_count", "start_day"}),
                 cfg.vax);
    }
    if (root.has("run")) {
        const auto r = root.sub("run", {"horizon_days", "dt_days", "output_interval_days", "initial"});
        r.number("horizon_days", cfg.run.horizon_days);
        r.number("dt_days", cfg.run.dt_days);
        r.number("output_interval_days", cfg.run.output_interval_days);
        r.string("initial", cfg.run.initial);
    }
    if (root.has("costs")) {
        const auto c = root.sub("costs", {"alpha", "kappa"});
        c.number("alpha", cfg.costs.alpha);
        c.numbers("kappa", cfg.costs.kappa);
    }
    validate(cfg);
    return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg)
{
    ordered_json j;
    j["name"] = cfg.name;

    auto& p = j["population"];
    p["source"] = cfg.population.source;
    p["N"] = cfg.population.N;
    p["contacts_csv"] = cfg.population.contacts_csv;
    p["cfr_csv"] = cfg.population.cfr_csv;
    p["distribution_csv"] = cfg.population.distribution_csv;
    p["classes"] = ordered_json::array();
    for (const auto& c : cfg.population.classes) {
        p["classes"].push_back({{"r", c.r}, {"p", c.p}, {"fraction", c.fraction}});
    }

    const auto& E = cfg.epidemic;
    auto& e = j["epidemic"];
    e["gamma_per_day"] = E.gamma_per_day;
    e["phi_per_day"] = E.phi_per_day;
    e["tau_per_day"] = E.tau_per_day;
    e["mu_per_day"] = E.mu_per_day;
    e["theta"] = E.theta;
    e["T_hat"] = E.T_hat;
    e["H_hat"] = E.H_hat;
    e["T_hat_tracks_T_max"] = E.T_hat_tracks_T_max;
    e["q21"] = E.q21;
    e["q_post"] = E.q_post;
    e["severity_exponents"] = {E.exponents.ih, E.exponents.ht, E.exponents.td};
    e["pin_susceptibles"] = E.pin_susceptibles;

    j["strains"] = ordered_json::array();
    for (const auto& s : cfg.strains) {
        j["strains"].push_back({{"R0", s.R0}, {"seed_day", s.seed_day}, {"seed_count", s.seed_count}});
    }

    const auto& C = cfg.control;
    auto& c = j["control"];
    c["kind"] = C.kind;
    c["lambda_C"] = C.lambda_C;
    c["epsilon_days"] = C.epsilon_days ? ordered_json(*C.epsilon_days) : ordered_json(nullptr);
    c["kernel"] = kernel_json(C);
    c["H_max"] = C.H_max;
    c["T_max"] = C.T_max;
    c["rho_max"] = C.rho_max;
    c["curve_exponent"] = C.curve_exponent;
    c["rho"] = C.rho;
    c["tiers"] = {{"levels", C.tier_levels},
                  {"thresholds", C.tier_thresholds},
                  {"dwell_days", C.tier_dwell_days},
                  {"period_days", C.tier_period_days}};

    const auto& V = cfg.vax;
    auto& v = j["vax"];
    v["enabled"] = V.enabled;
    v["policy"] = V.policy;
    v["delta_days"] = V.delta_days;
    v["Tv_days"] = V.Tv_days;
    v["xi_per_day"] = V.xi_per_day;
    v["ve1_ratio"] = V.ve1_ratio;
    v["ve2"] = V.ve2;
    v["ve2_strain2"] = V.ve2_strain2;
    v["novax_count"] = V.novax_count;
    v["start_day"] = V.start_day;

    j["run"] = {{"horizon_days", cfg.run.horizon_days},
                {"dt_days", cfg.run.dt_days},
                {"output_interval_days", cfg.run.output_interval_days},
                {"initial", cfg.run.initial}};
    j["costs"] = {{"alpha", cfg.costs.alpha}, {"kappa", cfg.costs.kappa}};
    return j.dump(2) + "\n";
}

ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw SchemaError("cannot open config " + path);
    }
    std::stringstream ss;
    ss << f.rdbuf();
    ScenarioConfig cfg = scenario_from_json(ss.str());
    const auto dir = std::filesystem::path(path).parent_path();
    for (std::string* file : {&cfg.population.contacts_csv, &cfg.population.cfr_csv,
                              &cfg.population.distribution_csv}) {
        if (!file->empty() && std::filesystem::path(*file).is_relative()) {
            *file = (dir / *file).lexically_normal().string();
        }
    }
    const auto& p = cfg.population;
    auto require = [](const std::string& file) {
        if (!std::filesystem::exists(file)) throw SchemaError("referenced file does not exist: " + file);
    };
    if (p.source == "tables") {
        require(p.contacts_csv);
        require(p.cfr_csv);
    } else if (p.source == "distribution") {
        require(p.distribution_csv);
    }
    return cfg;
}

void validate(const ScenarioConfig& cfg)
{
    auto fail = [](const std::string& msg) { throw SchemaError(msg); };
    const auto& p = cfg.population;
    if (p.source != "italy_like" && p.source != "tables" && p.source != "distribution" && p.source != "classes") {
        fail("population.source must be italy_like, tables, distribution or classes");
    }
    if (!(p.N > 0.0)) fail("population.N must be positive");
    if (p.source == "tables" && (p.contacts_csv.empty() || p.cfr_csv.empty())) {
        fail("population.source = tables needs contacts_csv and cfr_csv");
    }
    if (p.source == "distribution" && p.distribution_csv.empty()) {
        fail("population.source = distribution needs distribution_csv");
    }
    if (p.source == "classes" && p.classes.empty()) fail("population.classes is empty");

    const auto& e = cfg.epidemic;
    if (!(e.gamma_per_day > 0.0) || !(e.phi_per_day > 0.0) || !(e.tau_per_day > 0.0)) {
        fail("epidemic rates gamma, phi, tau must be positive");
    }
    if (!(e.mu_per_day >= 0.0)) fail("epidemic.mu_per_day must be non-negative");
    if (!(e.theta >= 1.0)) fail("epidemic.theta must be >= 1");
    if (!(e.q21 >= 1.0) || !(e.q_post >= 1.0)) fail("epidemic.q21 and q_post must be >= 1");
    if (!(e.T_hat >= 0.0) || !(e.H_hat >= 0.0)) fail("epidemic capacities must be non-negative");

    if (cfg.strains.empty() || cfg.strains.size() > static_cast<std::size_t>(kStrains)) {
        fail("strains must list one or two strains");
    }
    for (const auto& s : cfg.strains) {
        if (!(s.R0 > 0.0)) fail("strain R0 must be positive");
        if (!(s.seed_count >= 0.0)) fail("strain seed_count must be non-negative");
        if (!(s.seed_day >= 0.0) || !(s.seed_day < cfg.run.horizon_days)) {
            fail("strain seed_day must lie in [0, horizon)");
        }
    }

    const auto& c = cfg.control;
    static const std::set<std::string> kinds{"none", "constant", "rate", "rate_delayed", "ht", "tiered"};
    if (!kinds.count(c.kind)) fail("control.kind must be one of none, constant, rate, rate_delayed, ht, tiered");
    if (c.kind == "rate" || c.kind == "rate_delayed") {
        if (!(c.lambda_C > 0.0)) fail("control.lambda_C must be positive");
    }
    if (c.kind == "rate_delayed" && c.kernel != "dirac" && c.kernel != "exp" && c.kernel != "shifted") {
        fail("control.kernel.type must be dirac, exp or shifted");
    }
    if (c.kind == "ht" || c.kind == "tiered") {
        if (!(c.H_max > 0.0) || !(c.T_max > 0.0)) fail("control.H_max and T_max must be positive");
        if (!(c.rho_max > 1.0)) fail("control.rho_max must exceed 1");
        if (!(c.curve_exponent > 0.0)) fail("control.curve_exponent must be positive");
    }
    if (c.kind == "constant" && !(c.rho >= 1.0)) fail("control.rho must be >= 1");

    const auto& v = cfg.vax;
    if (v.policy != "mvf" && v.policy != "msf") fail("vax.policy must be mvf or msf");
    if (!(v.novax_count >= 0.0) || v.novax_count > p.N) fail("vax.novax_count must lie in [0, N]");
    if (v.enabled) {
        if (!(v.delta_days >= 0.0) || !(v.Tv_days > v.delta_days)) fail("vax needs 0 <= delta_days < Tv_days");
        if (!(v.ve1_ratio >= 0.0 && v.ve1_ratio <= 1.0)) fail("vax.ve1_ratio must lie in [0, 1]");
        if (!(v.ve2 >= 0.0 && v.ve2 <= 1.0) || !(v.ve2_strain2 >= 0.0 && v.ve2_strain2 <= 1.0)) {
            fail("vax efficacies must lie in [0, 1]");
        }
        if (!(v.start_day >= 0.0)) fail("vax.start_day must be non-negative");
        if (!(v.xi_per_day >= 0.0)) fail("vax.xi_per_day must be non-negative");
    }

    const auto& r = cfg.run;
    if (!(r.horizon_days > 0.0)) fail("run.horizon_days must be positive");
    if (!(r.dt_days > 0.0) || r.dt_days > r.horizon_days) fail("run.dt_days must lie in (0, horizon]");
    if (!(r.output_interval_days >= r.dt_days)) fail("run.output_interval_days must be >= dt_days");
    if (r.initial != "seed" && r.initial != "rate_equilibrium" && r.initial != "ht_equilibrium") {
        fail("run.initial must be seed, rate_equilibrium or ht_equilibrium");
    }
    if (r.initial == "rate_equilibrium" && !(c.lambda_C > 0.0)) fail("rate_equilibrium needs lambda_C > 0");
    if (!(cfg.costs.alpha >= 1.0)) fail("costs.alpha must be >= 1");
    for (double k : cfg.costs.kappa) {
        if (!(k >= 0.0)) fail("costs.kappa values must be non-negative");
    }
}

namespace presets {

ScenarioConfig reference()
{
    ScenarioConfig c;
    c.name = "reference";
    c.population.N = 60e6;
    c.epidemic = EpidemicConfig{};
    c.strains = {StrainConfig{6.0, 0.0, 1.0}, StrainConfig{12.0, 2 * kYear, 1.0}};
    c.control.kind = "ht";
    c.control.H_max = 40000.0;
    c.control.T_max = 20000.0;
    c.control.rho_max = 15.0;
    c.vax.enabled = true;
    c.vax.policy = "mvf";
    c.vax.delta_days = 21.0;
    c.vax.Tv_days = 270.0;
    c.vax.ve1_ratio = 0.6;
    c.vax.ve2 = 0.9;
    c.vax.ve2_strain2 = 0.7;
    c.vax.novax_count = 6e6;
    c.vax.start_day = kYear;
    c.run.horizon_days = 3 * kYear;
    c.costs.alpha = 2.0;
    return c;
}

ScenarioConfig reference_rate()
{
    ScenarioConfig c = reference();
    c.name = "reference-rate";
    c.control.kind = "rate";
    c.control.lambda_C = 4000.0;
    return c;
}

ScenarioConfig tiered()
{
    ScenarioConfig c = reference();
    c.name = "tiered";
    c.control.kind = "tiered";
    return c;
}

ScenarioConfig ht_table(double T_max, double H_max)
{
    ScenarioConfig c;
    c.name = "ht-table";
    c.population.N = 60e6;
    c.epidemic.H_hat = 100000.0;
    c.epidemic.T_hat = T_max;
    c.epidemic.T_hat_tracks_T_max = true;
    c.strains = {StrainConfig{6.0, 0.0, 1.0}};
    c.control.kind = "ht";
    c.control.T_max = T_max;
    c.control.H_max = H_max;
    c.control.rho_max = 15.0;
    c.vax.enabled = false;
    c.run.horizon_days = kYear;
    return c;
}

ScenarioConfig vaccination_study()
{
    ScenarioConfig c;
    c.name = "vaccination-study";
    c.population.N = 60e6;
    c.strains = {StrainConfig{6.0, 0.0, 0.0}};
    c.control.kind = "rate";
    c.control.lambda_C = 4000.0;
    c.vax.enabled = true;
    c.vax.policy = "mvf";
    c.vax.delta_days = 21.0;
    c.vax.Tv_days = 270.0;
    c.vax.ve1_ratio = 0.6;
    c.vax.ve2 = 0.9;
    c.vax.ve2_strain2 = 0.9;
    c.vax.novax_count = 0.0;
    c.vax.start_day = kYear;
    c.run.horizon_days = 2 * kYear;
    c.run.initial = "rate_equilibrium";
    return c;
}

std::vector<std::string> names()
{
    return {"reference", "reference-rate", "tiered", "ht-table", "vaccination-study"};
}

ScenarioConfig by_name(const std::string& name)
{
    if (name == "reference") return reference();
    if (name == "reference-rate") return reference_rate();
    if (name == "tiered") return tiered();
    if (name == "ht-table") return ht_table();
    if (name == "vaccination-study") return vaccination_study();
    throw SchemaError("unknown preset '" + name + "'");
}

} // namespace presets

PopulationDistribution make_population(const PopulationConfig& cfg)
{
    if (cfg.source == "italy_like") return italy_like(cfg.N);
    if (cfg.source == "tables") return load_joint_distribution(cfg.contacts_csv, cfg.cfr_csv, cfg.N);
    if (cfg.source == "distribution") return read_distribution_csv(cfg.distribution_csv, cfg.N);
    if (cfg.source == "classes") return PopulationDistribution(cfg.classes, cfg.N);
    throw SchemaError("unknown population source '" + cfg.source + "'");
}

PopulationDistribution single_class_collapse(const PopulationDistribution& dist)
{
    double r = 0.0;
    double p = 0.0;
    for (const auto& c : dist.classes()) {
        r += c.fraction * c.r;
        p += c.fraction * c.p;
    }
    return PopulationDistribution({RiskClass{r, p, 1.0}}, dist.N());
}

ControlPolicy make_policy(const ControlConfig& c)
{
    if (c.kind == "none") return NoControl{};
    if (c.kind == "constant") return ConstantControl{c.rho};
    if (c.kind == "rate") return InstantaneousRateControl{c.lambda_C, c.epsilon_days};
    if (c.kind == "rate_delayed") {
        DelayKernel k = DiracKernel{c.kernel_d_days};
        if (c.kernel == "exp") k = ExponentialKernel{c.kernel_delta_per_day};
        if (c.kernel == "shifted") k = ShiftedExponentialKernel{c.kernel_d_days, c.kernel_delta_per_day};
        return DelayedRateControl{c.lambda_C, k};
    }
    if (c.kind == "ht") {
        return HtControl{ControllerCurve::power(c.H_max, c.rho_max, c.curve_exponent),
                         ControllerCurve::power(c.T_max, c.rho_max, c.curve_exponent)};
    }
    if (c.kind == "tiered") {
        TierTable t;
        t.levels = c.tier_levels;
        t.thresholds = c.tier_thresholds;
        t.dwell_min = c.tier_dwell_days;
        t.period = c.tier_period_days;
        t.H_max = c.H_max;
        t.T_max = c.T_max;
        t.validate();
        return TieredHtControl{t};
    }
    throw SchemaError("unknown control kind '" + c.kind + "'");
}

std::optional<VaccinationPlan> make_vaccination(const VaxConfig& v)
{
    if (!v.enabled) {
        return std::nullopt;
    }
    VaccinationPlan plan;
    plan.policy = v.policy == "msf" ? PriorityPolicy::Msf : PriorityPolicy::Mvf;
    plan.delta_days = v.delta_days;
    plan.Tv_days = v.Tv_days;
    plan.xi = v.xi_per_day;
    plan.ve1_ratio = v.ve1_ratio;
    plan.ve2 = {v.ve2, v.ve2_strain2};
    plan.novax_count = v.novax_count;
    plan.start_day = v.start_day;
    plan.validate();
    return plan;
}

BuiltScenario build_scenario(const ScenarioConfig& cfg)
{
    return build_scenario(cfg, make_population(cfg.population));
}

BuiltScenario build_scenario(const ScenarioConfig& cfg, const PopulationDistribution& dist)
{
    validate(cfg);
    const auto& E = cfg.epidemic;
    EpidemicParams params;
    params.gamma = E.gamma_per_day;
    params.phi = E.phi_per_day;
    params.tau = E.tau_per_day;
    params.mu = E.mu_per_day;
    params.theta = E.theta;
    params.T_hat = E.T_hat_tracks_T_max ? cfg.control.T_max : E.T_hat;
    params.H_hat = E.H_hat;
    params.q21 = E.q21;
    params.q_post = E.q_post;
    params.exponents = E.exponents;
    params.pin_susceptibles = E.pin_susceptibles;
    for (std::size_t s = 0; s < cfg.strains.size(); ++s) {
        params.sigma[s] = calibrate_sigma(cfg.strains[s].R0, params.gamma, dist);
    }

    auto vaccination = make_vaccination(cfg.vax);
    const VaccineBands bands = vaccination ? vaccination->bands() : VaccineBands::none();
    EpidemicModel model(dist, params, bands);

    std::vector<StrainSeed> seeds;
    for (std::size_t s = 0; s < cfg.strains.size(); ++s) {
        seeds.push_back({static_cast<int>(s), cfg.strains[s].seed_day, cfg.strains[s].seed_count});
    }

    const double novax = cfg.vax.novax_count;
    EpidemicState initial = model.initial_state(novax);
    if (cfg.run.initial != "seed") {
        EquilibriumPoint eq;
        if (cfg.run.initial == "rate_equilibrium") {
            eq = rate_equilibrium(params, cfg.control.lambda_C, dist);
        } else {
            const double R0 = cfg.strains.front().R0;
            eq = ht_equilibrium(params, R0, ControllerCurve::power(cfg.control.H_max, cfg.control.rho_max,
                                                                   cfg.control.curve_exponent),
                                ControllerCurve::power(cfg.control.T_max, cfg.control.rho_max,
                                                       cfg.control.curve_exponent),
                                dist);
        }
        EpidemicState y = model.initial_state(0.0);
        y = equilibrium_state(model, eq, 0.0);
        // Refusals are drawn from the remaining susceptibles.
        for (std::size_t c = 0; c < model.classes(); ++c) {
            const double share = novax * dist[c].fraction;
            const double take = std::min(share, y(Field::S, c));
            y(Field::S, c) -= take;
            y(Field::SNV, c) += take;
        }
        initial = y;
        // The equilibrium replaces the initial strain-1 seeding.
        std::erase_if(seeds, [](const StrainSeed& s) { return s.strain == 0 && s.day <= 0.0; });
    }

    SimulationOptions opt;
    opt.dt = cfg.run.dt_days;
    return {std::move(model), std::move(initial), make_policy(cfg.control), vaccination, std::move(seeds), opt,
            cfg.run.horizon_days};
}

} // namespace epictrl

#include "epictrl/runner.hpp"

#include "epictrl/csv.hpp"
#include "epictrl/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace epictrl {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + path.string());
    }
    f << text;
}

std::string fmt(double v)
{
    return csv::format_double(v);
}

} // namespace

RunOutput run_built(const BuiltScenario& built, double alpha, double output_interval, const std::string& name,
                    const StepObserver& observer)
{
    RunOutput out;
    out.costs.alpha = alpha;
    out.summary.scenario = name;
    out.summary.alpha = alpha;

    Simulation sim(built.model, built.initial, built.policy, built.vaccination, built.seeds, built.options);
    const double dt = sim.dt();
    const auto total_steps = static_cast<std::size_t>(std::llround(built.horizon_days / dt));
    const auto every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(output_interval / dt)));
    const double H_hat = built.model.params().H_hat;
    const double T_hat = built.model.params().T_hat;

    out.summary.initial_mass = sim.state().total_mass();
    auto record = [&] {
        const Aggregates a = sim.aggregates();
        out.rows.push_back({a, out.costs.econ});
    };
    auto track_peaks = [&](const Aggregates& a) {
        out.summary.peak_I = std::max(out.summary.peak_I, a.I);
        out.summary.peak_H = std::max(out.summary.peak_H, a.H);
        out.summary.peak_T = std::max(out.summary.peak_T, a.T);
    };
    record();
    track_peaks(out.rows.back().a);
    out.costs.deaths = out.rows.back().a.D;

    ActivityInterval current{sim.time(), sim.time(), sim.decision().driver};
    try {
        for (std::size_t k = 0; k < total_steps; ++k) {
            const double H0 = sim.model().hospital_total(sim.state());
            const double T0 = sim.model().icu_total(sim.state());
            const StepRecord rec = sim.step();
            accumulate(rec, out.costs);
            out.summary.first_doses += rec.first_doses;
            out.summary.second_doses += rec.second_doses;
            if (H0 > H_hat) out.summary.days_H_over_capacity += dt;
            if (T0 > T_hat) out.summary.days_T_over_capacity += dt;

            if (rec.driver != current.driver) {
                current.end = rec.t0;
                if (current.end > current.start) out.activity.push_back(current);
                current = {rec.t0, rec.t0, rec.driver};
            }
            current.end = rec.t1;

            if (observer) observer(sim, rec);
            const bool emit = (k + 1) % every == 0 || k + 1 == total_steps;
            if (emit) {
                record();
                track_peaks(out.rows.back().a);
            } else {
                const double H = sim.model().hospital_total(sim.state());
                const double T = sim.model().icu_total(sim.state());
                out.summary.peak_H = std::max(out.summary.peak_H, H);
                out.summary.peak_T = std::max(out.summary.peak_T, T);
            }
        }
    } catch (const IntegrationFault& e) {
        out.summary.fault = true;
        out.summary.fault_message = e.what();
    }
    if (current.end > current.start) out.activity.push_back(current);

    const Aggregates last = sim.aggregates();
    out.summary.horizon_days = sim.time() - built.options.t0;
    out.summary.steps = sim.steps();
    out.summary.econ = out.costs.econ;
    out.summary.econ_by_alpha = out.costs.econ_by_alpha;
    out.summary.deaths = last.D;
    out.summary.deaths_strain2 = last.D2;
    out.summary.final_mass = sim.state().total_mass();
    out.costs.deaths = last.D;
    return out;
}

RunOutput run_scenario(const ScenarioConfig& cfg, const StepObserver& observer)
{
    const BuiltScenario built = build_scenario(cfg);
    return run_built(built, cfg.costs.alpha, cfg.run.output_interval_days, cfg.name, observer);
}

std::string trajectory_csv(const RunOutput& out)
{
    std::ostringstream os;
    os << "t,S,I,H,T,D,M,rho,lambda,R_eff,I2,H2,T2,D2,cost_accum\n";
    for (const auto& row : out.rows) {
        const auto& a = row.a;
        os << fmt(a.t) << ',' << fmt(a.S) << ',' << fmt(a.I) << ',' << fmt(a.H) << ',' << fmt(a.T) << ','
           << fmt(a.D) << ',' << fmt(a.M) << ',' << fmt(a.rho) << ',' << fmt(a.lambda) << ',' << fmt(a.R_eff)
           << ',' << fmt(a.I2) << ',' << fmt(a.H2) << ',' << fmt(a.T2) << ',' << fmt(a.D2) << ','
           << fmt(row.cost_accum) << '\n';
    }
    if (out.summary.fault) {
        os << "# integration fault: " << out.summary.fault_message << '\n';
    }
    return os.str();
}

std::string activity_csv(const RunOutput& out)
{
    std::ostringstream os;
    os << "start,end,driver\n";
    for (const auto& a : out.activity) {
        os << fmt(a.start) << ',' << fmt(a.end) << ',' << driver_name(a.driver) << '\n';
    }
    return os.str();
}

std::string summary_json(const RunOutput& out)
{
    const auto& s = out.summary;
    nlohmann::ordered_json j;
    j["scenario"] = s.scenario;
    j["horizon_days"] = s.horizon_days;
    j["steps"] = s.steps;
    j["alpha"] = s.alpha;
    j["econ"] = s.econ;
    j["econ_alpha1"] = s.econ_by_alpha[0];
    j["econ_alpha2"] = s.econ_by_alpha[1];
    j["econ_alpha3"] = s.econ_by_alpha[2];
    j["deaths"] = s.deaths;
    j["deaths_strain2"] = s.deaths_strain2;
    j["peak_I"] = s.peak_I;
    j["peak_H"] = s.peak_H;
    j["peak_T"] = s.peak_T;
    j["days_H_over_capacity"] = s.days_H_over_capacity;
    j["days_T_over_capacity"] = s.days_T_over_capacity;
    j["first_doses"] = s.first_doses;
    j["second_doses"] = s.second_doses;
    j["initial_mass"] = s.initial_mass;
    j["final_mass"] = s.final_mass;
    j["fault"] = s.fault;
    if (s.fault) {
        j["fault_message"] = s.fault_message;
    }
    return j.dump(2) + "\n";
}

std::string plot_script()
{
    return R"py(#!/usr/bin/env python3
"""Plot trajectory.csv and the controller activity next to it."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
rows = [r for r in csv.DictReader(l for l in open(here / "trajectory.csv") if not l.startswith("#"))]
t = [float(r["t"]) for r in rows]

fig, ax = plt.subplots(figsize=(10, 5))
for key in ("I", "H", "T"):
    ax.plot(t, [float(r[key]) for r in rows], label=key)
ax.set_xlabel("day")
ax.set_ylabel("individuals")
ax.legend(loc="upper left")
ax2 = ax.twinx()
ax2.plot(t, [float(r["rho"]) for r in rows], color="black", lw=0.8, label="rho")
ax2.set_ylabel("rho")

activity = here / "activity.csv"
if activity.exists():
    for r in csv.DictReader(open(activity)):
        if r["driver"] == "T":
            ax.axvspan(float(r["start"]), float(r["end"]), ymax=0.03, color="tab:red", alpha=0.6)

fig.tight_layout()
fig.savefig(here / "trajectory.png", dpi=120)
)py";
}

void write_run_files(const RunOutput& out, const std::string& dir, bool with_plot)
{
    const std::filesystem::path d(dir);
    std::filesystem::create_directories(d);
    write_text(d / "trajectory.csv", trajectory_csv(out));
    write_text(d / "summary.json", summary_json(out));
    write_text(d / "activity.csv", activity_csv(out));
    if (with_plot) {
        write_text(d / "plot.py", plot_script());
    }
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& cfg, const std::string& key, const SweepValue& v)
{
    ScenarioConfig c = cfg;
    if (key == "lambda_C") {
        c.control.lambda_C = v.value;
    } else if (key == "tmax_hmax") {
        if (!v.paired) throw SchemaError("tmax_hmax needs T_max:H_max pairs");
        c.control.T_max = v.value;
        c.control.H_max = v.value2;
    } else if (key == "mu") {
        c.epidemic.mu_per_day = v.value;
    } else if (key == "alpha") {
        c.costs.alpha = v.value;
    } else if (key == "Delta") {
        c.vax.delta_days = v.value;
    } else {
        throw SchemaError("unknown sweep key '" + key + "' (lambda_C, tmax_hmax, mu, alpha, Delta)");
    }
    c.name = cfg.name + "@" + key + "=" + v.label();
    validate(c);
    return c;
}

std::vector<SweepValue> parse_sweep_values(const std::string& key, const std::string& text)
{
    std::vector<SweepValue> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        SweepValue v;
        const auto colon = item.find(':');
        if (key == "tmax_hmax") {
            if (colon == std::string::npos) throw SchemaError("tmax_hmax values need the form T_max:H_max");
            v.value = csv::to_double(item.substr(0, colon), "sweep value");
            v.value2 = csv::to_double(item.substr(colon + 1), "sweep value");
            v.paired = true;
        } else {
            if (colon != std::string::npos) throw SchemaError("only tmax_hmax takes paired values");
            v.value = csv::to_double(item, "sweep value");
        }
        if (!(v.value > 0.0) && key != "mu") throw SchemaError("sweep values must be positive");
        if (!(v.value >= 0.0)) throw SchemaError("sweep values must be non-negative");
        out.push_back(v);
    }
    if (out.empty()) {
        throw SchemaError("sweep value list is empty");
    }
    return out;
}

std::vector<ParetoPoint> run_sweep(const ScenarioConfig& cfg, const std::string& key,
                                   const std::vector<SweepValue>& values, unsigned threads)
{
    if (values.empty()) {
        throw SchemaError("sweep value list is empty");
    }
    // Fail fast on a bad key before launching anything.
    apply_sweep_value(cfg, key, values.front());
    const PopulationDistribution dist = make_population(cfg.population);
    auto run = [&](const SweepValue& v) {
        const ScenarioConfig c = apply_sweep_value(cfg, key, v);
        const RunOutput out = run_built(build_scenario(c, dist), c.costs.alpha, c.run.output_interval_days, c.name);
        if (out.summary.fault) {
            throw IntegrationFault(out.summary.fault_message);
        }
        ParetoPoint p;
        p.econ = out.summary.econ;
        p.econ_by_alpha = out.summary.econ_by_alpha;
        p.deaths = out.summary.deaths;
        p.horizon_days = out.summary.horizon_days;
        return p;
    };
    auto points = pareto_sweep(key, values, run, threads);
    for (auto& p : points) {
        if (!p.ok) p.horizon_days = cfg.run.horizon_days;
    }
    return points;
}

ComparePair compare_single_vs_multi(const ScenarioConfig& cfg)
{
    const PopulationDistribution dist = make_population(cfg.population);
    ComparePair pair;
    pair.multi = run_built(build_scenario(cfg, dist), cfg.costs.alpha, cfg.run.output_interval_days, cfg.name);
    pair.single = run_built(build_scenario(cfg, single_class_collapse(dist)), cfg.costs.alpha,
                            cfg.run.output_interval_days, cfg.name + "-single");
    return pair;
}

std::string compare_csv(const ComparePair& pair)
{
    std::ostringstream os;
    os << "t,I_multi,I_single,H_multi,H_single,T_multi,T_single,D_multi,D_single,rho_multi,rho_single\n";
    const std::size_t n = std::min(pair.multi.rows.size(), pair.single.rows.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = pair.multi.rows[i].a;
        const auto& b = pair.single.rows[i].a;
        os << fmt(a.t) << ',' << fmt(a.I) << ',' << fmt(b.I) << ',' << fmt(a.H) << ',' << fmt(b.H) << ','
           << fmt(a.T) << ',' << fmt(b.T) << ',' << fmt(a.D) << ',' << fmt(b.D) << ',' << fmt(a.rho) << ','
           << fmt(b.rho) << '\n';
    }
    return os.str();
}

} // namespace epictrl

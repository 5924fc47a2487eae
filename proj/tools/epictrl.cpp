// epictrl: run, sweep and analyse controlled epidemic scenarios.

#include <CLI11.hpp>

#include <epictrl/errors.hpp>
#include <epictrl/csv.hpp>
#include <epictrl/population.hpp>
#include <epictrl/runner.hpp>
#include <epictrl/scenario.hpp>
#include <epictrl/stability.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum Exit { Ok = 0, ConfigError = 2, Fault = 3, Infeasible = 4 };

epictrl::ScenarioConfig load(const std::string& config, const std::string& preset)
{
    if (!config.empty() && !preset.empty()) {
        throw epictrl::SchemaError("give either --config or --preset, not both");
    }
    if (!config.empty()) return epictrl::load_scenario(config);
    if (!preset.empty()) return epictrl::presets::by_name(preset);
    throw epictrl::SchemaError("a --config file or --preset name is required");
}

// "0.01,0.1,1" or "log:min:max:n".
std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    if (text.rfind("log:", 0) == 0) {
        std::stringstream ss(text.substr(4));
        std::string a, b, n;
        std::getline(ss, a, ':');
        std::getline(ss, b, ':');
        std::getline(ss, n, ':');
        const double lo = epictrl::csv::to_double(a, "grid min");
        const double hi = epictrl::csv::to_double(b, "grid max");
        const int count = static_cast<int>(epictrl::csv::to_double(n, "grid count"));
        if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
            throw epictrl::SchemaError("log grid needs 0 < min <= max and n >= 1");
        }
        for (int k = 0; k < count; ++k) {
            const double u = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
            out.push_back(lo * std::pow(hi / lo, u));
        }
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(epictrl::csv::to_double(item, "grid value"));
    }
    if (out.empty()) throw epictrl::SchemaError("empty grid");
    return out;
}

std::string stability_table(const std::string& kernel, double gamma, const std::vector<double>& deltas, double d)
{
    using epictrl::csv::format_double;
    std::ostringstream os;
    os << "delta,omega_star,d_star,root_re,root_im\n";
    auto row = [&](double delta, double omega, double dstar, std::complex<double> root) {
        os << format_double(delta) << ',' << format_double(omega) << ',' << format_double(dstar) << ','
           << format_double(root.real()) << ',' << format_double(root.imag()) << '\n';
    };
    const double nan = std::nan("");
    if (kernel == "dirac") {
        const double dstar = epictrl::critical_delay_dirac(gamma);
        const double at = std::isnan(d) ? dstar : d;
        row(nan, gamma, dstar, epictrl::dominant_root({gamma, epictrl::DelayKernel{epictrl::DiracKernel{at}}}));
    } else if (kernel == "exp") {
        for (double delta : deltas) {
            row(delta, nan, nan,
                epictrl::dominant_root({gamma, epictrl::DelayKernel{epictrl::ExponentialKernel{delta}}}));
        }
    } else if (kernel == "shifted") {
        for (double delta : deltas) {
            const auto c = epictrl::critical_delay_shifted_exp(gamma, delta);
            const double at = std::isnan(d) ? c.d : d;
            row(delta, c.omega, c.d,
                epictrl::dominant_root(
                    {gamma, epictrl::DelayKernel{epictrl::ShiftedExponentialKernel{at, delta}}}));
        }
    } else {
        throw epictrl::SchemaError("--kernel must be dirac, exp or shifted");
    }
    return os.str();
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw epictrl::Error("cannot write " + path);
    f << text;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Closed-loop epidemic control simulator"};
    app.require_subcommand(1);

    std::string config, preset, out_dir = "out";
    auto* run = app.add_subcommand("run", "simulate one scenario");
    run->add_option("-c,--config", config, "scenario JSON file");
    run->add_option("-p,--preset", preset, "built-in scenario name");
    run->add_option("-o,--out", out_dir, "output directory");
    bool no_plot = false;
    run->add_flag("--no-plot", no_plot, "skip plot.py");

    std::string key, values, pareto_path;
    unsigned threads = 0;
    auto* sweep = app.add_subcommand("sweep", "run one scenario per sweep value and write pareto.csv");
    sweep->add_option("-c,--config", config, "scenario JSON file");
    sweep->add_option("-p,--preset", preset, "built-in scenario name");
    sweep->add_option("--key", key, "lambda_C | tmax_hmax | mu | alpha | Delta")->required();
    sweep->add_option("--values", values, "comma list; tmax_hmax takes T_max:H_max pairs")->required();
    sweep->add_option("-o,--out", pareto_path, "pareto CSV path (default <out>/pareto.csv)");
    sweep->add_option("--threads", threads, "worker threads (EPICTRL_THREADS caps this)");

    std::string kernel = "shifted", delta_grid = "log:0.01:100:41", stab_out;
    double gamma = 1.0;
    double at_delay = std::nan("");
    auto* stab = app.add_subcommand("stability", "critical delays and dominant characteristic roots");
    stab->add_option("--kernel", kernel, "dirac | exp | shifted");
    stab->add_option("--gamma", gamma, "recovery rate (1/day)");
    stab->add_option("--delta-grid", delta_grid, "comma list or log:min:max:n (1/day)");
    stab->add_option("--d", at_delay, "evaluate the root at this delay instead of d*");
    stab->add_option("-o,--out", stab_out, "CSV path (stdout by default)");

    std::string contacts, cfr, pop_out;
    double N = 60e6;
    auto* pop = app.add_subcommand("population", "population tables");
    auto* build = pop->add_subcommand("build", "join contact and CFR tables into r,p,fraction");
    pop->require_subcommand(1);
    build->add_option("--contacts", contacts, "age_bin,r,mass CSV")->required();
    build->add_option("--cfr", cfr, "age_bin,p CSV")->required();
    build->add_option("-o,--out", pop_out, "output CSV")->required();
    build->add_option("--N", N, "population size");

    auto* compare = app.add_subcommand("compare", "run a scenario and its single-class collapse");
    compare->add_option("-c,--config", config, "scenario JSON file");
    compare->add_option("-p,--preset", preset, "built-in scenario name");
    compare->add_option("-o,--out", out_dir, "output directory");

    std::string preset_name;
    auto* dump = app.add_subcommand("preset", "print a built-in scenario as JSON (no name lists them)");
    dump->add_option("name", preset_name);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto cfg = load(config, preset);
            const auto out = epictrl::run_scenario(cfg);
            epictrl::write_run_files(out, out_dir, !no_plot);
            std::cout << epictrl::summary_json(out);
            return out.summary.fault ? Fault : Ok;
        }
        if (*sweep) {
            const auto cfg = load(config, preset);
            const auto list = epictrl::parse_sweep_values(key, values);
            const auto points = epictrl::run_sweep(cfg, key, list, threads);
            std::string path = pareto_path;
            if (path.empty()) {
                std::filesystem::create_directories(out_dir);
                path = (std::filesystem::path(out_dir) / "pareto.csv").string();
            }
            epictrl::write_pareto_csv(points, path);
            std::cout << epictrl::pareto_csv(points);
            for (const auto& p : points) {
                if (!p.ok) {
                    std::cerr << "sweep point " << p.coordinate.label() << " failed: " << p.error << '\n';
                }
            }
            return Ok;
        }
        if (*stab) {
            emit(stability_table(kernel, gamma, parse_grid(delta_grid), at_delay), stab_out);
            return Ok;
        }
        if (*build) {
            const auto dist = epictrl::load_joint_distribution(contacts, cfr, N);
            epictrl::write_distribution_csv(dist, pop_out);
            const auto m = epictrl::moments(dist);
            std::cout << "classes " << dist.size() << ", E[r] " << m.Er << ", E[r^2]/E[r] " << m.Er2 / m.Er
                      << '\n';
            return Ok;
        }
        if (*compare) {
            const auto cfg = load(config, preset);
            const auto pair = epictrl::compare_single_vs_multi(cfg);
            const std::filesystem::path dir(out_dir);
            epictrl::write_run_files(pair.multi, (dir / "multi").string());
            epictrl::write_run_files(pair.single, (dir / "single").string());
            emit(epictrl::compare_csv(pair), (dir / "compare.csv").string());
            std::cout << "multi deaths " << pair.multi.summary.deaths << ", single deaths "
                      << pair.single.summary.deaths << '\n';
            return pair.multi.summary.fault || pair.single.summary.fault ? Fault : Ok;
        }
        if (*dump) {
            if (preset_name.empty()) {
                for (const auto& n : epictrl::presets::names()) std::cout << n << '\n';
            } else {
                std::cout << epictrl::scenario_to_json(epictrl::presets::by_name(preset_name));
            }
            return Ok;
        }
    } catch (const epictrl::IntegrationFault& e) {
        std::cerr << "integration fault: " << e.what() << '\n';
        return Fault;
    } catch (const epictrl::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return Infeasible;
    } catch (const epictrl::AnalysisFailure& e) {
        std::cerr << "analysis failed: " << e.what() << '\n';
        return Infeasible;
    } catch (const epictrl::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return ConfigError;
    }
    return Ok;
}

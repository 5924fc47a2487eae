#include "epictrl/metrics.hpp"

#include "epictrl/csv.hpp"
#include "epictrl/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace epictrl {

double econ_cost_rate(double rho, double alpha)
{
    const double x = std::max(0.0, rho - 1.0);
    if (x == 0.0) {
        return 0.0;
    }
    if (alpha == 1.0) return x;
    if (alpha == 2.0) return x * x;
    if (alpha == 3.0) return x * x * x;
    return std::pow(x, alpha);
}

void CostAccumulator::add_interval(double dt, double rho0, double rho1)
{
    econ += 0.5 * dt * (econ_cost_rate(rho0, alpha) + econ_cost_rate(rho1, alpha));
    for (int k = 0; k < 3; ++k) {
        const double a = k + 1.0;
        econ_by_alpha[k] += 0.5 * dt * (econ_cost_rate(rho0, a) + econ_cost_rate(rho1, a));
    }
    elapsed += dt;
}

void accumulate(const StepRecord& step, CostAccumulator& acc)
{
    acc.add_interval(step.t1 - step.t0, step.rho, step.rho_next);
    acc.deaths = std::max(acc.deaths, step.deaths);
}

double weighted_objective(const CostAccumulator& acc, double kappa)
{
    return kappa * acc.deaths + acc.econ;
}

double piecewise_policy_cost(std::span<const double> R_values, std::span<const double> durations, double R0,
                             double alpha)
{
    if (R_values.size() != durations.size()) {
        throw ParameterError("policy segments and durations differ in length");
    }
    double cost = 0.0;
    for (std::size_t i = 0; i < R_values.size(); ++i) {
        if (!(R_values[i] > 0.0)) {
            throw ParameterError("R^rho must be positive");
        }
        cost += durations[i] * econ_cost_rate(R0 / R_values[i], alpha);
    }
    return cost;
}

std::string SweepValue::label() const
{
    if (paired) {
        return csv::format_double(value) + ":" + csv::format_double(value2);
    }
    return csv::format_double(value);
}

unsigned sweep_threads(unsigned requested, std::size_t jobs)
{
    unsigned n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EPICTRL_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) {
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        }
    }
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

std::vector<ParetoPoint> pareto_sweep(const std::string& key, std::span<const SweepValue> values,
                                      const std::function<ParetoPoint(const SweepValue&)>& run, unsigned threads)
{
    if (values.empty()) {
        throw ParameterError("sweep needs at least one value");
    }
    std::vector<ParetoPoint> out(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            try {
                out[i] = run(values[i]);
            } catch (const std::exception& e) {
                out[i] = {};
                out[i].ok = false;
                out[i].error = e.what();
            }
            out[i].key = key;
            out[i].coordinate = values[i];
        }
    };
    const unsigned n = sweep_threads(threads, values.size());
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < n; ++k) {
            pool.emplace_back(worker);
        }
    }
    return out;
}

long argmin_objective(std::span<const ParetoPoint> points, double kappa)
{
    long best = -1;
    double best_value = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].ok) continue;
        const double v = kappa * points[i].deaths + points[i].econ;
        if (best < 0 || v < best_value) {
            best = static_cast<long>(i);
            best_value = v;
        }
    }
    return best;
}

bool is_dominated(std::span<const ParetoPoint> points, std::size_t i)
{
    const auto& p = points[i];
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (j == i || !points[j].ok) continue;
        const auto& q = points[j];
        if (q.econ <= p.econ && q.deaths <= p.deaths && (q.econ < p.econ || q.deaths < p.deaths)) {
            return true;
        }
    }
    return false;
}

std::string pareto_csv(std::span<const ParetoPoint> points)
{
    std::ostringstream os;
    os << "sweep_key,sweep_value,econ_alpha1,econ_alpha2,econ_alpha3,deaths,horizon_days\n";
    for (const auto& p : points) {
        os << p.key << ',' << p.coordinate.label();
        if (p.ok) {
            for (double e : p.econ_by_alpha) {
                os << ',' << csv::format_double(e);
            }
            os << ',' << csv::format_double(p.deaths) << ',' << csv::format_double(p.horizon_days);
        } else {
            os << ",nan,nan,nan,nan," << csv::format_double(p.horizon_days);
        }
        os << '\n';
    }
    return os.str();
}

void write_pareto_csv(std::span<const ParetoPoint> points, const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + path);
    }
    f << pareto_csv(points);
}

} // namespace epictrl

#include "epictrl/stability.hpp"

#include "epictrl/errors.hpp"
#include "epictrl/simulation.hpp"

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace epictrl {

namespace {

using cd = std::complex<double>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

cd kernel_laplace_derivative(const DelayKernel& k, cd s)
{
    return std::visit(overloaded{
                          [s](const DiracKernel& x) { return -x.d * std::exp(-s * x.d); },
                          [s](const ExponentialKernel& x) { return -x.delta / ((s + x.delta) * (s + x.delta)); },
                          [s](const ShiftedExponentialKernel& x) {
                              const cd den = s + x.delta;
                              return x.delta * std::exp(-s * x.d) * (-x.d * den - 1.0) / (den * den);
                          },
                      },
                      k);
}

cd best_of(const std::vector<cd>& roots)
{
    if (roots.empty()) {
        throw AnalysisFailure("characteristic equation has no roots");
    }
    cd best = roots.front();
    for (const cd& r : roots) {
        if (r.real() > best.real() + 1e-12 ||
            (std::abs(r.real() - best.real()) <= 1e-12 && std::abs(r.imag()) < std::abs(best.imag()))) {
            best = r;
        }
    }
    return {best.real(), std::abs(best.imag())};
}

std::vector<cd> polynomial_roots(const Eigen::VectorXd& coeffs)
{
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(coeffs);
    const auto& r = solver.roots();
    return {r.data(), r.data() + r.size()};
}

cd delay_dominant_root(double gamma, const DelayKernel& k)
{
    if (const auto* e = std::get_if<ExponentialKernel>(&k)) {
        Eigen::VectorXd c(3);
        c << gamma * e->delta, e->delta, 1.0;
        return best_of(polynomial_roots(c));
    }
    const CharacteristicProblem p{gamma, k};
    constexpr int grid = 9;
    constexpr double tol = 1e-10;
    std::vector<cd> found;
    for (int a = 0; a < grid; ++a) {
        for (int b = 0; b < grid; ++b) {
            cd s{gamma * (-3.0 + 4.0 * a / (grid - 1)), gamma * 4.0 * b / (grid - 1)};
            cd f = characteristic_function(p, s);
            for (int it = 0; it < 200 && std::abs(f) >= tol; ++it) {
                const cd df = 1.0 + gamma * kernel_laplace_derivative(k, s);
                if (std::abs(df) == 0.0) break;
                const cd step = f / df;
                double lambda = 1.0;
                cd next = s - step;
                cd fn = characteristic_function(p, next);
                while (std::abs(fn) > std::abs(f) && lambda > 1e-6) {
                    lambda *= 0.5;
                    next = s - lambda * step;
                    fn = characteristic_function(p, next);
                }
                s = next;
                f = fn;
            }
            if (std::abs(f) < tol && std::isfinite(s.real()) && std::isfinite(s.imag())) {
                const cd r{s.real(), std::abs(s.imag())};
                const bool dup = std::any_of(found.begin(), found.end(),
                                             [&](const cd& q) { return std::abs(q - r) < 1e-6; });
                if (!dup) found.push_back(r);
            }
        }
    }
    if (found.empty()) {
        throw AnalysisFailure("no characteristic root found from the seed grid");
    }
    return best_of(found);
}

} // namespace

cd kernel_laplace(const DelayKernel& k, cd s)
{
    return std::visit(overloaded{
                          [s](const DiracKernel& x) { return std::exp(-s * x.d); },
                          [s](const ExponentialKernel& x) { return x.delta / (s + x.delta); },
                          [s](const ShiftedExponentialKernel& x) { return x.delta * std::exp(-s * x.d) / (s + x.delta); },
                      },
                      k);
}

cd characteristic_function(const CharacteristicProblem& p, cd s)
{
    return std::visit(overloaded{
                          [&](const DelayKernel& k) { return s + p.gamma * kernel_laplace(k, s); },
                          [&](const HtChain& h) {
                              const double K = h.x_star * h.alpha * p.gamma / h.R0;
                              if (h.active == ActiveConstraint::Hospital) {
                                  return s * (s + h.phi) + K * h.phi;
                              }
                              return s * (s + h.phi) * (s + h.tau) + K * h.tau * h.phi;
                          },
                      },
                      p.kernel);
}

cd dominant_root(const CharacteristicProblem& p)
{
    if (!(p.gamma > 0.0)) {
        throw ParameterError("gamma must be positive");
    }
    return std::visit(overloaded{
                          [&](const DelayKernel& k) {
                              validate(k);
                              return delay_dominant_root(p.gamma, k);
                          },
                          [&](const HtChain& h) {
                              if (!(h.phi > 0.0) || !(h.tau > 0.0) || !(h.R0 > 0.0)) {
                                  throw ParameterError("HT chain needs positive phi, tau and R0");
                              }
                              const double K = h.x_star * h.alpha * p.gamma / h.R0;
                              if (h.active == ActiveConstraint::Hospital) {
                                  Eigen::VectorXd c(3);
                                  c << K * h.phi, h.phi, 1.0;
                                  return best_of(polynomial_roots(c));
                              }
                              Eigen::VectorXd c(4);
                              c << K * h.tau * h.phi, h.phi * h.tau, h.phi + h.tau, 1.0;
                              return best_of(polynomial_roots(c));
                          },
                      },
                      p.kernel);
}

double critical_delay_dirac(double gamma)
{
    if (!(gamma > 0.0)) {
        throw ParameterError("gamma must be positive");
    }
    return std::numbers::pi / (2.0 * gamma);
}

CriticalDelay critical_delay_shifted_exp(double gamma, double delta)
{
    if (!(gamma > 0.0) || !(delta > 0.0)) {
        throw ParameterError("gamma and delta must be positive");
    }
    const double d2 = delta * delta;
    // omega^2 solves w^2 + delta^2 w - gamma^2 delta^2 = 0; the form below
    // avoids cancellation when delta >> gamma.
    const double w2 = 2.0 * gamma * gamma * d2 / (d2 + std::sqrt(d2 * d2 + 4.0 * gamma * gamma * d2));
    const double omega = std::sqrt(w2);
    return {omega, std::asin(std::min(1.0, omega / gamma)) / omega};
}

namespace {

void fill_profile(EquilibriumPoint& eq, const EpidemicParams& params, const PopulationDistribution& dist,
                  double Er2)
{
    eq.I.resize(dist.size());
    eq.H.resize(dist.size());
    eq.T.resize(dist.size());
    eq.I_star = eq.H_star = eq.T_star = 0.0;
    for (std::size_t c = 0; c < dist.size(); ++c) {
        const auto& k = dist[c];
        const auto sev = severity_chain(k.p, params.exponents);
        eq.I[c] = eq.I_tilde_star * k.r * k.fraction / Er2;
        eq.H[c] = params.gamma / params.phi * sev.p_ih * eq.I[c];
        eq.T[c] = params.phi / params.tau * sev.p_ht * eq.H[c];
        eq.I_star += eq.I[c];
        eq.H_star += eq.H[c];
        eq.T_star += eq.T[c];
    }
}

} // namespace

EquilibriumPoint ht_equilibrium(const EpidemicParams& params, double R0, const ControllerCurve& rho_H,
                                const ControllerCurve& rho_T, const PopulationDistribution& dist)
{
    if (!(R0 >= 1.0) || R0 > rho_H.rho_max() || R0 > rho_T.rho_max()) {
        throw InfeasibleError("no interior HT equilibrium: R0 outside [1, rho_max]");
    }
    const auto m = moments(dist, params.exponents);
    if (!(m.Erp_IH > 0.0) || !(m.Erp_IHHT > 0.0)) {
        throw AnalysisFailure("HT equilibrium needs positive hospitalization moments");
    }
    const double via_h = rho_H.inverse(R0) * (params.phi / params.gamma) * m.Er2 / m.Erp_IH;
    const double via_t = rho_T.inverse(R0) * (params.tau / params.gamma) * m.Er2 / m.Erp_IHHT;
    EquilibriumPoint eq;
    eq.active = via_h <= via_t ? ActiveConstraint::Hospital : ActiveConstraint::Icu;
    eq.I_tilde_star = std::min(via_h, via_t);
    fill_profile(eq, params, dist, m.Er2);
    // Closed forms for the totals; the per-class sums agree to rounding.
    eq.H_star = params.gamma / params.phi * eq.I_tilde_star * m.Erp_IH / m.Er2;
    eq.T_star = params.gamma / params.tau * eq.I_tilde_star * m.Erp_IHHT / m.Er2;
    return eq;
}

EquilibriumPoint rate_equilibrium(const EpidemicParams& params, double lambda_C, const PopulationDistribution& dist)
{
    if (!(lambda_C > 0.0)) {
        throw ParameterError("lambda_C must be positive");
    }
    const auto m = moments(dist, params.exponents);
    EquilibriumPoint eq;
    eq.I_tilde_star = lambda_C / params.gamma * m.Er2 / m.Er;
    fill_profile(eq, params, dist, m.Er2);
    return eq;
}

HtChain ht_chain(const EpidemicParams& params, double R0, const EquilibriumPoint& eq, const ControllerCurve& rho_H,
                 const ControllerCurve& rho_T)
{
    HtChain h;
    h.phi = params.phi;
    h.tau = params.tau;
    h.R0 = R0;
    h.active = eq.active;
    h.x_star = eq.active == ActiveConstraint::Icu ? eq.T_star : eq.H_star;
    h.alpha = eq.active == ActiveConstraint::Icu ? rho_T.derivative(eq.T_star) : rho_H.derivative(eq.H_star);
    return h;
}

bool ht_stability_check(double phi, double tau, double gamma, double T_star, double alpha_T_star, double R0,
                        ActiveConstraint active)
{
    if (active == ActiveConstraint::Hospital) {
        return true;
    }
    return phi + tau >= T_star * alpha_T_star * gamma / R0;
}

bool icu_sizing_check(double T_max, double H_max, const PopulationDistribution& dist, double phi, double tau,
                      const SeverityExponents& exponents)
{
    const auto m = moments(dist, exponents);
    return T_max > (phi / tau) * (m.Erp_IHHT / m.Erp_IH) * H_max;
}

EpidemicState equilibrium_state(const EpidemicModel& model, const EquilibriumPoint& eq, double novax_count)
{
    EpidemicState y = model.initial_state(novax_count);
    if (eq.I.size() != model.classes()) {
        throw ParameterError("equilibrium profile does not match the population");
    }
    for (std::size_t c = 0; c < model.classes(); ++c) {
        const double occupied = eq.I[c] + eq.H[c] + eq.T[c];
        if (occupied > y(Field::S, c)) {
            throw ParameterError("equilibrium occupancy exceeds the class size");
        }
        y(Field::S, c) -= occupied;
        y(Field::I1, c) = eq.I[c];
        y(Field::H1, c) = eq.H[c];
        y(Field::T1, c) = eq.T[c];
    }
    return y;
}

std::string_view probe_outcome_name(ProbeOutcome o)
{
    switch (o) {
    case ProbeOutcome::Decaying: return "decaying";
    case ProbeOutcome::Growing: return "growing";
    case ProbeOutcome::Flat: return "flat";
    }
    return "flat";
}

ProbeResult classify_oscillation(const std::vector<double>& t, const std::vector<double>& values, double baseline)
{
    ProbeResult res;
    if (t.size() != values.size() || t.size() < 3) {
        return res;
    }
    double span = 0.0;
    for (double v : values) {
        span = std::max(span, std::abs(v - baseline));
    }
    if (span <= 1e-12 * std::max(1.0, std::abs(baseline))) {
        return res;
    }
    std::vector<std::size_t> ext;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double a = values[i] - values[i - 1];
        const double b = values[i + 1] - values[i];
        if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) {
            if (!ext.empty() && i == ext.back() + 1) continue; // plateau
            ext.push_back(i);
        }
    }
    res.extrema = ext.size();
    if (ext.size() < 4) {
        // Monotone drift: compare distance from baseline at both ends.
        const double first = std::abs(values[1] - baseline);
        const double last = std::abs(values.back() - baseline);
        res.outcome = last < first ? ProbeOutcome::Decaying : ProbeOutcome::Growing;
        res.extrema_ratio = first > 0.0 ? last / first : 1.0;
        return res;
    }
    // Peak-to-peak swings are insensitive to a small offset of the centre.
    std::vector<double> swing;
    for (std::size_t k = 1; k + 1 < ext.size(); ++k) {
        swing.push_back(std::abs(values[ext[k + 1]] - values[ext[k]]));
    }
    const double n = static_cast<double>(swing.size() - 1);
    res.extrema_ratio = swing.size() > 1 && swing.front() > 0.0 ? std::pow(swing.back() / swing.front(), 1.0 / n) : 1.0;
    res.outcome = res.extrema_ratio < 1.0 ? ProbeOutcome::Decaying : ProbeOutcome::Growing;
    res.period = 2.0 * (t[ext.back()] - t[ext[1]]) / static_cast<double>(ext.size() - 2);
    return res;
}

ProbeResult empirical_stability_probe(const ProbeSetup& setup)
{
    EpidemicState y = setup.equilibrium;
    for (int s = 0; s < kStrains; ++s) {
        for (Field f : {infected_field(s, false), infected_field(s, true)}) {
            for (double& v : y.field(f)) {
                v *= 1.0 + setup.perturbation;
            }
        }
    }
    SimulationOptions opt;
    opt.dt = setup.dt;
    opt.initial_lambda = setup.initial_lambda;
    Simulation sim(setup.model, y, setup.policy, std::nullopt, {}, opt);
    std::vector<double> t{sim.time()};
    std::vector<double> v{setup.model.infected_edges(sim.state(), 0) + setup.model.infected_edges(sim.state(), 1)};
    const auto steps = static_cast<std::size_t>(std::llround(setup.horizon_days / setup.dt));
    for (std::size_t k = 0; k < steps; ++k) {
        sim.step();
        t.push_back(sim.time());
        v.push_back(setup.model.infected_edges(sim.state(), 0) + setup.model.infected_edges(sim.state(), 1));
    }
    ProbeResult res = classify_oscillation(t, v, setup.baseline);
    if (setup.perturbation == 0.0 && res.outcome != ProbeOutcome::Flat) {
        double span = 0.0;
        for (double x : v) span = std::max(span, std::abs(x - setup.baseline));
        if (span <= 1e-9 * std::max(1.0, setup.baseline)) {
            res = {};
        }
    }
    if (std::abs(setup.perturbation) > 0.01) {
        res.warning = "perturbation above 1% of the equilibrium; local analysis may not apply";
    }
    return res;
}

} // namespace epictrl

#pragma once

#include "epictrl/control.hpp"
#include "epictrl/epidemic.hpp"

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace epictrl {

enum class ActiveConstraint { Hospital, Icu };

/// Linearized occupancy loop around an HT equilibrium. For an ICU-driven
/// equilibrium the characteristic polynomial is
/// s (s + phi)(s + tau) + x_star * alpha * tau * phi * gamma / R0; for a
/// hospital-driven one the tau factor drops out.
struct HtChain {
    double phi = 1.0 / 16.0;
    double tau = 1.0 / 16.0;
    double x_star = 0.0; // T* (or H* when hospital-driven)
    double alpha = 0.0;  // controller slope at x_star
    double R0 = 1.0;
    ActiveConstraint active = ActiveConstraint::Icu;
};

struct CharacteristicProblem {
    double gamma = 1.0;
    std::variant<DelayKernel, HtChain> kernel = DelayKernel{DiracKernel{0.0}};
};

/// Laplace transform of a delay kernel (untruncated).
std::complex<double> kernel_laplace(const DelayKernel& k, std::complex<double> s);

/// s + gamma F(s) for delay kernels, or the HT polynomial.
std::complex<double> characteristic_function(const CharacteristicProblem& p, std::complex<double> s);

/// Root with the largest real part (non-negative imaginary part). Throws
/// AnalysisFailure when no seed converges to a residual below 1e-10.
std::complex<double> dominant_root(const CharacteristicProblem& p);

/// pi / (2 gamma).
double critical_delay_dirac(double gamma);

struct CriticalDelay {
    double omega = 0.0;
    double d = 0.0;
};

/// Delay at which the shifted-exponential loop reaches a pure imaginary
/// root, and the frequency of that root.
CriticalDelay critical_delay_shifted_exp(double gamma, double delta);

struct EquilibriumPoint {
    double I_tilde_star = 0.0;
    double I_star = 0.0;
    double H_star = 0.0;
    double T_star = 0.0;
    ActiveConstraint active = ActiveConstraint::Hospital;
    /// Per-class equilibrium occupancy, I_c proportional to r f.
    std::vector<double> I, H, T;
};

/// Stationary point of the HT loop in the large-population limit. Throws
/// InfeasibleError when R0 lies outside [1, rho_max] of the curves.
EquilibriumPoint ht_equilibrium(const EpidemicParams& params, double R0, const ControllerCurve& rho_H,
                                const ControllerCurve& rho_T, const PopulationDistribution& dist);

/// Stationary point of rate control: I* = lambda_C / gamma.
EquilibriumPoint rate_equilibrium(const EpidemicParams& params, double lambda_C,
                                  const PopulationDistribution& dist);

/// Linearized chain at an equilibrium, for dominant_root.
HtChain ht_chain(const EpidemicParams& params, double R0, const EquilibriumPoint& eq,
                 const ControllerCurve& rho_H, const ControllerCurve& rho_T);

/// Hospital-driven: always stable. ICU-driven: phi + tau >= T* rho_T'(T*)
/// gamma / R0.
bool ht_stability_check(double phi, double tau, double gamma, double T_star, double alpha_T_star, double R0,
                        ActiveConstraint active);

/// T_max > (phi / tau) (E[r p^IH p^HT] / E[r p^IH]) H_max.
bool icu_sizing_check(double T_max, double H_max, const PopulationDistribution& dist, double phi, double tau,
                      const SeverityExponents& exponents = {});

/// Full state at an equilibrium: the given occupancies, S = N f minus them.
EpidemicState equilibrium_state(const EpidemicModel& model, const EquilibriumPoint& eq, double novax_count = 0.0);

enum class ProbeOutcome { Decaying, Growing, Flat };
std::string_view probe_outcome_name(ProbeOutcome o);

struct ProbeResult {
    ProbeOutcome outcome = ProbeOutcome::Flat;
    double extrema_ratio = 1.0; // mean ratio of successive |extrema|
    double period = 0.0;        // days, 0 when fewer than three extrema
    std::size_t extrema = 0;
    std::string warning;
};

/// Classifies the oscillation of values - baseline from its local extrema.
/// The first extremum is treated as transient and skipped.
ProbeResult classify_oscillation(const std::vector<double>& t, const std::vector<double>& values, double baseline);

struct ProbeSetup {
    EpidemicModel model;
    EpidemicState equilibrium;
    ControlPolicy policy;
    double baseline = 0.0;      // Ĩ* of the unperturbed equilibrium
    double perturbation = 0.01; // relative scaling of the infected chain
    double horizon_days = 400.0;
    double dt = 0.05;
    double initial_lambda = 0.0; // history prefill (unperturbed lambda_U)
};

/// Simulates a perturbed equilibrium and classifies infected-edge
/// oscillations. Perturbations above 1% set a warning.
ProbeResult empirical_stability_probe(const ProbeSetup& setup);

} // namespace epictrl

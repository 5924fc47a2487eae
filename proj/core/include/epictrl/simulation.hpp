#pragma once

#include "epictrl/control.hpp"
#include "epictrl/epidemic.hpp"
#include "epictrl/history.hpp"
#include "epictrl/vaccination.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace epictrl {

struct StrainSeed {
    int strain = 0;
    double day = 0.0;
    double count = 1.0;
    bool operator==(const StrainSeed&) const = default;
};

struct SimulationOptions {
    double dt = 0.05;
    double t0 = 0.0;
    /// Clamp tolerance relative to N.
    double tol_neg_rel = 1e-9;
    /// Constant used to prefill the lambda_U history; NaN takes lambda_U
    /// of the initial state.
    double initial_lambda = std::numeric_limits<double>::quiet_NaN();
};

/// Population totals at one instant.
struct Aggregates {
    double t = 0.0;
    double S = 0.0; // unvaccinated susceptibles, including refusals and re-susceptibles
    double I = 0.0, H = 0.0, T = 0.0, D = 0.0, M = 0.0, V = 0.0;
    double I2 = 0.0, H2 = 0.0, T2 = 0.0, D2 = 0.0;
    double I_tilde = 0.0; // infected edges, both strains
    double lambda_u = 0.0;
    double lambda = 0.0;
    double rho = 1.0;
    double R_eff = 0.0;
};

/// Summary of one accepted integration step.
struct StepRecord {
    double t0 = 0.0;
    double t1 = 0.0;
    double rho = 1.0;      // held during the step
    double rho_next = 1.0; // evaluated at t1
    Driver driver = Driver::Idle;
    double deaths = 0.0;   // total D at t1
    double first_doses = 0.0;
    double second_doses = 0.0;
};

/// One closed-loop trajectory: RK4 with rho and dose rates frozen over each
/// step, evaluated at the step start.
class Simulation {
public:
    Simulation(EpidemicModel model, EpidemicState initial, ControlPolicy policy,
               std::optional<VaccinationPlan> vaccination = std::nullopt, std::vector<StrainSeed> seeds = {},
               SimulationOptions options = {});

    const EpidemicModel& model() const { return model_; }
    const EpidemicState& state() const { return y_; }
    double time() const { return t_; }
    std::size_t steps() const { return n_; }
    double dt() const { return opt_.dt; }
    const ControlDecision& decision() const { return decision_; }
    double lambda_u() const { return lambda_u_; }
    const HistoryBuffer& history() const { return history_; }
    const VaccinationScheduler* vaccination() const { return vax_ ? &*vax_ : nullptr; }
    const VaccinationRates& last_rates() const { return rates_; }
    /// Total mass zeroed by the negative clamp so far.
    double clamped_mass() const { return clamped_; }

    Aggregates aggregates() const;

    /// Advances one dt. Throws IntegrationFault when a compartment falls
    /// below -tol_neg or turns NaN; the state is left at the step start.
    StepRecord step();

private:
    void apply_due_seeds();
    void observe();

    EpidemicModel model_;
    EpidemicState y_;
    Controller controller_;
    std::optional<VaccinationScheduler> vax_;
    std::vector<double> contact_rates_;
    std::vector<StrainSeed> seeds_;
    std::vector<bool> seeded_;
    SimulationOptions opt_;
    HistoryBuffer history_;
    double t_ = 0.0;
    std::size_t n_ = 0;
    ControlDecision decision_;
    double lambda_u_ = 0.0;
    double clamped_ = 0.0;
    VaccinationRates rates_;
    // RK4 scratch space.
    EpidemicState k1_, k2_, k3_, k4_, tmp_;
};

} // namespace epictrl

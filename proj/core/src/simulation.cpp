#include "epictrl/simulation.hpp"

#include "epictrl/errors.hpp"

#include <cmath>
#include <string>

namespace epictrl {

Simulation::Simulation(EpidemicModel model, EpidemicState initial, ControlPolicy policy,
                       std::optional<VaccinationPlan> vaccination, std::vector<StrainSeed> seeds,
                       SimulationOptions options)
    : model_(std::move(model))
    , y_(std::move(initial))
    , controller_(std::move(policy), options.dt)
    , seeds_(std::move(seeds))
    , seeded_(seeds_.size(), false)
    , opt_(options)
    , history_(controller_.history_span())
    , t_(options.t0)
    , k1_(model_.classes())
    , k2_(model_.classes())
    , k3_(model_.classes())
    , k4_(model_.classes())
    , tmp_(model_.classes())
{
    if (y_.classes() != model_.classes()) {
        throw ParameterError("initial state does not match the population");
    }
    if (!(opt_.tol_neg_rel >= 0.0)) {
        throw ParameterError("negative tolerance must be non-negative");
    }
    for (const auto& s : seeds_) {
        if (s.strain < 0 || s.strain >= kStrains) {
            throw ParameterError("seed strain out of range");
        }
    }
    if (vaccination) {
        vax_.emplace(*vaccination, model_.distribution(), opt_.dt);
        for (const auto& c : model_.distribution().classes()) {
            contact_rates_.push_back(c.r);
        }
    }
    apply_due_seeds();
    lambda_u_ = model_.uncontrolled_rate(y_);
    const double prefill = std::isnan(opt_.initial_lambda) ? lambda_u_ : opt_.initial_lambda;
    history_.prefill(t_, opt_.dt, prefill);
    observe();
}

void Simulation::apply_due_seeds()
{
    for (std::size_t i = 0; i < seeds_.size(); ++i) {
        if (!seeded_[i] && seeds_[i].day <= t_ + 1e-9) {
            model_.seed_strain(y_, seeds_[i].strain, seeds_[i].count);
            seeded_[i] = true;
        }
    }
}

void Simulation::observe()
{
    history_.push(t_, lambda_u_);
    decision_ = controller_.evaluate({t_, model_.hospital_total(y_), model_.icu_total(y_)}, history_);
}

Aggregates Simulation::aggregates() const
{
    Aggregates a;
    a.t = t_;
    a.S = y_.total(Field::S) + y_.total(Field::SNV) + y_.total(Field::SR);
    a.M = y_.total(Field::M);
    for (int k = 1; k <= 2; ++k) {
        for (int j = 0; j < kBands; ++j) {
            a.V += y_.total(band_field(k, j));
        }
    }
    for (int s = 0; s < kStrains; ++s) {
        const double I = y_.total(infected_field(s, false)) + y_.total(infected_field(s, true));
        const double H = y_.total(hospital_field(s, false)) + y_.total(hospital_field(s, true));
        const double T = y_.total(icu_field(s, false)) + y_.total(icu_field(s, true));
        const double D = y_.total(dead_field(s));
        a.I += I;
        a.H += H;
        a.T += T;
        a.D += D;
        if (s == 1) {
            a.I2 = I;
            a.H2 = H;
            a.T2 = T;
            a.D2 = D;
        }
        a.I_tilde += model_.infected_edges(y_, s);
    }
    a.lambda_u = lambda_u_;
    a.rho = decision_.rho;
    a.lambda = lambda_u_ / decision_.rho;
    a.R_eff = model_.effective_reproduction(y_, decision_.rho);
    return a;
}

StepRecord Simulation::step()
{
    const double dt = opt_.dt;
    const double rho = decision_.rho;
    StepRecord rec;
    rec.t0 = t_;
    rec.rho = rho;
    rec.driver = decision_.driver;

    rates_ = {};
    if (vax_) {
        rates_ = vax_->rates(y_, contact_rates_, model_.infection_force(y_, rho), model_.bands(), t_);
    }

    auto y = y_.raw();
    auto tmp = tmp_.raw();
    const std::size_t len = y.size();
    auto stage = [&](const EpidemicState& k, double h) {
        const auto kv = k.raw();
        for (std::size_t i = 0; i < len; ++i) {
            tmp[i] = y[i] + h * kv[i];
        }
    };
    model_.derivative(y_, rho, rates_, k1_);
    stage(k1_, 0.5 * dt);
    model_.derivative(tmp_, rho, rates_, k2_);
    stage(k2_, 0.5 * dt);
    model_.derivative(tmp_, rho, rates_, k3_);
    stage(k3_, dt);
    model_.derivative(tmp_, rho, rates_, k4_);

    const auto a = k1_.raw();
    const auto b = k2_.raw();
    const auto c = k3_.raw();
    const auto d = k4_.raw();
    const double tol = opt_.tol_neg_rel * model_.distribution().N();
    double clamped = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        double v = y[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
        if (!(v >= 0.0)) {
            if (std::isnan(v) || v < -tol) {
                const auto f = static_cast<Field>(i / model_.classes());
                throw IntegrationFault("compartment " + std::string(field_name(f)) + " of class " +
                                       std::to_string(i % model_.classes()) + " reached " +
                                       std::to_string(v) + " at t=" + std::to_string(t_));
            }
            clamped -= v;
            v = 0.0;
        }
        tmp[i] = v;
    }
    std::swap(y_, tmp_);
    clamped_ += clamped;

    if (vax_) {
        vax_->commit(rates_, t_);
        for (std::size_t cl = 0; cl < model_.classes(); ++cl) {
            rec.first_doses += rates_.first[cl] * dt;
            rec.second_doses += rates_.second_total(cl) * dt;
        }
    }

    ++n_;
    t_ = opt_.t0 + static_cast<double>(n_) * dt;
    apply_due_seeds();
    lambda_u_ = model_.uncontrolled_rate(y_);
    observe();

    rec.t1 = t_;
    rec.rho_next = decision_.rho;
    rec.deaths = y_.total(Field::D1) + y_.total(Field::D2);
    return rec;
}

} // namespace epictrl

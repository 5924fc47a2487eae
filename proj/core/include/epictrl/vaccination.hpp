#pragma once

#include "epictrl/epidemic.hpp"

#include <array>
#include <span>
#include <vector>

namespace epictrl {

enum class PriorityPolicy { Mvf, Msf };

/// Two-dose campaign administered at a fixed daily rate in priority order.
struct VaccinationPlan {
    PriorityPolicy policy = PriorityPolicy::Mvf;
    double delta_days = 21.0;
    double Tv_days = 270.0;
    double xi = 0.0; // doses/day; 0 derives N / (Tv - delta)
    double ve1_ratio = 0.6;
    std::array<double, kStrains> ve2{0.9, 0.7};
    double novax_count = 0.0;
    double start_day = 0.0;

    void validate() const;
    std::array<double, kStrains> ve1() const;
    double rate(double N) const;
    VaccineBands bands() const;

    bool operator==(const VaccinationPlan&) const = default;
};

/// MVF: p descending then r descending. MSF: r descending then p
/// descending. Remaining ties keep class index order.
std::vector<std::size_t> priority_order(PriorityPolicy policy, const PopulationDistribution& dist);

/// Fractions of the first-dose-susceptible mass that a second dose makes
/// immune / leaves susceptible: ((VE2-VE1)/(1-VE1), (1-VE2)/(1-VE1)), with
/// 0/0 read as 0.
std::pair<double, double> second_dose_split(double ve1, double ve2);

/// Per-class record of first doses over the sliding window of the last
/// `lag_steps` integration steps.
class DoseLedger {
public:
    DoseLedger() = default;
    DoseLedger(std::size_t classes, std::size_t lag_steps);

    std::size_t classes() const { return n_; }
    std::size_t lag_steps() const { return lag_; }

    /// First doses given to class c over the window (V^1).
    double window_total(std::size_t c) const { return window_[c]; }
    /// First doses given lag_steps steps before the current one.
    double delayed(std::size_t c) const;

    double cumulative_first(std::size_t c) const { return cum_first_[c]; }
    double cumulative_second(std::size_t c) const { return cum_second_[c]; }
    /// Times (step start) of the first first-dose / second-dose, or -1.
    double first_dose_open(std::size_t c) const { return first_open_[c]; }
    double second_dose_open(std::size_t c) const { return second_open_[c]; }
    double first_dose_close(std::size_t c) const { return first_close_[c]; }
    /// Second doses that fell due but were not yet given, counted in
    /// first-dose units (>= 0).
    double backlog(std::size_t c) const { return backlog_[c]; }

    /// Books one step starting at time t: per-class first-dose rates,
    /// per-class-and-band second-dose rates and the backlog left after it.
    void record(std::span<const double> first, std::span<const double> second_by_band,
                std::span<const double> backlog, double t, double dt);

private:
    std::size_t n_ = 0;
    std::size_t lag_ = 0;
    std::size_t head_ = 0;
    std::vector<double> ring_; // lag_ x n_, slot head_ is the oldest step
    std::vector<double> window_;
    std::vector<double> backlog_;
    std::vector<double> cum_first_, cum_second_;
    std::vector<double> first_open_, second_open_, first_close_;
};

/// Per-class first-dose rates for one step. The budget xi*dt walks the
/// priority order; each class takes at most what its dosable pool S keeps
/// after this step's infections (S (1 - hazard dt)), and the remainder
/// rolls over to the next class.
std::vector<double> first_dose_rate(double xi, std::span<const std::size_t> order, const EpidemicState& y,
                                    std::span<const double> hazard, double t, double start_day, double dt);

struct SecondDoses {
    std::vector<double> per_band; // [c * kBands + b], people/day
    std::vector<double> backlog;  // per class, after this step
};

/// xi2 = (V1 survivors / recipients) * due first doses / dt per class,
/// where `due` is the first doses given lag_steps ago plus the backlog.
/// The class total is split over bands by their current share and each
/// band is capped at what survives this step's infections; the shortfall
/// becomes backlog.
SecondDoses second_dose_rate(const DoseLedger& ledger, const EpidemicState& y, std::span<const double> r,
                             const std::array<double, kStrains>& force, const VaccineBands& bands, double dt);

/// Flows generated by one class's dose rates.
struct DoseFlows {
    std::array<double, kBands> into_first{};  // S -> V1_b
    std::array<double, kBands> first_to_second{}; // V1_b -> V2_b
    double total() const;
};

DoseFlows dose_flows(double first_rate, double second_rate, const EpidemicState& y, std::size_t c,
                     const VaccineBands& bands);

/// Owns the ledger and produces the dose rates of each step.
class VaccinationScheduler {
public:
    VaccinationScheduler(VaccinationPlan plan, const PopulationDistribution& dist, double dt);

    const VaccinationPlan& plan() const { return plan_; }
    const DoseLedger& ledger() const { return ledger_; }
    const std::vector<std::size_t>& order() const { return order_; }
    double xi() const { return xi_; }

    /// Rates for the step starting at t; `force` comes from
    /// EpidemicModel::infection_force at the step start.
    VaccinationRates rates(const EpidemicState& y, std::span<const double> r,
                           const std::array<double, kStrains>& force, const VaccineBands& bands, double t);
    void commit(const VaccinationRates& rates, double t);

private:
    VaccinationPlan plan_;
    double dt_;
    double xi_;
    std::vector<std::size_t> order_;
    DoseLedger ledger_;
    std::vector<double> pending_backlog_;
};

} // namespace epictrl

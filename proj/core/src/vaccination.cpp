#include "epictrl/vaccination.hpp"

#include "epictrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epictrl {

void VaccinationPlan::validate() const
{
    if (!(delta_days >= 0.0) || !(Tv_days > delta_days)) {
        throw ParameterError("vaccination needs 0 <= delta < Tv");
    }
    if (!(xi >= 0.0)) {
        throw ParameterError("vaccination rate must be non-negative");
    }
    if (!(ve1_ratio >= 0.0 && ve1_ratio <= 1.0)) {
        throw ParameterError("first-dose efficacy ratio must lie in [0, 1]");
    }
    for (double v : ve2) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ParameterError("second-dose efficacy must lie in [0, 1]");
        }
    }
    if (!(novax_count >= 0.0)) {
        throw ParameterError("refusal count must be non-negative");
    }
}

std::array<double, kStrains> VaccinationPlan::ve1() const
{
    std::array<double, kStrains> out{};
    for (int s = 0; s < kStrains; ++s) {
        out[s] = ve1_ratio * ve2[s];
    }
    return out;
}

double VaccinationPlan::rate(double N) const
{
    return xi > 0.0 ? xi : N / (Tv_days - delta_days);
}

VaccineBands VaccinationPlan::bands() const
{
    return VaccineBands::from_efficacy(ve1(), ve2);
}

std::vector<std::size_t> priority_order(PriorityPolicy policy, const PopulationDistribution& dist)
{
    std::vector<std::size_t> order(dist.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = dist[a];
        const auto& y = dist[b];
        if (policy == PriorityPolicy::Mvf) {
            return x.p != y.p ? x.p > y.p : x.r > y.r;
        }
        return x.r != y.r ? x.r > y.r : x.p > y.p;
    });
    return order;
}

std::pair<double, double> second_dose_split(double ve1, double ve2)
{
    const double rest = 1.0 - ve1;
    if (rest <= 0.0) {
        return {0.0, 0.0};
    }
    return {(ve2 - ve1) / rest, (1.0 - ve2) / rest};
}

DoseLedger::DoseLedger(std::size_t classes, std::size_t lag_steps)
    : n_(classes)
    , lag_(lag_steps)
    , ring_(classes * lag_steps, 0.0)
    , window_(classes, 0.0)
    , backlog_(classes, 0.0)
    , cum_first_(classes, 0.0)
    , cum_second_(classes, 0.0)
    , first_open_(classes, -1.0)
    , second_open_(classes, -1.0)
    , first_close_(classes, -1.0)
{
}

double DoseLedger::delayed(std::size_t c) const
{
    if (lag_ == 0) {
        return 0.0;
    }
    return ring_[head_ * n_ + c];
}

void DoseLedger::record(std::span<const double> first, std::span<const double> second_by_band,
                        std::span<const double> backlog, double t, double dt)
{
    for (std::size_t c = 0; c < n_; ++c) {
        const double a = c < first.size() ? first[c] * dt : 0.0;
        double b = 0.0;
        if (second_by_band.size() >= (c + 1) * kBands) {
            for (int j = 0; j < kBands; ++j) {
                b += second_by_band[c * kBands + j] * dt;
            }
        }
        backlog_[c] = c < backlog.size() ? std::max(0.0, backlog[c]) : 0.0;
        if (a > 0.0) {
            if (first_open_[c] < 0.0) {
                first_open_[c] = t;
            }
            first_close_[c] = t + dt;
        }
        if (b > 0.0 && second_open_[c] < 0.0) {
            second_open_[c] = t;
        }
        cum_first_[c] += a;
        cum_second_[c] += b;
        if (lag_ == 0) {
            continue;
        }
        double& slot = ring_[head_ * n_ + c];
        window_[c] = std::max(0.0, window_[c] - slot + a);
        slot = a;
    }
    if (lag_ > 0) {
        head_ = (head_ + 1) % lag_;
    }
}

std::vector<double> first_dose_rate(double xi, std::span<const std::size_t> order, const EpidemicState& y,
                                    std::span<const double> hazard, double t, double start_day, double dt)
{
    std::vector<double> rates(y.classes(), 0.0);
    if (t < start_day - 1e-9 || !(xi > 0.0)) {
        return rates;
    }
    double budget = xi * dt;
    for (std::size_t c : order) {
        if (budget <= 0.0) {
            break;
        }
        const double pool = y(Field::S, c) * std::max(0.0, 1.0 - hazard[c] * dt);
        const double give = std::min(budget, std::max(0.0, pool));
        rates[c] = give / dt;
        budget -= give;
    }
    return rates;
}

SecondDoses second_dose_rate(const DoseLedger& ledger, const EpidemicState& y, std::span<const double> r,
                             const std::array<double, kStrains>& force, const VaccineBands& bands, double dt)
{
    const std::size_t n = y.classes();
    SecondDoses out{std::vector<double>(n * kBands, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t c = 0; c < n; ++c) {
        const double due = ledger.delayed(c) + ledger.backlog(c);
        const double recipients = ledger.window_total(c) + ledger.backlog(c);
        if (!(due > 0.0) || !(recipients > 0.0)) {
            continue;
        }
        double v1 = 0.0;
        for (int j = 0; j < kBands; ++j) {
            v1 += y(band_field(1, j), c);
        }
        if (!(v1 > 0.0)) {
            continue; // nobody left to dose
        }
        const double ratio = std::min(1.0, v1 / recipients);
        const double want = ratio * due;
        double given = 0.0;
        for (int j = 0; j < kBands; ++j) {
            const double x = y(band_field(1, j), c);
            if (!(x > 0.0)) continue;
            double hazard = 0.0;
            for (int s = 0; s < kStrains; ++s) {
                if (!bands.immune[0][j][s]) hazard += force[s] * r[c];
            }
            const double give = std::min(want * x / v1, x * std::max(0.0, 1.0 - hazard * dt));
            out.per_band[c * kBands + j] = give / dt;
            given += give;
        }
        const double left = due - given / ratio;
        out.backlog[c] = left > 1e-12 * due ? left : 0.0;
    }
    return out;
}

double DoseFlows::total() const
{
    double s = 0.0;
    for (int j = 0; j < kBands; ++j) {
        s += into_first[j] + first_to_second[j];
    }
    return s;
}

DoseFlows dose_flows(double first_rate, double second_rate, const EpidemicState& y, std::size_t c,
                     const VaccineBands& bands)
{
    DoseFlows f;
    double v1 = 0.0;
    for (int j = 0; j < kBands; ++j) {
        f.into_first[j] = first_rate * bands.width[j];
        v1 += y(band_field(1, j), c);
    }
    if (v1 > 0.0) {
        for (int j = 0; j < kBands; ++j) {
            f.first_to_second[j] = second_rate * y(band_field(1, j), c) / v1;
        }
    }
    return f;
}

VaccinationScheduler::VaccinationScheduler(VaccinationPlan plan, const PopulationDistribution& dist, double dt)
    : plan_(plan)
    , dt_(dt)
    , xi_(plan.rate(dist.N()))
    , order_(priority_order(plan.policy, dist))
{
    plan_.validate();
    if (!(dt > 0.0)) {
        throw ParameterError("vaccination step must be positive");
    }
    const auto lag = static_cast<std::size_t>(std::llround(plan_.delta_days / dt));
    ledger_ = DoseLedger(dist.size(), std::max<std::size_t>(lag, 1));
}

VaccinationRates VaccinationScheduler::rates(const EpidemicState& y, std::span<const double> r,
                                             const std::array<double, kStrains>& force, const VaccineBands& bands,
                                             double t)
{
    std::vector<double> hazard(y.classes());
    for (std::size_t c = 0; c < y.classes(); ++c) {
        hazard[c] = (force[0] + force[1]) * r[c];
    }
    VaccinationRates out;
    out.first = first_dose_rate(xi_, order_, y, hazard, t, plan_.start_day, dt_);
    auto second = second_dose_rate(ledger_, y, r, force, bands, dt_);
    out.second = std::move(second.per_band);
    pending_backlog_ = std::move(second.backlog);
    return out;
}

void VaccinationScheduler::commit(const VaccinationRates& rates, double t)
{
    ledger_.record(rates.first, rates.second, pending_backlog_, t, dt_);
}

} // namespace epictrl

#include "epictrl/epidemic.hpp"

#include "epictrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epictrl {

std::string_view field_name(Field f)
{
    static constexpr std::string_view names[] = {
        "S", "SNV", "SR", "M",
        "I1", "H1", "T1", "I2", "H2", "T2",
        "IV1", "HV1", "TV1", "IV2", "HV2", "TV2",
        "D1", "D2",
        "V1_0", "V1_1", "V1_2", "V1_3", "V1_4",
        "V2_0", "V2_1", "V2_2", "V2_3", "V2_4",
    };
    static_assert(std::size(names) == kFieldCount);
    return names[static_cast<std::size_t>(f)];
}

VaccineBands VaccineBands::from_efficacy(std::array<double, kStrains> ve1, std::array<double, kStrains> ve2)
{
    std::vector<double> cuts{0.0, 1.0};
    for (int s = 0; s < kStrains; ++s) {
        if (!(ve1[s] >= 0.0 && ve1[s] <= ve2[s] && ve2[s] <= 1.0)) {
            throw ParameterError("vaccine efficacies must satisfy 0 <= VE1 <= VE2 <= 1");
        }
        cuts.push_back(ve1[s]);
        cuts.push_back(ve2[s]);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    VaccineBands b;
    const std::array<std::array<double, kStrains>, 2> ve{ve1, ve2};
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        b.width[j] = cuts[j + 1] - cuts[j];
        for (int k = 0; k < 2; ++k) {
            for (int s = 0; s < kStrains; ++s) {
                b.immune[k][j][s] = cuts[j + 1] <= ve[k][s];
            }
        }
    }
    return b;
}

VaccineBands VaccineBands::none()
{
    VaccineBands b;
    b.width[0] = 1.0;
    return b;
}

void EpidemicParams::validate() const
{
    for (double s : sigma) {
        if (!(s >= 0.0)) {
            throw ParameterError("sigma must be non-negative");
        }
    }
    if (!(gamma > 0.0) || !(phi > 0.0) || !(tau > 0.0)) {
        throw ParameterError("gamma, phi and tau must be positive");
    }
    if (!(mu >= 0.0)) {
        throw ParameterError("mu must be non-negative");
    }
    if (!(theta >= 1.0)) {
        throw ParameterError("theta must be >= 1");
    }
    if (!(T_hat >= 0.0) || !(H_hat >= 0.0)) {
        throw ParameterError("capacities must be non-negative");
    }
    if (!(q21 >= 1.0) || !(q_post >= 1.0)) {
        throw ParameterError("mortality divisors must be >= 1");
    }
}

EpidemicState::EpidemicState(std::size_t n_classes)
    : n_(n_classes)
    , data_(n_classes * kFieldCount, 0.0)
{
}

double EpidemicState::total(Field f) const
{
    const auto v = field(f);
    return std::accumulate(v.begin(), v.end(), 0.0);
}

double EpidemicState::class_mass(std::size_t c) const
{
    double sum = 0.0;
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        sum += data_[f * n_ + c];
    }
    return sum;
}

double EpidemicState::total_mass() const
{
    return std::accumulate(data_.begin(), data_.end(), 0.0);
}

std::array<double, kFieldCount> EpidemicState::class_state(std::size_t c) const
{
    std::array<double, kFieldCount> out{};
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        out[f] = data_[f * n_ + c];
    }
    return out;
}

double p_td_effective(double T_total, double T_hat, double theta, double p_hat)
{
    if (T_total <= T_hat) {
        return p_hat;
    }
    const double excess = std::min(1.0, theta * p_hat);
    return p_hat * (T_hat / T_total) + excess * (T_total - T_hat) / T_total;
}

EpidemicModel::EpidemicModel(PopulationDistribution dist, EpidemicParams params, VaccineBands bands)
    : dist_(std::move(dist))
    , params_(params)
    , bands_(bands)
{
    params_.validate();
    severity_.reserve(dist_.size());
    r_.reserve(dist_.size());
    for (const auto& c : dist_.classes()) {
        severity_.push_back(severity_chain(c.p, params_.exponents));
        r_.push_back(c.r);
        edge_norm_ += c.r * c.fraction * dist_.N();
    }
}

EpidemicState EpidemicModel::initial_state(double novax_count) const
{
    if (!(novax_count >= 0.0) || novax_count > dist_.N()) {
        throw ParameterError("refusal count must lie in [0, N]");
    }
    EpidemicState y(classes());
    for (std::size_t c = 0; c < classes(); ++c) {
        const double f = dist_[c].fraction;
        y(Field::SNV, c) = novax_count * f;
        y(Field::S, c) = dist_.N() * f - y(Field::SNV, c);
    }
    return y;
}

namespace {

// Mass of class c that can catch `strain`.
double susceptible_mass(const EpidemicState& y, const VaccineBands& b, std::size_t c, int strain)
{
    double s = y(Field::S, c) + y(Field::SNV, c) + y(Field::SR, c);
    for (int k = 0; k < 2; ++k) {
        for (int j = 0; j < kBands; ++j) {
            if (!b.immune[k][j][strain]) {
                s += y(band_field(k + 1, j), c);
            }
        }
    }
    return s;
}

} // namespace

double EpidemicModel::infected_edges(const EpidemicState& y, int strain) const
{
    const auto I = y.field(infected_field(strain, false));
    const auto IV = y.field(infected_field(strain, true));
    double sum = 0.0;
    for (std::size_t c = 0; c < classes(); ++c) {
        sum += r_[c] * (I[c] + IV[c]);
    }
    return sum;
}

double EpidemicModel::susceptible_edges(const EpidemicState& y, int strain) const
{
    double sum = 0.0;
    for (std::size_t c = 0; c < classes(); ++c) {
        sum += r_[c] * susceptible_mass(y, bands_, c, strain);
    }
    return sum;
}

double EpidemicModel::susceptible_edges_sq(const EpidemicState& y, int strain) const
{
    double sum = 0.0;
    for (std::size_t c = 0; c < classes(); ++c) {
        sum += r_[c] * r_[c] * susceptible_mass(y, bands_, c, strain);
    }
    return sum;
}

double EpidemicModel::uncontrolled_rate(const EpidemicState& y, int strain) const
{
    if (edge_norm_ <= 0.0) {
        return 0.0;
    }
    return params_.sigma[strain] * infected_edges(y, strain) * susceptible_edges(y, strain) / edge_norm_;
}

double EpidemicModel::uncontrolled_rate(const EpidemicState& y) const
{
    double sum = 0.0;
    for (int s = 0; s < kStrains; ++s) {
        sum += uncontrolled_rate(y, s);
    }
    return sum;
}

double EpidemicModel::effective_reproduction(const EpidemicState& y, double rho, int strain) const
{
    if (edge_norm_ <= 0.0) {
        return 0.0;
    }
    return params_.sigma[strain] / (rho * params_.gamma) * susceptible_edges_sq(y, strain) / edge_norm_;
}

double EpidemicModel::effective_reproduction(const EpidemicState& y, double rho) const
{
    const double w1 = infected_edges(y, 0);
    const double w2 = infected_edges(y, 1);
    if (w1 + w2 <= 0.0) {
        return effective_reproduction(y, rho, 0);
    }
    return (w1 * effective_reproduction(y, rho, 0) + w2 * effective_reproduction(y, rho, 1)) / (w1 + w2);
}

double VaccinationRates::second_total(std::size_t c) const
{
    double sum = 0.0;
    for (int j = 0; j < kBands; ++j) {
        sum += second[c * kBands + j];
    }
    return sum;
}

std::array<double, kStrains> EpidemicModel::infection_force(const EpidemicState& y, double rho) const
{
    std::array<double, kStrains> force{};
    if (edge_norm_ > 0.0) {
        for (int s = 0; s < kStrains; ++s) {
            force[s] = params_.sigma[s] * infected_edges(y, s) / (rho * edge_norm_);
        }
    }
    return force;
}

std::vector<double> EpidemicModel::susceptible_hazard(const EpidemicState& y, double rho) const
{
    const auto force = infection_force(y, rho);
    std::vector<double> h(classes());
    for (std::size_t c = 0; c < classes(); ++c) {
        h[c] = (force[0] + force[1]) * r_[c];
    }
    return h;
}

double EpidemicModel::icu_total(const EpidemicState& y) const
{
    double sum = 0.0;
    for (int s = 0; s < kStrains; ++s) {
        sum += y.total(icu_field(s, false)) + y.total(icu_field(s, true));
    }
    return sum;
}

double EpidemicModel::hospital_total(const EpidemicState& y) const
{
    double sum = 0.0;
    for (int s = 0; s < kStrains; ++s) {
        sum += y.total(hospital_field(s, false)) + y.total(hospital_field(s, true));
    }
    return sum;
}

void EpidemicModel::derivative(const EpidemicState& y, double rho, const VaccinationRates& vax,
                               EpidemicState& dy) const
{
    const std::size_t n = classes();
    if (dy.classes() != n) {
        dy = EpidemicState(n);
    }
    std::fill(dy.raw().begin(), dy.raw().end(), 0.0);

    const auto& P = params_;
    const auto force = infection_force(y, rho);
    const double T_total = icu_total(y);
    const bool pinned = P.pin_susceptibles;
    const bool has_first = !vax.first.empty();
    const bool has_second = !vax.second.empty();

    auto move = [&](Field from, Field to, std::size_t c, double amount) {
        dy(from, c) -= amount;
        dy(to, c) += amount;
    };

    for (std::size_t c = 0; c < n; ++c) {
        const double r = r_[c];
        const Severity& sev = severity_[c];

        // Infections: naive pools feed the naive chain, reinfection and
        // breakthrough feed the post chain.
        for (int s = 0; s < kStrains; ++s) {
            const double h = force[s] * r;
            if (h == 0.0) {
                continue;
            }
            const Field I = infected_field(s, false);
            const Field IV = infected_field(s, true);
            auto infect = [&](Field from, Field to) {
                const double amount = h * y(from, c);
                if (pinned) {
                    dy(to, c) += amount;
                } else {
                    move(from, to, c, amount);
                }
            };
            infect(Field::S, I);
            infect(Field::SNV, I);
            infect(Field::SR, IV);
            for (int k = 0; k < 2; ++k) {
                for (int j = 0; j < kBands; ++j) {
                    if (!bands_.immune[k][j][s]) {
                        infect(band_field(k + 1, j), IV);
                    }
                }
            }
        }

        // Disease progression.
        for (int s = 0; s < kStrains; ++s) {
            const double p_hat = s == 0 ? sev.p_td : sev.p_td / P.q21;
            for (int post = 0; post < 2; ++post) {
                const Field I = infected_field(s, post != 0);
                const Field H = hospital_field(s, post != 0);
                const Field T = icu_field(s, post != 0);
                const double p_td = p_td_effective(T_total, P.T_hat, P.theta, post ? p_hat / P.q_post : p_hat);

                const double out_I = P.gamma * y(I, c);
                move(I, H, c, sev.p_ih * out_I);
                move(I, Field::M, c, (1.0 - sev.p_ih) * out_I);
                const double out_H = P.phi * y(H, c);
                move(H, T, c, sev.p_ht * out_H);
                move(H, Field::M, c, (1.0 - sev.p_ht) * out_H);
                const double out_T = P.tau * y(T, c);
                move(T, dead_field(s), c, p_td * out_T);
                move(T, Field::M, c, (1.0 - p_td) * out_T);
            }
        }

        if (P.mu > 0.0) {
            move(Field::M, Field::SR, c, P.mu * y(Field::M, c));
        }

        if (has_first && vax.first[c] > 0.0) {
            for (int j = 0; j < kBands; ++j) {
                if (bands_.width[j] > 0.0) {
                    move(Field::S, band_field(1, j), c, vax.first[c] * bands_.width[j]);
                }
            }
        }
        if (has_second) {
            for (int j = 0; j < kBands; ++j) {
                const double x = vax.second[c * kBands + j];
                if (x > 0.0) {
                    move(band_field(1, j), band_field(2, j), c, x);
                }
            }
        }
    }
}

EpidemicState EpidemicModel::derivative(const EpidemicState& y, double rho, const VaccinationRates& vax) const
{
    EpidemicState dy(classes());
    derivative(y, rho, vax, dy);
    return dy;
}

void EpidemicModel::seed_strain(EpidemicState& y, int strain, double count) const
{
    if (!(count >= 0.0)) {
        throw ParameterError("seed count must be non-negative");
    }
    if (count == 0.0) {
        return;
    }
    const double edges = edge_norm_ / dist_.N();
    if (edges <= 0.0) {
        throw ParameterError("cannot seed a population without contacts");
    }
    std::vector<Field> naive{Field::S, Field::SNV};
    std::vector<Field> post{Field::SR};
    for (int k = 0; k < 2; ++k) {
        for (int j = 0; j < kBands; ++j) {
            if (!bands_.immune[k][j][strain]) {
                post.push_back(band_field(k + 1, j));
            }
        }
    }
    for (std::size_t c = 0; c < classes(); ++c) {
        const double share = count * r_[c] * dist_[c].fraction / edges;
        if (share == 0.0) {
            continue;
        }
        const double available = susceptible_mass(y, bands_, c, strain);
        if (share > available * (1.0 + 1e-12)) {
            throw ParameterError("seed exceeds the available susceptible mass");
        }
        const double frac = std::min(1.0, share / available);
        for (Field f : naive) {
            const double take = frac * y(f, c);
            y(f, c) -= take;
            y(infected_field(strain, false), c) += take;
        }
        for (Field f : post) {
            const double take = frac * y(f, c);
            y(f, c) -= take;
            y(infected_field(strain, true), c) += take;
        }
    }
}

} // namespace epictrl

#pragma once

#include "epictrl/population.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace epictrl {

inline constexpr int kStrains = 2;
inline constexpr int kBands = 5;

/// Compartments tracked per risk class. Strain-specific chains are laid out
/// strain 1 then strain 2. The "post" chain (IV/HV/TV) carries infections of
/// vaccinated or previously-infected people, whose terminal mortality is
/// divided by q_post. V1_b / V2_b are vaccinated people after one / two
/// doses, split into latent protection bands b (see VaccineBands).
enum class Field : std::uint8_t {
    S,   // never dosed, accepts vaccination
    SNV, // refuses vaccination
    SR,  // lost natural immunity
    M,
    I1, H1, T1,
    I2, H2, T2,
    IV1, HV1, TV1,
    IV2, HV2, TV2,
    D1, D2,
    V1_0, V1_1, V1_2, V1_3, V1_4,
    V2_0, V2_1, V2_2, V2_3, V2_4,
    Count
};

inline constexpr std::size_t kFieldCount = static_cast<std::size_t>(Field::Count);

constexpr Field infected_field(int strain, bool post)
{
    return static_cast<Field>(static_cast<int>(post ? Field::IV1 : Field::I1) + 3 * strain);
}
constexpr Field hospital_field(int strain, bool post)
{
    return static_cast<Field>(static_cast<int>(infected_field(strain, post)) + 1);
}
constexpr Field icu_field(int strain, bool post)
{
    return static_cast<Field>(static_cast<int>(infected_field(strain, post)) + 2);
}
constexpr Field dead_field(int strain)
{
    return static_cast<Field>(static_cast<int>(Field::D1) + strain);
}
constexpr Field band_field(int dose, int band)
{
    return static_cast<Field>(static_cast<int>(dose == 1 ? Field::V1_0 : Field::V2_0) + band);
}

std::string_view field_name(Field f);

/// Latent-protection model of an all-or-nothing vaccine with per-strain
/// efficacies. Each vaccinee draws u ~ U(0,1) once; after k doses they are
/// immune to strain s iff u < VE[k][s]. The unit interval is cut at the
/// distinct efficacy values into at most kBands bands; a second dose moves
/// a person to the same band of the dose-2 block.
struct VaccineBands {
    std::array<double, kBands> width{};
    /// immune[dose-1][band][strain]
    std::array<std::array<std::array<bool, kStrains>, kBands>, 2> immune{};

    /// Builds bands from first/second dose efficacy per strain. Requires
    /// 0 <= ve1[s] <= ve2[s] <= 1.
    static VaccineBands from_efficacy(std::array<double, kStrains> ve1, std::array<double, kStrains> ve2);
    /// No vaccine: one band of width 1, never immune.
    static VaccineBands none();
};

/// Rates and capacities of the compartmental dynamics (all per day).
struct EpidemicParams {
    std::array<double, kStrains> sigma{0.0, 0.0};
    double gamma = 1.0 / 8.0;
    double phi = 1.0 / 16.0;
    double tau = 1.0 / 16.0;
    double mu = 0.0;
    double theta = 1.0;
    double T_hat = 1e300; // ICU capacity
    double H_hat = 1e300; // hospital capacity; reported only
    double q21 = 1.0;
    double q_post = 1.0;
    SeverityExponents exponents{};
    /// Large-population mode: infections no longer deplete susceptible
    /// compartments (S_{r,p} stays at its initial value).
    bool pin_susceptibles = false;

    /// Throws ParameterError on negative rates, non-positive gamma/phi/tau,
    /// theta < 1 or q divisors < 1.
    void validate() const;
};

/// Full compartment state, stored field-major: value(f, c) = data[f*n + c].
class EpidemicState {
public:
    EpidemicState() = default;
    explicit EpidemicState(std::size_t n_classes);

    std::size_t classes() const { return n_; }
    double& operator()(Field f, std::size_t c) { return data_[index(f) * n_ + c]; }
    double operator()(Field f, std::size_t c) const { return data_[index(f) * n_ + c]; }

    std::span<double> field(Field f) { return {data_.data() + index(f) * n_, n_}; }
    std::span<const double> field(Field f) const { return {data_.data() + index(f) * n_, n_}; }
    std::span<double> raw() { return data_; }
    std::span<const double> raw() const { return data_; }

    double total(Field f) const;
    /// Sum of every compartment of class c.
    double class_mass(std::size_t c) const;
    double total_mass() const;

    /// All compartments of class c, in Field order.
    std::array<double, kFieldCount> class_state(std::size_t c) const;

    bool operator==(const EpidemicState&) const = default;

private:
    static std::size_t index(Field f) { return static_cast<std::size_t>(f); }
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Dose rates (people/day) fed to the dynamics for one step.
struct VaccinationRates {
    std::vector<double> first;  // xi^(1) per class, split over bands by width
    std::vector<double> second; // xi^(2) per class and band: [c * kBands + b]
    bool empty() const { return first.empty() && second.empty(); }
    double second_total(std::size_t c) const;
};

/// Terminal-stage death probability under ICU congestion. Equals p_hat
/// while T_total <= T_hat; beyond capacity the overflow share dies with
/// probability min(1, theta * p_hat).
double p_td_effective(double T_total, double T_hat, double theta, double p_hat);

/// Population, parameters and vaccine bands bound together, with the
/// per-class constants the right-hand side needs.
class EpidemicModel {
public:
    EpidemicModel(PopulationDistribution dist, EpidemicParams params,
                  VaccineBands bands = VaccineBands::none());

    const PopulationDistribution& distribution() const { return dist_; }
    const EpidemicParams& params() const { return params_; }
    const VaccineBands& bands() const { return bands_; }
    std::size_t classes() const { return dist_.size(); }
    const Severity& severity(std::size_t c) const { return severity_[c]; }
    double edge_normalizer() const { return edge_norm_; } // sum_{r,p} r N f

    /// Everyone susceptible in S except `novax_count` people, spread
    /// uniformly over classes into SNV.
    EpidemicState initial_state(double novax_count = 0.0) const;

    /// Infected edges of one strain: sum r (I + IV).
    double infected_edges(const EpidemicState& y, int strain) const;
    /// Contact-weighted susceptible mass for a strain (S-hat).
    double susceptible_edges(const EpidemicState& y, int strain) const;
    /// sum r^2 times susceptible mass for a strain.
    double susceptible_edges_sq(const EpidemicState& y, int strain) const;

    /// lambda_U for one strain (infections/day before restrictions).
    double uncontrolled_rate(const EpidemicState& y, int strain) const;
    double uncontrolled_rate(const EpidemicState& y) const;

    /// (sigma / (rho gamma)) * sum r^2 S / sum r N f for one strain.
    double effective_reproduction(const EpidemicState& y, double rho, int strain) const;
    /// Strain average weighted by infected edges; strain 1 if none.
    double effective_reproduction(const EpidemicState& y, double rho) const;

    /// Per-strain infection force per unit contact rate: the hazard of an
    /// unprotected person of class c is r_c * force[s].
    std::array<double, kStrains> infection_force(const EpidemicState& y, double rho) const;

    /// Per-capita infection hazard (1/day) on never-vaccinated people of class c.
    std::vector<double> susceptible_hazard(const EpidemicState& y, double rho) const;

    /// Total ICU occupancy across chains and strains.
    double icu_total(const EpidemicState& y) const;
    double hospital_total(const EpidemicState& y) const;

    /// Time derivative of the full system for frozen rho and dose rates.
    /// Every flow is booked as a (-x, +x) pair so per-class sums are zero.
    void derivative(const EpidemicState& y, double rho, const VaccinationRates& vax, EpidemicState& dy) const;
    EpidemicState derivative(const EpidemicState& y, double rho, const VaccinationRates& vax = {}) const;

    /// Moves `count` people of `strain` into infection, split across classes
    /// in proportion to r f and drawn from that class's susceptible
    /// compartments pro rata. Throws ParameterError if a class lacks mass.
    void seed_strain(EpidemicState& y, int strain, double count) const;

private:
    PopulationDistribution dist_;
    EpidemicParams params_;
    VaccineBands bands_;
    std::vector<Severity> severity_;
    std::vector<double> r_;
    double edge_norm_ = 0.0;
};

} // namespace epictrl

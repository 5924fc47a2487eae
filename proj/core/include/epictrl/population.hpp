#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epictrl {

/// One stratum of the joint law f_{r,p}.
struct RiskClass {
    double r = 0.0;        // contacts per day
    double p = 0.0;        // death probability given infection
    double fraction = 0.0; // probability mass
    bool operator==(const RiskClass&) const = default;
};

/// A single row of the contact histogram: `mass` people of `age_bin` with
/// `r` daily contacts.
struct ContactRow {
    std::string age_bin;
    double r = 0.0;
    double mass = 0.0;
};

struct CfrRow {
    std::string age_bin;
    double p = 0.0;
};

/// Discrete joint distribution of contact rate and death probability over
/// a population of size N. Immutable once built; classes keyed by (r, p).
class PopulationDistribution {
public:
    /// Validates the invariants (non-empty, distinct (r,p), fractions
    /// summing to one within 1e-12, N > 0). Throws ParameterError.
    PopulationDistribution(std::vector<RiskClass> classes, double N);

    std::span<const RiskClass> classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }
    const RiskClass& operator[](std::size_t i) const { return classes_[i]; }
    double N() const { return N_; }

    /// Same classes, different population size.
    PopulationDistribution with_size(double N) const;

private:
    std::vector<RiskClass> classes_;
    double N_ = 0.0;
};

/// Severity exponents of the I->H->T->D chain, applied as p^e. The default
/// split p^{1/3} for each stage satisfies p^IH * p^HT * p^TD = p.
struct SeverityExponents {
    double ih = 1.0 / 3.0;
    double ht = 1.0 / 3.0;
    double td = 1.0 / 3.0;
    bool operator==(const SeverityExponents&) const = default;
};

/// Per-class transition probabilities of the severity chain.
struct Severity {
    double p_ih = 0.0;
    double p_ht = 0.0;
    double p_td = 0.0; // uncongested p̂^TD
};

Severity severity_chain(double p, const SeverityExponents& exponents = {});

struct Moments {
    double Er = 0.0;
    double Er2 = 0.0;
    double Erp_IH = 0.0;   // E[r p^IH]
    double Erp_IHHT = 0.0; // E[r p^IH p^HT]
    double Erp = 0.0;      // E[r p]
    double Ep = 0.0;       // E[p]
};

/// Weighted sums over the classes of `dist`.
Moments moments(const PopulationDistribution& dist, const SeverityExponents& exponents = {});

/// Mixes the two age-binned tables into a (r, p) law. Rows with equal
/// (r, p) are merged and zero-mass rows dropped. Throws SchemaError when
/// the age bins of the two tables differ and EmptyDistributionError when
/// all masses are zero.
PopulationDistribution build_joint_distribution(std::span<const ContactRow> contacts,
                                                std::span<const CfrRow> cfr, double N);

/// Reads `contacts.csv` (age_bin,r,mass) and `cfr.csv` (age_bin,p).
PopulationDistribution load_joint_distribution(const std::string& contacts_csv,
                                               const std::string& cfr_csv, double N);

/// Parses CSV text with the same schemas as above.
std::vector<ContactRow> parse_contacts(std::string_view csv_text);
std::vector<CfrRow> parse_cfr(std::string_view csv_text);

/// Writes/reads a built distribution as `r,p,fraction`.
void write_distribution_csv(const PopulationDistribution& dist, const std::string& path);
PopulationDistribution read_distribution_csv(const std::string& path, double N);

/// Synthetic Italy-like law bundled with the library. Its moments are
/// E[r] ~ 12.1, E[r^2]/E[r] ~ 13.5 and E[r p^{2/3}]/E[r p^{1/3}] ~ 0.331.
PopulationDistribution italy_like(double N);

/// (sigma / gamma) * E[r^2] / E[r].
double basic_reproduction_number(double sigma, double gamma, const PopulationDistribution& dist);

/// Transmission rate that yields `target_R0` on `dist`.
double calibrate_sigma(double target_R0, double gamma, const PopulationDistribution& dist);

namespace bundled {
std::string_view italy_like_contacts_csv();
std::string_view italy_like_cfr_csv();
} // namespace bundled

} // namespace epictrl

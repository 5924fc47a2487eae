#include "epictrl/population.hpp"

#include "epictrl/csv.hpp"
#include "epictrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <utility>

namespace epictrl {

PopulationDistribution::PopulationDistribution(std::vector<RiskClass> classes, double N)
    : classes_(std::move(classes))
    , N_(N)
{
    if (!(N_ > 0.0) || !std::isfinite(N_)) {
        throw ParameterError("population size N must be positive");
    }
    if (classes_.empty()) {
        throw EmptyDistributionError("distribution has no classes");
    }
    double total = 0.0;
    std::set<std::pair<double, double>> seen;
    for (const auto& c : classes_) {
        if (!(c.r >= 0.0) || !(c.p >= 0.0 && c.p <= 1.0) || !(c.fraction >= 0.0)) {
            throw ParameterError("risk class out of range (r >= 0, 0 <= p <= 1, fraction >= 0)");
        }
        if (!seen.emplace(c.r, c.p).second) {
            throw ParameterError("duplicate (r, p) class");
        }
        total += c.fraction;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ParameterError("class fractions must sum to 1");
    }
}

PopulationDistribution PopulationDistribution::with_size(double N) const
{
    return PopulationDistribution(classes_, N);
}

Severity severity_chain(double p, const SeverityExponents& e)
{
    return {std::pow(p, e.ih), std::pow(p, e.ht), std::pow(p, e.td)};
}

Moments moments(const PopulationDistribution& dist, const SeverityExponents& exponents)
{
    Moments m;
    for (const auto& c : dist.classes()) {
        const auto sev = severity_chain(c.p, exponents);
        m.Er += c.fraction * c.r;
        m.Er2 += c.fraction * c.r * c.r;
        m.Erp_IH += c.fraction * c.r * sev.p_ih;
        m.Erp_IHHT += c.fraction * c.r * sev.p_ih * sev.p_ht;
        m.Erp += c.fraction * c.r * c.p;
        m.Ep += c.fraction * c.p;
    }
    return m;
}

PopulationDistribution build_joint_distribution(std::span<const ContactRow> contacts,
                                                std::span<const CfrRow> cfr, double N)
{
    std::map<std::string, double> p_by_age;
    for (const auto& row : cfr) {
        if (!(row.p >= 0.0 && row.p <= 1.0)) {
            throw SchemaError("cfr for age bin '" + row.age_bin + "' outside [0,1]");
        }
        if (!p_by_age.emplace(row.age_bin, row.p).second) {
            throw SchemaError("duplicate cfr age bin '" + row.age_bin + "'");
        }
    }
    std::set<std::string> contact_ages;
    for (const auto& row : contacts) {
        contact_ages.insert(row.age_bin);
    }
    std::set<std::string> cfr_ages;
    for (const auto& [age, p] : p_by_age) {
        cfr_ages.insert(age);
    }
    if (contact_ages != cfr_ages) {
        throw SchemaError("contact and cfr tables cover different age bins");
    }

    // Merge rows sharing (r, p); std::map keeps a deterministic order.
    std::map<std::pair<double, double>, double> mass;
    double total = 0.0;
    for (const auto& row : contacts) {
        if (!(row.mass >= 0.0) || !(row.r >= 0.0)) {
            throw SchemaError("negative contact mass or rate in age bin '" + row.age_bin + "'");
        }
        if (row.mass == 0.0) {
            continue;
        }
        mass[{row.r, p_by_age.at(row.age_bin)}] += row.mass;
        total += row.mass;
    }
    if (!(total > 0.0)) {
        throw EmptyDistributionError("contact table has no mass");
    }

    std::vector<RiskClass> classes;
    classes.reserve(mass.size());
    double acc = 0.0;
    for (const auto& [key, m] : mass) {
        classes.push_back({key.first, key.second, m / total});
        acc += m / total;
    }
    // Push the rounding residue into the largest class so the sum is 1.
    auto largest = std::max_element(classes.begin(), classes.end(),
                                    [](const auto& a, const auto& b) { return a.fraction < b.fraction; });
    largest->fraction += 1.0 - acc;
    return PopulationDistribution(std::move(classes), N);
}

std::vector<ContactRow> parse_contacts(std::string_view text)
{
    const auto table = csv::parse(text);
    const auto ia = table.column("age_bin");
    const auto ir = table.column("r");
    const auto im = table.column("mass");
    std::vector<ContactRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& cells : table.rows) {
        rows.push_back({cells[ia], csv::to_double(cells[ir], "contacts.r"),
                        csv::to_double(cells[im], "contacts.mass")});
    }
    return rows;
}

std::vector<CfrRow> parse_cfr(std::string_view text)
{
    const auto table = csv::parse(text);
    const auto ia = table.column("age_bin");
    const auto ip = table.column("p");
    std::vector<CfrRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& cells : table.rows) {
        rows.push_back({cells[ia], csv::to_double(cells[ip], "cfr.p")});
    }
    return rows;
}

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SchemaError("cannot open '" + path + "'");
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

PopulationDistribution load_joint_distribution(const std::string& contacts_csv, const std::string& cfr_csv,
                                               double N)
{
    const auto contacts = parse_contacts(slurp(contacts_csv));
    const auto cfr = parse_cfr(slurp(cfr_csv));
    return build_joint_distribution(contacts, cfr, N);
}

void write_distribution_csv(const PopulationDistribution& dist, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SchemaError("cannot write '" + path + "'");
    }
    out << "r,p,fraction\n";
    for (const auto& c : dist.classes()) {
        out << csv::format_double(c.r) << ',' << csv::format_double(c.p) << ','
            << csv::format_double(c.fraction) << '\n';
    }
}

PopulationDistribution read_distribution_csv(const std::string& path, double N)
{
    const auto table = csv::read_file(path);
    const auto ir = table.column("r");
    const auto ip = table.column("p");
    const auto iff = table.column("fraction");
    std::vector<RiskClass> classes;
    for (const auto& cells : table.rows) {
        classes.push_back({csv::to_double(cells[ir], "r"), csv::to_double(cells[ip], "p"),
                           csv::to_double(cells[iff], "fraction")});
    }
    return PopulationDistribution(std::move(classes), N);
}

PopulationDistribution italy_like(double N)
{
    static const auto contacts = parse_contacts(bundled::italy_like_contacts_csv());
    static const auto cfr = parse_cfr(bundled::italy_like_cfr_csv());
    return build_joint_distribution(contacts, cfr, N);
}

double basic_reproduction_number(double sigma, double gamma, const PopulationDistribution& dist)
{
    if (!(gamma > 0.0)) {
        throw ParameterError("gamma must be positive");
    }
    if (!(sigma >= 0.0)) {
        throw ParameterError("sigma must be non-negative");
    }
    const auto m = moments(dist);
    if (!(m.Er > 0.0)) {
        throw ParameterError("degenerate distribution: E[r] = 0");
    }
    return sigma / gamma * m.Er2 / m.Er;
}

double calibrate_sigma(double target_R0, double gamma, const PopulationDistribution& dist)
{
    if (!(target_R0 > 0.0)) {
        throw ParameterError("target R0 must be positive");
    }
    if (!(gamma > 0.0)) {
        throw ParameterError("gamma must be positive");
    }
    const auto m = moments(dist);
    if (!(m.Er > 0.0) || !(m.Er2 > 0.0)) {
        throw ParameterError("degenerate distribution: E[r] = 0");
    }
    return target_R0 * gamma * m.Er / m.Er2;
}

} // namespace epictrl

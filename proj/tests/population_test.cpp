#include "epictrl/errors.hpp"
#include "epictrl/population.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

using namespace epictrl;

namespace {

PopulationDistribution random_distribution(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<RiskClass> cls;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        cls.push_back({30.0 * u(rng) + 0.1 * i, 0.2 * u(rng), u(rng) + 0.01});
        total += cls.back().fraction;
    }
    double acc = 0.0;
    for (int i = 0; i + 1 < n; ++i) acc += (cls[i].fraction /= total);
    cls.back().fraction = 1.0 - acc;
    return PopulationDistribution(cls, 1e6);
}

} // namespace

TEST(Population, RejectsInvalidClasses)
{
    EXPECT_THROW(PopulationDistribution({}, 10.0), EmptyDistributionError);
    EXPECT_THROW(PopulationDistribution({{1, 0.1, 1.0}}, 0.0), ParameterError);
    EXPECT_THROW(PopulationDistribution({{-1, 0.1, 1.0}}, 1.0), ParameterError);
    EXPECT_THROW(PopulationDistribution({{1, 1.5, 1.0}}, 1.0), ParameterError);
    EXPECT_THROW(PopulationDistribution({{1, 0.1, 0.5}, {1, 0.1, 0.5}}, 1.0), ParameterError);
    EXPECT_THROW(PopulationDistribution({{1, 0.1, 0.5}, {2, 0.1, 0.4}}, 1.0), ParameterError);
}

TEST(Population, SingleCellTable)
{
    const std::vector<ContactRow> contacts{{"0-9", 4.0, 12.0}};
    const std::vector<CfrRow> cfr{{"0-9", 0.01}};
    const auto d = build_joint_distribution(contacts, cfr, 100.0);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].r, 4.0);
    EXPECT_EQ(d[0].p, 0.01);
    EXPECT_EQ(d[0].fraction, 1.0);
}

TEST(Population, MassesNormalize)
{
    const std::vector<ContactRow> contacts{{"young", 10.0, 3.0}, {"old", 4.0, 1.0}};
    const std::vector<CfrRow> cfr{{"young", 0.001}, {"old", 0.1}};
    const auto d = build_joint_distribution(contacts, cfr, 100.0);
    ASSERT_EQ(d.size(), 2u);
    double sum = 0.0;
    for (const auto& c : d.classes()) {
        sum += c.fraction;
        EXPECT_DOUBLE_EQ(c.fraction, c.r == 10.0 ? 0.75 : 0.25);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Population, MergesEqualCellsAndDropsZeroMass)
{
    const std::vector<ContactRow> contacts{{"a", 5.0, 1.0}, {"b", 5.0, 1.0}, {"a", 7.0, 0.0}};
    const std::vector<CfrRow> cfr{{"a", 0.02}, {"b", 0.02}};
    const auto d = build_joint_distribution(contacts, cfr, 1.0);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].fraction, 1.0);
}

TEST(Population, TableErrors)
{
    const std::vector<ContactRow> contacts{{"a", 5.0, 1.0}};
    const std::vector<CfrRow> other{{"b", 0.02}};
    EXPECT_THROW(build_joint_distribution(contacts, other, 1.0), SchemaError);
    const std::vector<ContactRow> zero{{"a", 5.0, 0.0}};
    const std::vector<CfrRow> cfr{{"a", 0.02}};
    EXPECT_THROW(build_joint_distribution(zero, cfr, 1.0), EmptyDistributionError);
    const std::vector<ContactRow> negative{{"a", 5.0, -1.0}};
    EXPECT_THROW(build_joint_distribution(negative, cfr, 1.0), SchemaError);
    EXPECT_THROW(parse_contacts("age_bin,mass\na,1\n"), SchemaError);
    EXPECT_THROW(parse_cfr("age_bin,p\na,zz\n"), SchemaError);
}

TEST(Population, BundledTablesCoverAgeGridAndContactRange)
{
    const auto contacts = parse_contacts(bundled::italy_like_contacts_csv());
    const auto cfr = parse_cfr(bundled::italy_like_cfr_csv());
    std::set<std::string> ages;
    std::set<double> rs;
    for (const auto& row : contacts) {
        ages.insert(row.age_bin);
        rs.insert(row.r);
        EXPECT_GE(row.r, 0.0);
        EXPECT_LE(row.r, 30.0);
    }
    EXPECT_EQ(ages.size(), cfr.size());
    const auto d = italy_like(60e6);
    EXPECT_LE(d.size(), ages.size() * rs.size());
    double sum = 0.0;
    for (const auto& c : d.classes()) sum += c.fraction;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Population, MomentsByHand)
{
    PopulationDistribution point({{2.0, 0.008, 1.0}}, 10.0);
    auto m = moments(point);
    EXPECT_DOUBLE_EQ(m.Er, 2.0);
    EXPECT_DOUBLE_EQ(m.Er2, 4.0);
    EXPECT_NEAR(m.Erp_IH, 2.0 * 0.2, 1e-15);
    EXPECT_NEAR(m.Erp_IHHT, 2.0 * 0.04, 1e-15);

    PopulationDistribution two({{1.0, 0.0, 0.5}, {3.0, 0.0, 0.5}}, 10.0);
    m = moments(two);
    EXPECT_DOUBLE_EQ(m.Er, 2.0);
    EXPECT_DOUBLE_EQ(m.Er2, 5.0);
    EXPECT_EQ(m.Erp_IH, 0.0);
}

TEST(Population, SyntheticMomentsHitTargets)
{
    const auto m = moments(italy_like(60e6));
    EXPECT_NEAR(m.Er, 12.1, 0.05);
    EXPECT_NEAR(m.Er2 / m.Er, 13.5, 0.05);
    EXPECT_NEAR(m.Erp_IHHT / m.Erp_IH, 0.331, 0.002);
}

TEST(Population, SeverityChainMultipliesToP)
{
    for (double p : {0.0, 1e-5, 0.01, 0.3, 1.0}) {
        const auto s = severity_chain(p);
        EXPECT_NEAR(s.p_ih * s.p_ht * s.p_td, p, 1e-12);
        EXPECT_NEAR(s.p_ih, std::cbrt(p), 1e-15);
    }
}

TEST(Population, ReproductionNumber)
{
    PopulationDistribution single({{7.0, 0.01, 1.0}}, 1.0);
    EXPECT_NEAR(basic_reproduction_number(0.1, 0.125, single), 0.1 * 7.0 / 0.125, 1e-12);
    PopulationDistribution two({{1.0, 0.0, 0.5}, {3.0, 0.0, 0.5}}, 10.0);
    EXPECT_DOUBLE_EQ(basic_reproduction_number(0.2, 0.2, two), 2.5);
    EXPECT_THROW(basic_reproduction_number(0.1, 0.0, two), ParameterError);
    EXPECT_THROW(basic_reproduction_number(-0.1, 0.1, two), ParameterError);
}

TEST(Population, CalibrationInvertsR0)
{
    const auto d = italy_like(60e6);
    const auto m = moments(d);
    const double s6 = calibrate_sigma(6.0, 0.125, d);
    EXPECT_NEAR(s6, 6.0 * 0.125 * m.Er / m.Er2, 1e-15);
    EXPECT_NEAR(calibrate_sigma(12.0, 0.125, d), 2.0 * s6, 1e-15);
    EXPECT_THROW(calibrate_sigma(0.0, 0.125, d), ParameterError);
    PopulationDistribution idle({{0.0, 0.1, 1.0}}, 1.0);
    EXPECT_THROW(calibrate_sigma(2.0, 0.125, idle), ParameterError);
}

TEST(PopulationProperty, RandomDistributions)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 20.0);
    for (int k = 0; k < 200; ++k) {
        const auto d = random_distribution(rng, 1 + k % 17);
        double sum = 0.0;
        for (const auto& c : d.classes()) sum += c.fraction;
        EXPECT_NEAR(sum, 1.0, 1e-12);
        const auto m = moments(d);
        EXPECT_GE(m.Er2 / m.Er, m.Er * (1.0 - 1e-14));
        const double R0 = u(rng);
        const double gamma = 1.0 / u(rng);
        const double sigma = calibrate_sigma(R0, gamma, d);
        EXPECT_NEAR(basic_reproduction_number(sigma, gamma, d), R0, 1e-12 * R0);
    }
}

TEST(Population, DistributionCsvRoundTrip)
{
    const auto d = italy_like(1e6);
    const auto path = std::filesystem::temp_directory_path() / "epictrl_dist_roundtrip.csv";
    write_distribution_csv(d, path.string());
    const auto back = read_distribution_csv(path.string(), 1e6);
    ASSERT_EQ(back.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(back[i], d[i]);
    std::filesystem::remove(path);
}

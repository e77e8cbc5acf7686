#include <gtest/gtest.h>

#include <random>

#include "mgseir/mgseir.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mgseir;

TEST(InstantaneousLoss, NothingToLoseWithoutShieldingOrDisease) {
    ModelParams p = germany_baseline();
    p.initial_exposed_share = 0.0;
    for (const auto& b : instantaneous_loss(initial_state(p), Levels{}, p)) EXPECT_EQ(b.total(), 0.0);
}

TEST(InstantaneousLoss, FullPassportsRemoveRecoveredTerm) {
    std::mt19937_64 rng(3);
    ModelParams p = germany_baseline();
    ModelState s;
    for (auto& c : s.groups) c = {0.1, 0.02, 0.03, 0.1, 0.0};
    for (int i = 0; i < 10; ++i) {
        const Levels L{testsupport::uniform(rng, 0, 1), testsupport::uniform(rng, 0, 1), testsupport::uniform(rng, 0, 1)};
        for (const auto& b : instantaneous_loss(s, L, p)) EXPECT_EQ(b.recovered_shielding, 0.0);
    }
}

TEST(InstantaneousLoss, SusceptibleShieldingHandCase) {
    ModelParams p = germany_baseline();
    ModelState s;
    s.groups[0].S = 0.4;
    const auto b = instantaneous_loss(s, Levels{0.5, 0.0, 0.0}, p);
    EXPECT_NEAR(b[0].susceptible_shielding, 0.14, 1e-15);
}

TEST(InstantaneousLoss, TermsByHand) {
    ModelParams p = germany_baseline();
    GroupParams& g = p.group(GroupId::middle);
    g.immunity_passport = 0.25;
    g.undetected_exposed = 0.8;
    ModelState s;
    s.groups[1] = {0.1, 0.02, 0.03, 0.05, 0.0};
    const double L = 0.6;
    const auto b = instantaneous_loss(s, Levels{0.0, L, 0.0}, p)[1];
    const double lost = 0.7 * g.income;
    EXPECT_NEAR(b.susceptible_shielding, lost * 0.1 * L, 1e-15);
    EXPECT_NEAR(b.exposed, lost * 0.02 * (1.0 - 0.8 * (1.0 - L)), 1e-15);
    EXPECT_NEAR(b.infectious, lost * 0.03 * (1.0 - 0.8 * 0.9 * (1.0 - L)), 1e-15);
    EXPECT_NEAR(b.recovered_shielding, lost * 0.75 * 0.05 * L, 1e-15);
    const double dd = g.baseline_death_rate * (1.0 + p.mortality_lambda * icu_load(s, p));
    EXPECT_NEAR(b.death_productivity, g.income * g.remaining_employment * g.icu_share * dd * 0.03, 1e-15);
}

TEST(TotalLoss, ConstantFullShieldingClosedForm) {
    ModelParams p = germany_baseline();
    p.initial_exposed_share = 0.0;
    const auto tr = integrate(p, PolicySchedule::constant(Family::uniform, p.horizon, 13, 1.0), 0.25);
    double wn = 0.0;
    for (const auto& g : p.groups) wn += g.income * g.population_share;
    EXPECT_NEAR(total_economic_loss(tr), 0.7 * wn * p.horizon, 1e-9);
    EXPECT_NEAR(loss_gdp_years(total_economic_loss(tr), p), 0.7 * 546.0 / 365.0, 1e-12);
    EXPECT_NEAR(loss_pct_gdp(total_economic_loss(tr), p), 70.0 * 546.0 / 365.0, 1e-9);
}

TEST(TotalLoss, ZeroWhenDiseaseFreeAndOpen) {
    ModelParams p = germany_baseline();
    p.initial_exposed_share = 0.0;
    const auto tr = integrate(p, PolicySchedule::zero(Family::uniform, p.horizon, 13), 0.25);
    EXPECT_EQ(total_economic_loss(tr), 0.0);
    EXPECT_EQ(objective(tr, 1e6), 0.0);
}

TEST(TotalMortality, TrapezoidOracleOverIcuSeries) {
    const ModelParams p = germany_baseline();
    std::mt19937_64 rng(11);
    const auto pol = testsupport::random_policy(rng, Family::fully_targeted, p.horizon, 13);
    const auto tr = integrate(p, pol, 0.25);
    std::vector<double> flow(tr.states.size());
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        const ModelState& s = i + 1 == tr.states.size() ? tr.pre_terminal : tr.states[i];
        const double h = tr.icu[i];
        double f = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            const auto& g = p.groups[j];
            f += std::min(g.baseline_death_rate * (1.0 + p.mortality_lambda * h), g.infectious_exit) * g.icu_share *
                 s.groups[j].I;
        }
        flow[i] = f;
    }
    EXPECT_NEAR(total_mortality(tr), oracle::trapezoid(flow, 0.25), 1e-6);
}

TEST(TotalMortality, NonDecreasingAlongTrajectory) {
    const ModelParams p = germany_baseline();
    const auto tr = integrate(p, PolicySchedule::zero(Family::uniform, p.horizon, 13), 0.25);
    double prev = 0.0;
    for (const auto& s : tr.states) {
        const double m = total_mortality(s);
        EXPECT_GE(m, prev);
        prev = m;
    }
}

TEST(Objective, LinearInChi) {
    const ModelParams p = germany_baseline();
    const auto tr = integrate(p, PolicySchedule::constant(Family::uniform, p.horizon, 13, 0.3), 0.25);
    EXPECT_EQ(objective(tr, 0.0), total_economic_loss(tr));
    const double a = 1234.5, b = 987.0;
    EXPECT_NEAR(objective(tr, a) + objective(tr, b), objective(tr, a + b) + objective(tr, 0.0), 1e-9);
    EXPECT_THROW(objective(tr, -1.0), std::invalid_argument);
}

TEST(LossBreakdown, IntegralsAddUpToTotal) {
    const ModelParams p = germany_baseline();
    std::mt19937_64 rng(17);
    const auto tr = integrate(p, testsupport::random_policy(rng, Family::semi_targeted, p.horizon, 13), 0.25);
    double sum = 0.0;
    for (const auto& b : loss_breakdown_integrals(tr, p)) sum += b.total();
    EXPECT_NEAR(sum, total_economic_loss(tr), 1e-4 * total_economic_loss(tr));
}

TEST(Gdp, AnnualOutput) {
    const ModelParams p = germany_baseline();
    EXPECT_NEAR(annual_gdp(p), (0.46 + 0.28 + 0.26 * 0.085) * 365.0, 1e-12);
}

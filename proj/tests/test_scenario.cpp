#include <gtest/gtest.h>

#include "mgseir/mgseir.hpp"

using namespace mgseir;
using namespace mgseir::transform;

namespace {

ModelParams named(const std::string& name) {
    const auto s = find_scenario(name);
    EXPECT_TRUE(s.has_value()) << name;
    return apply_scenario(germany_baseline(), *s);
}

}  // namespace

TEST(ApplyScenario, EmptySpecIsIdentity) {
    const ModelParams base = germany_baseline();
    EXPECT_EQ(apply_scenario(base, ScenarioSpec{}), base);
}

TEST(ApplyScenario, TestingAndTracing) {
    const ModelParams p = apply_scenario(germany_baseline(), {"tt", {Testing{0.8}, Tracing{0.8}}});
    for (const auto& g : p.groups) {
        EXPECT_EQ(g.undetected_infectious, 0.8);
        EXPECT_EQ(g.undetected_exposed, 0.8);
    }
}

TEST(ApplyScenario, ComprehensiveWithWorkFromHome) {
    const ModelParams p = named("comprehensive_wfh");
    for (const auto& g : p.groups) {
        EXPECT_EQ(g.undetected_infectious, 0.7);
        EXPECT_EQ(g.undetected_exposed, 0.8);
        EXPECT_EQ(g.shielded_productivity, 0.4);
    }
    EXPECT_NEAR(p.contacts(GroupId::young, GroupId::young), 0.75 * 0.8, 1e-15);
    EXPECT_NEAR(p.contacts(GroupId::middle, GroupId::middle), 0.45 * 0.8, 1e-15);
    EXPECT_NEAR(p.contacts(GroupId::young, GroupId::middle), 0.375 * 0.8, 1e-15);
    EXPECT_EQ(p.contacts(GroupId::young, GroupId::senior), 0.2);
    EXPECT_EQ(p.contacts(GroupId::senior, GroupId::middle), 0.2);
    EXPECT_NEAR(p.contacts(GroupId::senior, GroupId::senior), 0.375, 1e-15);
}

TEST(ApplyScenario, ComprehensiveSetsAbsoluteSeniorContacts) {
    const ModelParams p = named("comprehensive");
    EXPECT_EQ(p.contacts(GroupId::young, GroupId::senior), 0.2);
    EXPECT_EQ(p.contacts(GroupId::middle, GroupId::senior), 0.2);
    EXPECT_EQ(p.contacts(GroupId::young, GroupId::young), 0.75);
}

TEST(ApplyScenario, WorkFromHomeThenTargetedMultiplies) {
    const ModelParams base = germany_baseline();
    const ModelParams p = apply_scenario(base, {"", {WorkFromHome{0.2, 0.05, 0.4}, TargetedDistancing{0.5}}});
    EXPECT_NEAR(p.contacts(GroupId::young, GroupId::senior), 0.3 * 0.95 * 0.5, 1e-15);
    EXPECT_NEAR(p.contacts(GroupId::middle, GroupId::senior), 0.3 * 0.95 * 0.5, 1e-15);
}

TEST(ApplyScenario, PiAsFactorSwitch) {
    const ModelParams p = apply_scenario(germany_baseline(), {"", {WorkFromHome{0.2, 0.05, 0.4, true}}});
    EXPECT_NEAR(p.contacts(GroupId::young, GroupId::young), 0.75 * 0.2, 1e-15);
    EXPECT_NEAR(p.contacts(GroupId::young, GroupId::senior), 0.3 * 0.05, 1e-15);
}

TEST(ApplyScenario, DoesNotMutateInputOrBeta) {
    const ModelParams base = germany_baseline();
    const ModelParams copy = base;
    const ModelParams p = named("uniform_distancing_30");
    EXPECT_EQ(base, copy);
    EXPECT_EQ(p.beta, base.beta);
    EXPECT_NEAR(p.contacts(GroupId::young, GroupId::young), 0.75 * 0.7, 1e-15);
}

TEST(ApplyScenario, OrderMatters) {
    const ModelParams base = germany_baseline();
    const auto a = apply_scenario(base, {"", {SeniorContactLevel{0.2}, TargetedDistancing{0.5}}});
    const auto b = apply_scenario(base, {"", {TargetedDistancing{0.5}, SeniorContactLevel{0.2}}});
    EXPECT_EQ(a.contacts(GroupId::young, GroupId::senior), 0.1);
    EXPECT_EQ(b.contacts(GroupId::young, GroupId::senior), 0.2);
}

TEST(ApplyScenario, InvalidArgumentsRejected) {
    EXPECT_THROW(apply_scenario(germany_baseline(), {"bad", {UniformDistancing{1.5}}}), ConfigError);
    EXPECT_THROW(apply_scenario(germany_baseline(), {"bad", {VaccineAt{0.0}}}), ConfigError);
    EXPECT_THROW(apply_scenario(germany_baseline(), {"bad", {Testing{-0.1}}}), ConfigError);
    EXPECT_THROW(apply_scenario(germany_baseline(), {"bad", {SeniorMortality{-0.5}}}), ConfigError);
}

TEST(Catalog, NamedEntries) {
    EXPECT_NEAR(named("treatment_50").group(GroupId::senior).baseline_death_rate, 0.03, 1e-15);
    EXPECT_EQ(named("vaccine_182").horizon, 182.0);
    EXPECT_EQ(named("rho_1.0").contacts, reference_contact_matrix());
    EXPECT_NEAR(named("rho_0.9").contacts(GroupId::young, GroupId::young), 0.9, 1e-15);
    EXPECT_EQ(named("kappa_0").groups[1].immunity_passport, 0.0);
    // 0.12 exceeds the senior exit rate 1/9, where the ICU death rate saturates.
    EXPECT_EQ(named("senior_mortality_0.12").group(GroupId::senior).baseline_death_rate, 1.0 / 9.0);
    EXPECT_EQ(named("icu_cap_0.03").icu_cap, 0.03);
    EXPECT_EQ(named("lambda_0.2").mortality_lambda, 0.2);
    EXPECT_NEAR(named("targeted_distancing_30").contacts(GroupId::young, GroupId::senior), 0.21, 1e-15);
}

TEST(Catalog, EveryEntryValidates) {
    for (const auto& s : scenario_catalog()) {
        EXPECT_TRUE(scenario_problems(s).empty()) << s.name;
        EXPECT_NO_THROW(apply_scenario(germany_baseline(), s)) << s.name;
    }
}

TEST(Catalog, NamesAreUnique) {
    const auto& c = scenario_catalog();
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) EXPECT_NE(c[i].name, c[j].name);
}

TEST(ResolveNames, Composition) {
    const ScenarioSpec s = resolve_scenario_names("testing_0.7+uniform_distancing_30");
    EXPECT_EQ(s.name, "testing_0.7+uniform_distancing_30");
    ASSERT_EQ(s.transforms.size(), 2u);
    const ModelParams p = apply_scenario(germany_baseline(), s);
    EXPECT_EQ(p.groups[0].undetected_infectious, 0.7);
    EXPECT_NEAR(p.contacts(GroupId::young, GroupId::young), 0.525, 1e-15);
    EXPECT_THROW(resolve_scenario_names("testing_0.7+nope"), ConfigError);
}

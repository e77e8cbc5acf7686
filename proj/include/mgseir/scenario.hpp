#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "mgseir/model.hpp"

namespace mgseir {

/// Scenario transforms. Each one edits a copy of the parameters.
namespace transform {

struct Testing {            // eta^I for all groups
    double eta_infectious;
};
struct Tracing {            // eta^E for all groups
    double eta_exposed;
};
struct UniformDistancing {  // every rho entry times factor
    double factor;
};
struct TargetedDistancing { // rho_ys, rho_ms times factor
    double factor;
};
struct WithinSeniorDistancing {  // rho_ss times factor
    double factor;
};
struct SeniorContactLevel { // rho_ys = rho_ms = value (absolute)
    double value;
};
struct ReferenceContacts {  // rebuild contacts as scale * rho^0
    double scale;
};
/// Working from home. By default pi1/pi2 are reductions (factor 1 - pi);
/// with pi_is_factor they are used as the factors themselves.
struct WorkFromHome {
    double pi_working;  // rho_yy, rho_mm, rho_ym
    double pi_senior;   // rho_ys, rho_ms
    double shielded_productivity;
    bool pi_is_factor = false;
};
struct Treatment {          // senior baseline death rate times (1 - reduction)
    double reduction;
};
struct VaccineAt {
    double days;
};
struct SetLambda {
    double lambda;
};
struct IcuCap {
    double cap;
};
struct Immunity {           // kappa for all groups
    double kappa;
};
/// Senior baseline death rate, capped at the senior infectious exit rate.
/// Above the cap the ICU death rate is clamped to the exit rate anyway, so
/// the cap leaves the dynamics unchanged and keeps the parameters valid.
struct SeniorMortality {
    double rate;
};

}  // namespace transform

using Transform =
    std::variant<transform::Testing, transform::Tracing, transform::UniformDistancing, transform::TargetedDistancing,
                 transform::WithinSeniorDistancing, transform::SeniorContactLevel, transform::ReferenceContacts,
                 transform::WorkFromHome, transform::Treatment, transform::VaccineAt, transform::SetLambda,
                 transform::IcuCap, transform::Immunity, transform::SeniorMortality>;

/// Ordered list of transforms; order matters.
struct ScenarioSpec {
    std::string name;
    std::vector<Transform> transforms;

    ScenarioSpec then(const ScenarioSpec& other) const {
        ScenarioSpec out{name.empty() ? other.name : other.name.empty() ? name : name + "+" + other.name, transforms};
        out.transforms.insert(out.transforms.end(), other.transforms.begin(), other.transforms.end());
        return out;
    }
};

namespace detail {

inline void check_unit(std::vector<std::string>& errs, std::string_view what, double v) {
    if (!(v >= 0.0 && v <= 1.0)) errs.push_back(std::string(what) + " must lie in [0,1], got " + format_double(v));
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace detail

/// Argument problems of a scenario, empty when well formed.
inline std::vector<std::string> scenario_problems(const ScenarioSpec& spec) {
    using namespace transform;
    std::vector<std::string> errs;
    for (const Transform& t : spec.transforms) {
        std::visit(detail::Overloaded{
                       [&](const Testing& x) { detail::check_unit(errs, "testing.eta_I", x.eta_infectious); },
                       [&](const Tracing& x) { detail::check_unit(errs, "tracing.eta_E", x.eta_exposed); },
                       [&](const UniformDistancing& x) { detail::check_unit(errs, "uniform_distancing.factor", x.factor); },
                       [&](const TargetedDistancing& x) { detail::check_unit(errs, "targeted_distancing.factor", x.factor); },
                       [&](const WithinSeniorDistancing& x) {
                           detail::check_unit(errs, "within_senior_distancing.factor", x.factor);
                       },
                       [&](const SeniorContactLevel& x) {
                           if (!(x.value >= 0.0)) errs.push_back("senior_contact_level.value must be >= 0");
                       },
                       [&](const ReferenceContacts& x) { detail::check_unit(errs, "reference_contacts.scale", x.scale); },
                       [&](const WorkFromHome& x) {
                           detail::check_unit(errs, "wfh.pi1", x.pi_working);
                           detail::check_unit(errs, "wfh.pi2", x.pi_senior);
                           detail::check_unit(errs, "wfh.xi", x.shielded_productivity);
                       },
                       [&](const Treatment& x) { detail::check_unit(errs, "treatment.reduction", x.reduction); },
                       [&](const VaccineAt& x) {
                           if (!(x.days > 0.0)) errs.push_back("vaccine_at.days must be > 0");
                       },
                       [&](const SetLambda& x) {
                           if (!(x.lambda >= 0.0)) errs.push_back("set_lambda.lambda must be >= 0");
                       },
                       [&](const IcuCap& x) {
                           if (!(x.cap > 0.0)) errs.push_back("icu_cap.cap must be > 0");
                       },
                       [&](const Immunity& x) { detail::check_unit(errs, "immunity.kappa", x.kappa); },
                       [&](const SeniorMortality& x) {
                           if (!(x.rate >= 0.0)) errs.push_back("senior_mortality.rate must be >= 0");
                       },
                   },
                   t);
    }
    return errs;
}

/// Applies the transforms left to right to a copy of `base`. Beta is left
/// alone: scenarios change conditions, not the virus. Throws ConfigError if
/// the spec or the resulting parameters are invalid.
inline ModelParams apply_scenario(const ModelParams& base, const ScenarioSpec& spec) {
    using namespace transform;
    if (auto errs = scenario_problems(spec); !errs.empty()) {
        std::string msg = "invalid scenario '" + spec.name + "':";
        for (const auto& e : errs) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    ModelParams p = base;
    auto all_groups = [&](auto&& fn) {
        for (auto& g : p.groups) fn(g);
    };
    for (const Transform& t : spec.transforms) {
        std::visit(
            detail::Overloaded{
                [&](const Testing& x) { all_groups([&](GroupParams& g) { g.undetected_infectious = x.eta_infectious; }); },
                [&](const Tracing& x) { all_groups([&](GroupParams& g) { g.undetected_exposed = x.eta_exposed; }); },
                [&](const UniformDistancing& x) { p.contacts = scale_contacts(p.contacts, ContactMask::all(), x.factor); },
                [&](const TargetedDistancing& x) {
                    p.contacts = scale_contacts(p.contacts, ContactMask::senior_cross(), x.factor);
                },
                [&](const WithinSeniorDistancing& x) {
                    p.contacts = scale_contacts(p.contacts, ContactMask::within_senior(), x.factor);
                },
                [&](const SeniorContactLevel& x) {
                    for (GroupId g : {GroupId::young, GroupId::middle}) {
                        p.contacts(g, GroupId::senior) = x.value;
                        p.contacts(GroupId::senior, g) = x.value;
                    }
                },
                [&](const ReferenceContacts& x) {
                    p.contacts = scale_contacts(p.reference_contacts, ContactMask::all(), x.scale);
                },
                [&](const WorkFromHome& x) {
                    const double f1 = x.pi_is_factor ? x.pi_working : 1.0 - x.pi_working;
                    const double f2 = x.pi_is_factor ? x.pi_senior : 1.0 - x.pi_senior;
                    p.contacts = scale_contacts(p.contacts, ContactMask::working_age(), f1);
                    p.contacts = scale_contacts(p.contacts, ContactMask::senior_cross(), f2);
                    all_groups([&](GroupParams& g) { g.shielded_productivity = x.shielded_productivity; });
                },
                [&](const Treatment& x) { p.group(GroupId::senior).baseline_death_rate *= 1.0 - x.reduction; },
                [&](const VaccineAt& x) { p.horizon = x.days; },
                [&](const SetLambda& x) { p.mortality_lambda = x.lambda; },
                [&](const IcuCap& x) { p.icu_cap = x.cap; },
                [&](const Immunity& x) { all_groups([&](GroupParams& g) { g.immunity_passport = x.kappa; }); },
                [&](const SeniorMortality& x) {
                    GroupParams& s = p.group(GroupId::senior);
                    s.baseline_death_rate = std::min(x.rate, s.infectious_exit);
                },
            },
            t);
    }
    require_valid(p);
    return p;
}

/// Named scenarios covering the published analyses.
inline const std::vector<ScenarioSpec>& scenario_catalog() {
    using namespace transform;
    static const std::vector<ScenarioSpec> catalog = [] {
        std::vector<ScenarioSpec> c;
        auto add = [&](std::string name, std::vector<Transform> ts) { c.push_back({std::move(name), std::move(ts)}); };
        auto pct = [](int v) { return std::to_string(v); };

        add("baseline", {});
        for (int v : {10, 20, 30, 40}) add("uniform_distancing_" + pct(v), {UniformDistancing{1.0 - v / 100.0}});
        for (int v : {10, 30, 50}) add("targeted_distancing_" + pct(v), {TargetedDistancing{1.0 - v / 100.0}});
        for (auto [name, eta] : {std::pair{"0.9", 0.9}, {"0.8", 0.8}, {"0.7", 0.7}}) {
            add(std::string("testing_") + name, {Testing{eta}});
            add(std::string("tracing_") + name, {Tracing{eta}});
        }
        add("test_trace_0.8_0.8", {Testing{0.8}, Tracing{0.8}});
        add("test_trace_0.7_0.8", {Testing{0.7}, Tracing{0.8}});
        add("test_trace_0.7_0.7", {Testing{0.7}, Tracing{0.7}});
        add("wfh_v1", {WorkFromHome{0.20, 0.05, 0.4}});
        add("wfh_v2", {WorkFromHome{0.30, 0.10, 0.4}});
        // rho_ys = rho_ms = 0.2 is read as an absolute level, not a factor.
        add("comprehensive", {Testing{0.7}, Tracing{0.8}, SeniorContactLevel{0.2}});
        // WFH goes first so the senior cross contacts end at exactly 0.2.
        add("comprehensive_wfh", {Testing{0.7}, Tracing{0.8}, WorkFromHome{0.20, 0.05, 0.4}, SeniorContactLevel{0.2}});
        add("treatment_30", {Treatment{0.3}});
        add("treatment_50", {Treatment{0.5}});
        add("vaccine_546", {VaccineAt{546}});
        add("vaccine_364", {VaccineAt{364}});
        add("vaccine_182", {VaccineAt{182}});
        for (auto [name, l] : {std::pair{"0.2", 0.2}, {"0.4", 0.4}, {"0.6", 0.6}, {"0.8", 0.8}, {"1.0", 1.0}})
            add(std::string("lambda_") + name, {SetLambda{l}});
        for (auto [name, h] : {std::pair{"0.02", 0.02}, {"0.03", 0.03}, {"0.04", 0.04}})
            add(std::string("icu_cap_") + name, {IcuCap{h}});
        add("rho_0.9", {ReferenceContacts{0.9}});
        add("rho_1.0", {ReferenceContacts{1.0}});
        add("kappa_0", {Immunity{0.0}});
        add("senior_mortality_0.12", {SeniorMortality{0.12}});
        add("within_senior_distancing_50", {WithinSeniorDistancing{0.5}});
        add("gd_uniform_40_treatment_50", {UniformDistancing{0.6}, Treatment{0.5}});
        add("gd_targeted_50_treatment_50", {TargetedDistancing{0.5}, Treatment{0.5}});
        return c;
    }();
    return catalog;
}

inline std::optional<ScenarioSpec> find_scenario(std::string_view name) {
    for (const auto& s : scenario_catalog())
        if (s.name == name) return s;
    return std::nullopt;
}

/// Resolves "a+b+c" catalog shorthand into one composed scenario.
inline ScenarioSpec resolve_scenario_names(std::string_view names) {
    ScenarioSpec out;
    std::size_t start = 0;
    while (start <= names.size()) {
        const std::size_t end = std::min(names.find('+', start), names.size());
        const std::string_view part = names.substr(start, end - start);
        auto s = find_scenario(part);
        if (!s) throw ConfigError("unknown scenario '" + std::string(part) + "' (see the catalog command)");
        out = out.transforms.empty() && out.name.empty() ? *s : out.then(*s);
        start = end + 1;
    }
    out.name = std::string(names);
    return out;
}

}  // namespace mgseir

#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "mgseir/baseline.hpp"
#include "mgseir/dynamics.hpp"
#include "mgseir/format.hpp"
#include "mgseir/objective.hpp"
#include "mgseir/optimizer.hpp"
#include "mgseir/policy.hpp"
#include "mgseir/scenario.hpp"

namespace mgseir {

using json = nlohmann::json;

/// File-system failures (CLI exit code 5).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes through a temporary sibling and renames it into place.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Parameters

namespace detail {

inline double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + " must be a number");
    return j.get<double>();
}

inline void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("unknown field " + path + "." + it.key());
}

inline json matrix_to_json(const ContactMatrix& m) {
    json rows = json::array();
    for (const auto& row : m.rho) rows.push_back(json(row));
    return json{{"rho", rows}};
}

inline ContactMatrix matrix_from_json(const json& j, const std::string& path, ContactMatrix m) {
    reject_unknown(j, {"rho"}, path);
    if (!j.contains("rho")) return m;
    const json& rows = j.at("rho");
    if (!rows.is_array() || rows.size() != kGroups) throw ConfigError(path + ".rho must be a 3x3 array");
    for (std::size_t r = 0; r < kGroups; ++r) {
        if (!rows[r].is_array() || rows[r].size() != kGroups) throw ConfigError(path + ".rho must be a 3x3 array");
        for (std::size_t c = 0; c < kGroups; ++c)
            m.rho[r][c] = number_at(rows[r][c], path + ".rho[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

#define MGSEIR_GROUP_FIELDS(X)                                                                                      \
    X(population_share)                                                                                             \
    X(income)                                                                                                       \
    X(remaining_employment)                                                                                         \
    X(icu_share)                                                                                                    \
    X(baseline_death_rate)                                                                                          \
    X(latent_exit)                                                                                                  \
    X(infectious_exit)                                                                                              \
    X(shielding_leakage)                                                                                            \
    X(shielded_productivity)                                                                                        \
    X(undetected_infectious)                                                                                        \
    X(undetected_exposed)                                                                                           \
    X(immunity_passport)

inline json group_to_json(const GroupParams& g) {
    json j;
#define X(f) j[#f] = g.f;
    MGSEIR_GROUP_FIELDS(X)
#undef X
    return j;
}

inline GroupParams group_from_json(const json& j, const std::string& path, GroupParams g) {
    static const std::set<std::string> known = {
#define X(f) #f,
        MGSEIR_GROUP_FIELDS(X)
#undef X
    };
    reject_unknown(j, known, path);
#define X(f) \
    if (j.contains(#f)) g.f = number_at(j.at(#f), path + "." #f);
    MGSEIR_GROUP_FIELDS(X)
#undef X
    return g;
}

#undef MGSEIR_GROUP_FIELDS

}  // namespace detail

/// Full parameter tree, field names as in ModelParams.
inline json params_to_json(const ModelParams& p) {
    json groups;
    for (GroupId g : kAllGroups) groups[std::string(group_name(g))] = detail::group_to_json(p.group(g));
    json j;
    j["groups"] = groups;
    j["contacts"] = detail::matrix_to_json(p.contacts);
    j["reference_contacts"] = detail::matrix_to_json(p.reference_contacts);
    j["beta"] = p.beta;
    j["matching_alpha"] = p.matching_alpha;
    j["mortality_lambda"] = p.mortality_lambda;
    j["icu_cap"] = p.icu_cap ? json(*p.icu_cap) : json(nullptr);
    j["horizon"] = p.horizon;
    j["initial_exposed_share"] = p.initial_exposed_share;
    return j;
}

/// Missing fields take their values from `defaults`; unknown fields are an error.
inline ModelParams params_from_json(const json& j, const ModelParams& defaults = germany_baseline()) {
    detail::reject_unknown(j,
                           {"groups", "contacts", "reference_contacts", "beta", "matching_alpha", "mortality_lambda",
                            "icu_cap", "horizon", "initial_exposed_share"},
                           "params");
    ModelParams p = defaults;
    if (j.contains("groups")) {
        const json& gs = j.at("groups");
        detail::reject_unknown(gs, {"young", "middle", "senior"}, "params.groups");
        for (GroupId g : kAllGroups) {
            const std::string name(group_name(g));
            if (gs.contains(name))
                p.group(g) = detail::group_from_json(gs.at(name), "params.groups." + name, p.group(g));
        }
    }
    if (j.contains("contacts")) p.contacts = detail::matrix_from_json(j.at("contacts"), "params.contacts", p.contacts);
    if (j.contains("reference_contacts"))
        p.reference_contacts =
            detail::matrix_from_json(j.at("reference_contacts"), "params.reference_contacts", p.reference_contacts);
    if (j.contains("beta")) p.beta = detail::number_at(j.at("beta"), "params.beta");
    if (j.contains("matching_alpha")) p.matching_alpha = detail::number_at(j.at("matching_alpha"), "params.matching_alpha");
    if (j.contains("mortality_lambda"))
        p.mortality_lambda = detail::number_at(j.at("mortality_lambda"), "params.mortality_lambda");
    if (j.contains("icu_cap")) {
        const json& c = j.at("icu_cap");
        p.icu_cap = c.is_null() ? std::nullopt : std::optional<double>(detail::number_at(c, "params.icu_cap"));
    }
    if (j.contains("horizon")) p.horizon = detail::number_at(j.at("horizon"), "params.horizon");
    if (j.contains("initial_exposed_share"))
        p.initial_exposed_share = detail::number_at(j.at("initial_exposed_share"), "params.initial_exposed_share");
    return p;
}

inline ModelParams load_params(const std::filesystem::path& path) {
    return params_from_json(parse_json(read_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// Policies

inline json policy_to_json(const PolicySchedule& p) {
    json levels = json::array();
    for (std::size_t c = 0; c < p.channels(); ++c) {
        json row = json::array();
        for (std::size_t i = 0; i < p.intervals; ++i) row.push_back(p.level(c, i));
        levels.push_back(row);
    }
    return json{{"family", std::string(family_name(p.family))},
                {"horizon", p.horizon},
                {"intervals", p.intervals},
                {"levels", levels}};
}

/// Accepts levels either per channel ([[...], [...]]) or flat channel-major.
inline PolicySchedule policy_from_json(const json& j) {
    detail::reject_unknown(j, {"family", "horizon", "intervals", "levels"}, "policy");
    PolicySchedule p;
    if (!j.contains("family") || !j.at("family").is_string()) throw ConfigError("policy.family must be a string");
    auto fam = parse_family(j.at("family").get<std::string>());
    if (!fam) throw ConfigError("policy.family must be uniform, semi or full");
    p.family = *fam;
    p.horizon = detail::number_at(j.at("horizon"), "policy.horizon");
    if (!j.contains("intervals") || !j.at("intervals").is_number_integer())
        throw ConfigError("policy.intervals must be an integer");
    p.intervals = j.at("intervals").get<std::size_t>();
    const json& lv = j.at("levels");
    if (!lv.is_array()) throw ConfigError("policy.levels must be an array");
    for (const json& v : lv) {
        if (v.is_array())
            for (const json& x : v) p.levels.push_back(detail::number_at(x, "policy.levels"));
        else
            p.levels.push_back(detail::number_at(v, "policy.levels"));
    }
    if (auto probs = p.problems(); !probs.empty()) throw ConfigError(probs.front());
    return p;
}

// ---------------------------------------------------------------------------
// Scenarios

namespace detail {

inline double arg(const json& args, const char* key, const std::string& where) {
    if (!args.contains(key)) throw ConfigError(where + ": missing argument '" + key + "'");
    return number_at(args.at(key), where + "." + key);
}

}  // namespace detail

inline Transform transform_from_json(const json& j) {
    using namespace transform;
    detail::reject_unknown(j, {"transform", "args"}, "scenario entry");
    if (!j.contains("transform") || !j.at("transform").is_string())
        throw ConfigError("scenario entry needs a 'transform' name");
    const std::string name = j.at("transform").get<std::string>();
    const json args = j.value("args", json::object());
    auto expect = [&](std::set<std::string> keys) { detail::reject_unknown(args, keys, name + ".args"); };
    if (name == "testing") return expect({"eta_I"}), Transform{Testing{detail::arg(args, "eta_I", name)}};
    if (name == "tracing") return expect({"eta_E"}), Transform{Tracing{detail::arg(args, "eta_E", name)}};
    if (name == "uniform_distancing")
        return expect({"factor"}), Transform{UniformDistancing{detail::arg(args, "factor", name)}};
    if (name == "targeted_distancing")
        return expect({"factor"}), Transform{TargetedDistancing{detail::arg(args, "factor", name)}};
    if (name == "within_senior_distancing")
        return expect({"factor"}), Transform{WithinSeniorDistancing{detail::arg(args, "factor", name)}};
    if (name == "senior_contact_level")
        return expect({"value"}), Transform{SeniorContactLevel{detail::arg(args, "value", name)}};
    if (name == "reference_contacts")
        return expect({"scale"}), Transform{ReferenceContacts{detail::arg(args, "scale", name)}};
    if (name == "wfh") {
        expect({"pi1", "pi2", "xi_new", "pi_is_factor"});
        bool is_factor = false;
        if (args.contains("pi_is_factor")) {
            if (!args.at("pi_is_factor").is_boolean()) throw ConfigError("wfh.pi_is_factor must be a boolean");
            is_factor = args.at("pi_is_factor").get<bool>();
        }
        return WorkFromHome{detail::arg(args, "pi1", name), detail::arg(args, "pi2", name),
                            detail::arg(args, "xi_new", name), is_factor};
    }
    if (name == "treatment") return expect({"reduction"}), Transform{Treatment{detail::arg(args, "reduction", name)}};
    if (name == "vaccine_at") return expect({"T"}), Transform{VaccineAt{detail::arg(args, "T", name)}};
    if (name == "set_lambda") return expect({"lambda"}), Transform{SetLambda{detail::arg(args, "lambda", name)}};
    if (name == "icu_cap") return expect({"cap"}), Transform{IcuCap{detail::arg(args, "cap", name)}};
    if (name == "immunity") return expect({"kappa"}), Transform{Immunity{detail::arg(args, "kappa", name)}};
    if (name == "senior_mortality")
        return expect({"rate"}), Transform{SeniorMortality{detail::arg(args, "rate", name)}};
    throw ConfigError("unknown transform '" + name + "'");
}

inline json transform_to_json(const Transform& t) {
    using namespace transform;
    return std::visit(
        detail::Overloaded{
            [](const Testing& x) { return json{{"transform", "testing"}, {"args", {{"eta_I", x.eta_infectious}}}}; },
            [](const Tracing& x) { return json{{"transform", "tracing"}, {"args", {{"eta_E", x.eta_exposed}}}}; },
            [](const UniformDistancing& x) {
                return json{{"transform", "uniform_distancing"}, {"args", {{"factor", x.factor}}}};
            },
            [](const TargetedDistancing& x) {
                return json{{"transform", "targeted_distancing"}, {"args", {{"factor", x.factor}}}};
            },
            [](const WithinSeniorDistancing& x) {
                return json{{"transform", "within_senior_distancing"}, {"args", {{"factor", x.factor}}}};
            },
            [](const SeniorContactLevel& x) {
                return json{{"transform", "senior_contact_level"}, {"args", {{"value", x.value}}}};
            },
            [](const ReferenceContacts& x) {
                return json{{"transform", "reference_contacts"}, {"args", {{"scale", x.scale}}}};
            },
            [](const WorkFromHome& x) {
                return json{{"transform", "wfh"},
                            {"args",
                             {{"pi1", x.pi_working},
                              {"pi2", x.pi_senior},
                              {"xi_new", x.shielded_productivity},
                              {"pi_is_factor", x.pi_is_factor}}}};
            },
            [](const Treatment& x) { return json{{"transform", "treatment"}, {"args", {{"reduction", x.reduction}}}}; },
            [](const VaccineAt& x) { return json{{"transform", "vaccine_at"}, {"args", {{"T", x.days}}}}; },
            [](const SetLambda& x) { return json{{"transform", "set_lambda"}, {"args", {{"lambda", x.lambda}}}}; },
            [](const IcuCap& x) { return json{{"transform", "icu_cap"}, {"args", {{"cap", x.cap}}}}; },
            [](const Immunity& x) { return json{{"transform", "immunity"}, {"args", {{"kappa", x.kappa}}}}; },
            [](const SeniorMortality& x) {
                return json{{"transform", "senior_mortality"}, {"args", {{"rate", x.rate}}}};
            },
        },
        t);
}

inline json scenario_to_json(const ScenarioSpec& s) {
    json arr = json::array();
    for (const auto& t : s.transforms) arr.push_back(transform_to_json(t));
    return arr;
}

/// A scenario file is a list whose entries are catalog names or
/// {"transform": name, "args": {...}} objects.
inline ScenarioSpec scenario_from_json(const json& j, std::string name) {
    if (!j.is_array()) throw ConfigError("scenario file must contain a list");
    ScenarioSpec out{std::move(name), {}};
    for (const json& entry : j) {
        if (entry.is_string()) {
            const ScenarioSpec named = resolve_scenario_names(entry.get<std::string>());
            out.transforms.insert(out.transforms.end(), named.transforms.begin(), named.transforms.end());
        } else {
            out.transforms.push_back(transform_from_json(entry));
        }
    }
    return out;
}

/// Catalog name, "a+b" composition, or path to a scenario file.
inline ScenarioSpec load_scenario(const std::string& name_or_path) {
    if (std::filesystem::exists(name_or_path) && std::filesystem::is_regular_file(name_or_path)) {
        const std::filesystem::path path(name_or_path);
        return scenario_from_json(parse_json(read_file(path), path.string()), path.stem().string());
    }
    return resolve_scenario_names(name_or_path);
}

// ---------------------------------------------------------------------------
// Tables

inline std::string trajectory_csv_header() {
    std::string h = "t";
    for (GroupId g : kAllGroups)
        for (const char* c : {"S", "E", "I", "R", "D"}) h += std::string(",") + c + "_" + std::string(group_suffix(g));
    h += ",H,Rt";
    for (GroupId g : kAllGroups) h += ",L_" + std::string(group_suffix(g));
    h += ",loss_cum";
    return h;
}

/// One row per grid point, 17 significant digits, LF line endings.
inline std::string trajectory_csv(const Trajectory& tr) {
    std::string out = trajectory_csv_header() + "\n";
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        const ModelState& s = tr.states[i];
        out += format_double17(tr.times[i]);
        for (const auto& c : s.groups)
            for (double v : {c.S, c.E, c.I, c.R, c.D}) out += "," + format_double17(v);
        out += "," + format_double17(tr.icu[i]) + "," + format_double17(tr.rt[i]);
        for (double l : tr.levels[i]) out += "," + format_double17(l);
        out += "," + format_double17(s.accumulated_loss) + "\n";
    }
    return out;
}

inline std::string frontier_csv(const std::vector<FrontierPoint>& points) {
    std::string out = "chi,mortality,econ_loss,econ_loss_pct_gdp,objective,evals,seed";
    std::size_t width = 0;
    for (const auto& pt : points) width = std::max(width, pt.policy.levels.size());
    if (!points.empty()) {
        const PolicySchedule& ref = points.front().policy;
        for (std::size_t k = 0; k < width; ++k)
            out += ",level_c" + std::to_string(k / ref.intervals) + "_k" + std::to_string(k % ref.intervals);
    }
    out += "\n";
    for (const auto& pt : points) {
        out += format_double17(pt.chi) + "," + format_double17(pt.mortality) + "," + format_double17(pt.econ_loss) +
               "," + format_double17(pt.econ_loss_pct_gdp) + "," + format_double17(pt.objective) + "," +
               std::to_string(pt.evaluations) + "," + std::to_string(pt.seed);
        for (double v : pt.policy.levels) out += "," + format_double17(v);
        out += "\n";
    }
    return out;
}

inline json loss_breakdown_json(const PerGroup<LossBreakdown>& b) {
    json out;
    for (GroupId g : kAllGroups) {
        const LossBreakdown& l = b[idx(g)];
        out[std::string(group_name(g))] = {{"susceptible_shielding", l.susceptible_shielding},
                                           {"exposed", l.exposed},
                                           {"infectious", l.infectious},
                                           {"recovered_shielding", l.recovered_shielding},
                                           {"death_productivity", l.death_productivity},
                                           {"total", l.total()}};
    }
    return out;
}

/// Run summary for one trajectory.
inline json summary_json(const Trajectory& tr, const ModelParams& p, double chi) {
    const double econ = total_economic_loss(tr);
    const double mort = total_mortality(tr);
    json j;
    j["mortality"] = mort;
    j["econ_loss"] = econ;
    j["econ_loss_pct_gdp"] = loss_pct_gdp(econ, p);
    j["objective"] = objective(econ, mort, chi);
    j["chi"] = chi;
    j["loss_breakdown_integrals"] = loss_breakdown_json(loss_breakdown_integrals(tr, p));
    j["rt_initial"] = tr.rt.front();
    j["max_icu"] = tr.diagnostics.max_icu;
    j["diagnostics"] = {{"clamp_mass", tr.diagnostics.clamp_mass},
                        {"clamp_events", tr.diagnostics.clamp_events},
                        {"death_rate_ceiling_steps", tr.diagnostics.death_clamp_steps},
                        {"icu_excess", tr.diagnostics.icu_excess}};
    return j;
}

inline json frontier_point_json(const FrontierPoint& pt) {
    return json{{"chi", pt.chi},
                {"mortality", pt.mortality},
                {"econ_loss", pt.econ_loss},
                {"econ_loss_pct_gdp", pt.econ_loss_pct_gdp},
                {"objective", pt.objective},
                {"icu_penalty", pt.icu_penalty},
                {"evaluations", pt.evaluations},
                {"converged", pt.converged},
                {"seed", pt.seed},
                {"policy", policy_to_json(pt.policy)}};
}

}  // namespace mgseir

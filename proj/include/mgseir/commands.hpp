#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mgseir/calibration.hpp"
#include "mgseir/io.hpp"
#include "mgseir/optimizer.hpp"
#include "mgseir/scenario.hpp"
#include "mgseir/svg.hpp"

namespace mgseir {

inline constexpr const char* kToolVersion = "0.1.0";

/// CLI exit codes.
enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_integration = 3, exit_optimization = 4, exit_io = 5 };

/// Fully resolved inputs of one command. Everything needed to replay a run
/// is in here and is written to the manifest.
struct RunInputs {
    std::string command;
    std::string config_path;
    ModelParams base = germany_baseline();
    std::vector<ScenarioSpec> scenarios{ScenarioSpec{"baseline", {}}};
    std::vector<Family> families{Family::uniform};
    std::optional<double> chi;
    std::optional<std::size_t> chi_grid_points;
    std::vector<double> chi_grid;  // filled in by the frontier command
    std::optional<double> safety_cap;
    std::optional<PolicySchedule> policy;
    double target_r0 = kBaselineR0;
    SearchConfig search;
    std::filesystem::path out = "out";
    bool svg = true;
};

/// One row of the compare table.
struct ComparisonRow {
    std::string scenario;
    double chi = 0.0;
    double mortality = 0.0;
    double econ_loss = 0.0;
    double econ_loss_pct_gdp = 0.0;
    double max_icu = 0.0;
    double senior_shielding_days = 0.0;
    PolicySchedule policy;
};

/// Days with the senior shielding level above 0.5.
inline double senior_shielding_days(const PolicySchedule& p) {
    const std::size_t c = channel_of(p.family, GroupId::senior);
    double days = 0.0;
    for (std::size_t i = 0; i < p.intervals; ++i)
        if (p.level(c, i) > 0.5) days += p.interval_length();
    return days;
}

// ---------------------------------------------------------------------------
// Manifest

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json search_to_json(const SearchConfig& c) {
    return json{{"intervals", c.intervals},   {"population", c.population}, {"generations", c.generations},
                {"weight", c.weight},         {"crossover", c.crossover},   {"seed", c.seed},
                {"polish", c.polish},         {"polish_start", c.polish_start}, {"polish_end", c.polish_end},
                {"dt", c.dt}};
}

inline SearchConfig search_from_json(const json& j) {
    SearchConfig c;
    c.intervals = j.at("intervals").get<std::size_t>();
    c.population = j.at("population").get<std::size_t>();
    c.generations = j.at("generations").get<std::size_t>();
    c.weight = j.at("weight").get<double>();
    c.crossover = j.at("crossover").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.polish = j.at("polish").get<bool>();
    c.polish_start = j.at("polish_start").get<double>();
    c.polish_end = j.at("polish_end").get<double>();
    c.dt = j.at("dt").get<double>();
    return c;
}

inline json manifest_json(const RunInputs& in, const std::vector<std::string>& outputs) {
    json scen = json::array();
    json resolved = json::array();
    for (const auto& s : in.scenarios) {
        scen.push_back({{"name", s.name}, {"transforms", scenario_to_json(s)}});
        resolved.push_back(params_to_json(apply_scenario(in.base, s)));
    }
    json fams = json::array();
    for (Family f : in.families) fams.push_back(std::string(family_name(f)));
    json j;
    j["command"] = in.command;
    j["config_path"] = in.config_path;
    j["base_params"] = params_to_json(in.base);
    j["scenarios"] = scen;
    j["resolved_params"] = resolved;
    j["families"] = fams;
    j["chi"] = in.chi ? json(*in.chi) : json(nullptr);
    j["chi_grid_points"] = in.chi_grid_points ? json(*in.chi_grid_points) : json(nullptr);
    j["chi_grid"] = in.chi_grid;
    j["safety_cap"] = in.safety_cap ? json(*in.safety_cap) : json(nullptr);
    j["policy"] = in.policy ? policy_to_json(*in.policy) : json(nullptr);
    j["target_r0"] = in.target_r0;
    j["search"] = search_to_json(in.search);
    j["seed"] = in.search.seed;
    j["dt"] = in.search.dt;
    j["svg"] = in.svg;
    j["timestamp"] = utc_timestamp();
    j["tool_version"] = kToolVersion;
    j["outputs"] = outputs;
    return j;
}

/// Rebuilds the inputs of a recorded run. The output directory is not taken
/// from the manifest.
inline RunInputs inputs_from_manifest(const json& j) {
    try {
        RunInputs in;
        in.command = j.at("command").get<std::string>();
        in.config_path = j.at("config_path").get<std::string>();
        in.base = params_from_json(j.at("base_params"));
        in.scenarios.clear();
        for (const auto& s : j.at("scenarios"))
            in.scenarios.push_back(scenario_from_json(s.at("transforms"), s.at("name").get<std::string>()));
        in.families.clear();
        for (const auto& f : j.at("families")) {
            auto fam = parse_family(f.get<std::string>());
            if (!fam) throw ConfigError("manifest: unknown family");
            in.families.push_back(*fam);
        }
        if (!j.at("chi").is_null()) in.chi = j.at("chi").get<double>();
        if (!j.at("chi_grid_points").is_null()) in.chi_grid_points = j.at("chi_grid_points").get<std::size_t>();
        in.chi_grid = j.at("chi_grid").get<std::vector<double>>();
        if (!j.at("safety_cap").is_null()) in.safety_cap = j.at("safety_cap").get<double>();
        if (!j.at("policy").is_null()) in.policy = policy_from_json(j.at("policy"));
        in.target_r0 = j.at("target_r0").get<double>();
        in.search = search_from_json(j.at("search"));
        in.svg = j.at("svg").get<bool>();
        return in;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Plots

inline std::string uninfected_svg(const Trajectory& tr, const ModelParams& p) {
    svg::Chart c{"Share of uninfected", "days", "S_j / N_j", {}, {}};
    for (GroupId g : kAllGroups) {
        svg::Series s{std::string(group_name(g)), tr.times, {}, svg::palette()[idx(g)]};
        for (const auto& st : tr.states) s.y.push_back(st[g].S / p.group(g).population_share);
        c.series.push_back(std::move(s));
    }
    return svg::render(c);
}

inline std::string rt_svg(const Trajectory& tr) {
    svg::Chart c{"Reproduction rate R(t)", "days", "R(t)", {}, {1.0}};
    c.series.push_back({"R(t)", tr.times, tr.rt, svg::palette()[0]});
    return svg::render(c);
}

inline std::string policy_svg(const PolicySchedule& p) {
    svg::Chart c{"Shielding policy", "days", "L_j(t)", {}, {}};
    for (GroupId g : kAllGroups) {
        svg::Series s{std::string(group_name(g)), {}, {}, svg::palette()[idx(g)], true};
        const std::size_t ch = channel_of(p.family, g);
        for (std::size_t i = 0; i < p.intervals; ++i) {
            s.x.push_back(p.interval_length() * static_cast<double>(i));
            s.y.push_back(p.level(ch, i));
        }
        s.x.push_back(p.horizon);
        s.y.push_back(p.level(ch, p.intervals - 1));
        c.series.push_back(std::move(s));
    }
    return svg::render(c);
}

struct FrontierCurve {
    Family family;
    std::vector<FrontierPoint> points;
    std::optional<FrontierPoint> safety;
};

inline std::string frontier_svg(const std::vector<FrontierCurve>& curves) {
    svg::Chart c{"Efficient policy frontier", "mortality (% of population)", "economic loss (% of annual GDP)", {}, {}};
    std::size_t k = 0;
    for (const auto& curve : curves) {
        const std::string color = svg::palette()[k++ % svg::palette().size()];
        svg::Series s{std::string(family_name(curve.family)), {}, {}, color};
        for (const auto& pt : curve.points) {
            s.x.push_back(100.0 * pt.mortality);
            s.y.push_back(pt.econ_loss_pct_gdp);
        }
        c.series.push_back(std::move(s));
        if (curve.safety)
            c.series.push_back(
                {"", {100.0 * curve.safety->mortality}, {curve.safety->econ_loss_pct_gdp}, color, false, true});
    }
    return svg::render(c);
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
    void write(const std::string& name, const std::string& content) {
        atomic_write(dir_ / name, content);
        names_.push_back(name);
    }
    void finish(const RunInputs& in) { write("manifest.json", manifest_json(in, names_).dump(2) + "\n"); }

private:
    std::filesystem::path dir_;
    std::vector<std::string> names_;
};

inline const ScenarioSpec& single_scenario(const RunInputs& in) {
    if (in.scenarios.size() != 1) throw ConfigError(in.command + " takes exactly one scenario");
    return in.scenarios.front();
}

inline void write_run_files(OutputSet& out, const RunInputs& in, const Trajectory& tr, const ModelParams& p,
                            double chi, json extra = json::object()) {
    out.write("trajectory.csv", trajectory_csv(tr));
    json summary = summary_json(tr, p, chi);
    for (auto it = extra.begin(); it != extra.end(); ++it) summary[it.key()] = it.value();
    out.write("summary.json", summary.dump(2) + "\n");
    out.write("policy.json", policy_to_json(tr.policy).dump(2) + "\n");
    if (in.svg) {
        out.write("uninfected.svg", uninfected_svg(tr, p));
        out.write("rt.svg", rt_svg(tr));
        out.write("policy.svg", policy_svg(tr.policy));
    }
}

inline double chosen_chi(const RunInputs& in, const ModelParams& p) {
    return in.chi ? *in.chi : reference_chi(p, in.search);
}

}  // namespace detail

/// Zero policy (or the supplied one) on a single scenario.
inline int cmd_simulate(const RunInputs& in, std::ostream& log) {
    const ScenarioSpec& scen = detail::single_scenario(in);
    const ModelParams p = apply_scenario(in.base, scen);
    const PolicySchedule policy =
        in.policy ? *in.policy : PolicySchedule::zero(in.families.front(), p.horizon, in.search.intervals);
    const Trajectory tr = integrate(p, policy, in.search.dt);
    const double chi = in.chi.value_or(0.0);

    detail::OutputSet out(in.out);
    json extra;
    if (p.matching_alpha == 2.0) extra["effective_rt_t0"] = effective_rt(initial_state(p), policy.at(0.0), p);
    extra["scenario"] = scen.name;
    detail::write_run_files(out, in, tr, p, chi, extra);
    out.finish(in);
    log << "mortality " << format_double(total_mortality(tr)) << "  econ_loss "
        << format_double(total_economic_loss(tr)) << " (" << format_double(loss_pct_gdp(total_economic_loss(tr), p))
        << "% of GDP)\n";
    return exit_ok;
}

/// Prints the calibrated beta and the calibration next-generation matrix.
inline int cmd_calibrate_beta(const RunInputs& in, std::ostream& out) {
    const ModelParams p = apply_scenario(in.base, detail::single_scenario(in));
    const double beta = calibrate_beta(p, in.target_r0);
    const NextGenMatrix ngm = calibration_ngm(p, beta);
    json rows = json::array();
    for (const auto& r : ngm.K) rows.push_back(json(r));
    const json j{{"beta", beta}, {"target_r0", in.target_r0}, {"r0", spectral_radius(ngm)}, {"ngm", rows}};
    out << j.dump(2) << "\n";
    return exit_ok;
}

/// Optimal schedule for one family at one chi (or under the safety cap).
inline int cmd_optimize(const RunInputs& in, std::ostream& log) {
    const ScenarioSpec& scen = detail::single_scenario(in);
    const ModelParams p = apply_scenario(in.base, scen);
    const Family fam = in.families.front();
    FrontierPoint pt;
    if (in.safety_cap) {
        pt = safety_policy(fam, p, *in.safety_cap, in.search);
    } else {
        pt = optimize_policy(fam, p, detail::chosen_chi(in, p), in.search);
    }
    const Trajectory tr = integrate(p, pt.policy, in.search.dt);

    detail::OutputSet out(in.out);
    json extra;
    extra["scenario"] = scen.name;
    extra["family"] = std::string(family_name(fam));
    extra["evaluations"] = pt.evaluations;
    extra["converged"] = pt.converged;
    extra["icu_penalty"] = pt.icu_penalty;
    if (in.safety_cap) extra["safety_cap"] = *in.safety_cap;
    detail::write_run_files(out, in, tr, p, pt.chi, extra);
    out.finish(in);
    log << family_name(fam) << " chi " << format_double(pt.chi) << ": mortality " << format_double(pt.mortality)
        << "  econ_loss " << format_double(pt.econ_loss_pct_gdp) << "% of GDP  (" << pt.evaluations
        << " evaluations)\n";
    return exit_ok;
}

/// Frontiers for every requested family, warm-started along the nesting
/// order uniform -> semi -> full.
inline int cmd_frontier(RunInputs in, std::ostream& log) {
    const ScenarioSpec& scen = detail::single_scenario(in);
    const ModelParams p = apply_scenario(in.base, scen);
    if (in.chi_grid.empty()) {
        if (in.chi) in.chi_grid = {*in.chi};
        else in.chi_grid = default_chi_grid(p, in.search, in.chi_grid_points.value_or(24));
    }
    std::vector<Family> order = in.families;
    std::stable_sort(order.begin(), order.end(),
                     [](Family a, Family b) { return channel_count(a) < channel_count(b); });

    std::vector<FrontierCurve> curves;
    std::vector<PolicySchedule> nested;
    std::vector<FrontierPoint> nested_frontier;
    detail::OutputSet out(in.out);
    for (Family fam : order) {
        const std::vector<FrontierPoint> swept = sweep(fam, p, in.chi_grid, in.search, nested);
        nested = policies_of(swept);
        FrontierCurve curve{fam, merge_nested(fam, p, swept, nested_frontier, in.search), std::nullopt};
        nested_frontier = curve.points;
        if (in.safety_cap) curve.safety = safety_policy(fam, p, *in.safety_cap, in.search, nested);
        log << family_name(fam) << ": " << curve.points.size() << " frontier points from " << swept.size()
            << " chi values\n";
        const std::string csv = frontier_csv(swept);
        out.write("frontier_" + std::string(family_name(fam)) + ".csv", csv);
        if (in.families.size() == 1) out.write("frontier.csv", csv);
        if (curve.safety)
            out.write("safety_" + std::string(family_name(fam)) + ".json",
                      frontier_point_json(*curve.safety).dump(2) + "\n");
        curves.push_back(std::move(curve));
    }
    if (in.svg) out.write("frontier.svg", frontier_svg(curves));
    out.finish(in);
    return exit_ok;
}

inline std::vector<ComparisonRow> compare_rows(const RunInputs& in) {
    const Family fam = in.families.front();
    std::vector<ComparisonRow> rows;
    for (const auto& scen : in.scenarios) {
        const ModelParams p = apply_scenario(in.base, scen);
        const FrontierPoint pt = in.safety_cap ? safety_policy(fam, p, *in.safety_cap, in.search)
                                               : optimize_policy(fam, p, detail::chosen_chi(in, p), in.search);
        const PolicyEvaluation e = evaluate_policy(pt.policy, p, pt.chi, in.search.dt);
        rows.push_back({scen.name, pt.chi, pt.mortality, pt.econ_loss, pt.econ_loss_pct_gdp, e.max_icu,
                        senior_shielding_days(pt.policy), pt.policy});
    }
    return rows;
}

/// One optimized row per scenario.
inline int cmd_compare(const RunInputs& in, std::ostream& log) {
    if (in.scenarios.empty()) throw ConfigError("compare needs at least one scenario");
    const std::vector<ComparisonRow> rows = compare_rows(in);
    std::string csv = "scenario,chi,mortality,econ_loss,econ_loss_pct_gdp,max_icu,senior_shielding_days\n";
    json arr = json::array();
    for (const auto& r : rows) {
        csv += r.scenario + "," + format_double17(r.chi) + "," + format_double17(r.mortality) + "," +
               format_double17(r.econ_loss) + "," + format_double17(r.econ_loss_pct_gdp) + "," +
               format_double17(r.max_icu) + "," + format_double17(r.senior_shielding_days) + "\n";
        arr.push_back({{"scenario", r.scenario},
                       {"chi", r.chi},
                       {"mortality", r.mortality},
                       {"econ_loss", r.econ_loss},
                       {"econ_loss_pct_gdp", r.econ_loss_pct_gdp},
                       {"max_icu", r.max_icu},
                       {"senior_shielding_days", r.senior_shielding_days},
                       {"policy", policy_to_json(r.policy)}});
        log << r.scenario << ": mortality " << format_double(r.mortality) << "  loss "
            << format_double(r.econ_loss_pct_gdp) << "% of GDP  senior shielding " << r.senior_shielding_days
            << " days\n";
    }
    detail::OutputSet out(in.out);
    out.write("compare.csv", csv);
    out.write("compare.json", arr.dump(2) + "\n");
    out.finish(in);
    return exit_ok;
}

inline int cmd_catalog(std::ostream& out) {
    for (const auto& s : scenario_catalog()) out << s.name << "\n";
    return exit_ok;
}

inline int dispatch(const RunInputs& in, std::ostream& out, std::ostream& log) {
    if (in.command == "simulate") return cmd_simulate(in, log);
    if (in.command == "calibrate-beta") return cmd_calibrate_beta(in, out);
    if (in.command == "optimize") return cmd_optimize(in, log);
    if (in.command == "frontier") return cmd_frontier(in, log);
    if (in.command == "compare") return cmd_compare(in, log);
    if (in.command == "catalog") return cmd_catalog(out);
    throw ConfigError("unknown command '" + in.command + "'");
}

/// Runs a command and maps failures onto exit codes.
inline int run_guarded(const RunInputs& in, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(in, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const IntegrationError& e) {
        err << "integration error: " << e.what() << "\n";
        return exit_integration;
    } catch (const OptimizationError& e) {
        err << "optimization error: " << e.what() << "\n";
        return exit_optimization;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::domain_error& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    }
}

}  // namespace mgseir

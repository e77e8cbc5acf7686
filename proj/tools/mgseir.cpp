// Command-line front end for the mgseir library.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mgseir/mgseir.hpp"

namespace {

struct Flags {
    std::string config;
    std::vector<std::string> scenarios;
    std::vector<std::string> families;
    double chi = -1.0;
    std::size_t chi_grid = 0;
    double safety_cap = -1.0;
    double dt = 0.25;
    std::uint64_t seed = 1;
    std::string out = "out";
    bool no_svg = false;
    std::string policy;
    std::size_t intervals = 13;
    std::size_t population = 0;
    std::size_t generations = 400;
    bool reduced = false;
    bool no_polish = false;
    unsigned workers = 0;
    double r0 = mgseir::kBaselineR0;
    std::string manifest;
};

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ','))
            if (!part.empty()) out.push_back(part);
    }
    return out;
}

mgseir::RunInputs resolve(const std::string& command, const Flags& f) {
    mgseir::RunInputs in;
    in.command = command;
    in.config_path = f.config;
    if (!f.config.empty()) in.base = mgseir::load_params(f.config);
    mgseir::require_valid(in.base);

    const auto scen = split_commas(f.scenarios);
    in.scenarios.clear();
    for (const auto& s : scen) in.scenarios.push_back(mgseir::load_scenario(s));
    if (in.scenarios.empty()) in.scenarios.push_back(mgseir::ScenarioSpec{"baseline", {}});

    const auto fams = split_commas(f.families);
    if (!fams.empty()) {
        in.families.clear();
        for (const auto& name : fams) {
            auto fam = mgseir::parse_family(name);
            if (!fam) throw mgseir::ConfigError("unknown family '" + name + "' (uniform, semi, full)");
            in.families.push_back(*fam);
        }
    }
    if (f.chi >= 0.0) in.chi = f.chi;
    if (f.chi_grid > 0) in.chi_grid_points = f.chi_grid;
    if (f.safety_cap >= 0.0) {
        if (!(f.safety_cap > 0.0)) throw mgseir::ConfigError("--safety-cap must be > 0");
        in.safety_cap = f.safety_cap;
    }
    if (!f.policy.empty())
        in.policy = mgseir::policy_from_json(mgseir::parse_json(mgseir::read_file(f.policy), f.policy));
    in.target_r0 = f.r0;

    in.search = f.reduced ? mgseir::SearchConfig::reduced() : mgseir::SearchConfig{};
    in.search.intervals = f.intervals;
    if (!f.reduced || f.population) in.search.population = f.population;
    if (!f.reduced) in.search.generations = f.generations;
    in.search.seed = f.seed;
    in.search.dt = f.dt;
    in.search.polish = !f.no_polish;
    in.search.workers = f.workers;
    in.out = f.out;
    in.svg = !f.no_svg;
    return in;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-group SEIR shielding policy tool"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", f.config, "Parameter JSON file (missing fields take baseline values)");
        cmd->add_option("--scenario", f.scenarios, "Catalog name, a+b composition, or scenario file");
        cmd->add_option("--dt", f.dt, "Integration step in days");
        cmd->add_option("--out", f.out, "Output directory");
        cmd->add_flag("--no-svg", f.no_svg, "Skip SVG plots");
    };
    auto add_search = [&](CLI::App* cmd) {
        cmd->add_option("--family", f.families, "uniform, semi or full (comma-separated for several)");
        auto* chi = cmd->add_option("--chi", f.chi, "Value of a statistical life in loss units");
        auto* grid = cmd->add_option("--chi-grid", f.chi_grid, "Number of points on the default chi grid");
        chi->excludes(grid);
        cmd->add_option("--safety-cap", f.safety_cap, "Mortality cap as a population share");
        cmd->add_option("--seed", f.seed, "Optimizer seed");
        cmd->add_option("--intervals", f.intervals, "Piecewise-constant policy intervals");
        cmd->add_option("--population", f.population, "DE population (0 = automatic)");
        cmd->add_option("--generations", f.generations, "DE generations");
        cmd->add_flag("--reduced", f.reduced, "Reduced search (population 24, 120 generations)");
        cmd->add_flag("--no-polish", f.no_polish, "Skip the coordinate polish");
        cmd->add_option("--workers", f.workers, "Worker threads (0 = all cores)");
    };

    auto* simulate = app.add_subcommand("simulate", "Integrate one scenario under a fixed policy");
    add_common(simulate);
    simulate->add_option("--policy", f.policy, "Policy JSON file (default: no shielding)");
    simulate->add_option("--family", f.families, "Family of the zero policy");
    simulate->add_option("--chi", f.chi, "Chi used for the reported objective");
    simulate->add_option("--intervals", f.intervals, "Intervals of the zero policy");

    auto* calibrate = app.add_subcommand("calibrate-beta", "Print the calibrated transmission rate");
    calibrate->add_option("--config", f.config, "Parameter JSON file");
    calibrate->add_option("--scenario", f.scenarios, "Catalog name or scenario file");
    calibrate->add_option("--r0", f.r0, "Target basic reproduction number");

    auto* optimize = app.add_subcommand("optimize", "Optimal policy for one family");
    add_common(optimize);
    add_search(optimize);

    auto* frontier = app.add_subcommand("frontier", "Efficient frontier over a chi grid");
    add_common(frontier);
    add_search(frontier);

    auto* compare = app.add_subcommand("compare", "Optimize several scenarios side by side");
    add_common(compare);
    add_search(compare);

    app.add_subcommand("catalog", "List scenario names");

    auto* replay = app.add_subcommand("replay", "Re-run a recorded manifest");
    replay->add_option("--manifest", f.manifest, "manifest.json of an earlier run")->required();
    replay->add_option("--out", f.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : mgseir::exit_config;
    }

    mgseir::RunInputs in;
    try {
        if (replay->parsed()) {
            in = mgseir::inputs_from_manifest(
                mgseir::parse_json(mgseir::read_file(f.manifest), f.manifest));
            in.out = f.out;
        } else {
            in = resolve(app.get_subcommands().front()->get_name(), f);
        }
    } catch (const mgseir::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return mgseir::exit_config;
    } catch (const mgseir::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return mgseir::exit_io;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return mgseir::exit_config;
    }
    return mgseir::run_guarded(in, std::cout, std::cerr);
}

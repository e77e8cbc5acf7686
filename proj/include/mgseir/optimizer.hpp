#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgseir/de.hpp"
#include "mgseir/dynamics.hpp"
#include "mgseir/econ.hpp"
#include "mgseir/objective.hpp"
#include "mgseir/policy.hpp"

namespace mgseir {

/// Raised when a policy search cannot produce a result (CLI exit code 4).
struct OptimizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Weight on the integral of ICU load above the hard cap.
inline constexpr double kIcuPenaltyWeight = 1e6;
inline constexpr std::size_t kMaxSearchDimension = 256;

struct SearchConfig {
    std::size_t intervals = 13;       // K equal blocks over the horizon
    std::size_t population = 0;       // 0: 16 * dim, capped at 96
    std::size_t generations = 400;
    double weight = 0.7;
    double crossover = 0.9;
    DeStrategy strategy = DeStrategy::current_to_best1_bin;
    std::uint64_t seed = 1;
    bool polish = true;
    double polish_start = 0.1;
    double polish_end = 1e-4;
    double dt = 0.25;
    unsigned workers = 0;

    /// Cheaper settings used by the test suites.
    static SearchConfig reduced() {
        SearchConfig c;
        c.population = 24;
        c.generations = 120;
        return c;
    }

    std::size_t population_for(std::size_t dim) const {
        return population > 0 ? population : std::min<std::size_t>(16 * dim, 96);
    }
};

struct PolicyEvaluation {
    double mortality = 0.0;
    double econ_loss = 0.0;
    double objective = 0.0;    // econ_loss + chi * mortality
    double icu_penalty = 0.0;  // kIcuPenaltyWeight * excess ICU integral; 0 without a cap
    double max_icu = 0.0;

    double penalized() const noexcept { return objective + icu_penalty; }
};

/// Integrates one trajectory and scores it. Deterministic.
inline PolicyEvaluation evaluate_policy(const PolicySchedule& policy, const ModelParams& p, double chi,
                                        double dt = 0.25) {
    const RunOutcome run = simulate_outcome(p, policy, dt);
    PolicyEvaluation e;
    e.mortality = total_mortality(run.final_state);
    e.econ_loss = run.final_state.accumulated_loss;
    e.objective = objective(e.econ_loss, e.mortality, chi);
    e.icu_penalty = p.icu_cap ? kIcuPenaltyWeight * run.diagnostics.icu_excess : 0.0;
    e.max_icu = run.diagnostics.max_icu;
    return e;
}

struct FrontierPoint {
    double chi = 0.0;
    double mortality = 0.0;
    double econ_loss = 0.0;
    double econ_loss_pct_gdp = 0.0;
    double objective = 0.0;
    double icu_penalty = 0.0;
    PolicySchedule policy;
    std::size_t evaluations = 0;
    bool converged = false;
    std::uint64_t seed = 0;
};

inline FrontierPoint make_point(const PolicySchedule& policy, const ModelParams& p, double chi, double dt) {
    const PolicyEvaluation e = evaluate_policy(policy, p, chi, dt);
    FrontierPoint pt;
    pt.chi = chi;
    pt.mortality = e.mortality;
    pt.econ_loss = e.econ_loss;
    pt.econ_loss_pct_gdp = loss_pct_gdp(e.econ_loss, p);
    pt.objective = e.objective;
    pt.icu_penalty = e.icu_penalty;
    pt.policy = policy;
    pt.evaluations = 1;
    return pt;
}

namespace detail {

inline PolicySchedule decode(Family f, const ModelParams& p, std::size_t intervals, const std::vector<double>& x) {
    return PolicySchedule{f, p.horizon, intervals, x};
}

/// Seeds usable by a search over `f`: nested families are embedded, others dropped.
inline std::vector<std::vector<double>> usable_seeds(Family f, const ModelParams& p, std::size_t intervals,
                                                     std::span<const PolicySchedule> seeds) {
    std::vector<std::vector<double>> out;
    for (const PolicySchedule& s : seeds) {
        if (s.intervals != intervals || std::abs(s.horizon - p.horizon) > 1e-9 * p.horizon) continue;
        if (!nests_in(s.family, f)) continue;
        out.push_back(embed(s, f).levels);
    }
    return out;
}

}  // namespace detail

/// Minimizes econ_loss + chi * mortality (+ ICU penalty) over schedules of
/// `family`: seeded differential evolution, then coordinate polish. The
/// supplied seeds and the two corner schedules (L = 0, L = 1) start in the
/// initial population, so the result is never worse than any of them.
inline FrontierPoint optimize_policy(Family family, const ModelParams& p, double chi, const SearchConfig& cfg,
                                     std::span<const PolicySchedule> seeds = {}) {
    if (!(chi >= 0.0)) throw std::invalid_argument("optimize_policy: chi must be >= 0");
    const std::size_t dim = channel_count(family) * cfg.intervals;
    if (dim > kMaxSearchDimension)
        throw OptimizationError("search dimension " + std::to_string(dim) + " exceeds " +
                                std::to_string(kMaxSearchDimension));

    auto seed_vectors = detail::usable_seeds(family, p, cfg.intervals, seeds);
    seed_vectors.push_back(std::vector<double>(dim, 0.0));
    seed_vectors.push_back(std::vector<double>(dim, 1.0));

    auto score = [&](const std::vector<double>& x) {
        return evaluate_policy(detail::decode(family, p, cfg.intervals, x), p, chi, cfg.dt).penalized();
    };

    DeSettings de;
    de.population = std::max(cfg.population_for(dim), seed_vectors.size());
    de.generations = cfg.generations;
    de.weight = cfg.weight;
    de.crossover = cfg.crossover;
    de.strategy = cfg.strategy;
    de.seed = cfg.seed;
    de.workers = cfg.workers;
    DeResult found = differential_evolution(score, dim, de, seed_vectors);
    std::size_t evals = found.evaluations;
    std::vector<double> best = std::move(found.best);
    if (cfg.polish) {
        PolishResult pol = coordinate_polish(score, best, found.value, cfg.polish_start, cfg.polish_end);
        evals += pol.evaluations;
        best = std::move(pol.best);
    }
    FrontierPoint pt = make_point(detail::decode(family, p, cfg.intervals, best), p, chi, cfg.dt);
    pt.evaluations = evals + 1;
    pt.converged = found.converged;
    pt.seed = cfg.seed;
    return pt;
}

/// Keeps the points not weakly dominated in (mortality, econ_loss); among
/// identical points the first survives. Sorted by mortality, descending.
inline std::vector<FrontierPoint> pareto_filter(std::vector<FrontierPoint> points) {
    std::vector<FrontierPoint> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (i == j) continue;
            const auto& a = points[i];
            const auto& b = points[j];
            const bool weakly = b.mortality <= a.mortality && b.econ_loss <= a.econ_loss;
            const bool strictly = b.mortality < a.mortality || b.econ_loss < a.econ_loss;
            dominated = weakly && (strictly || j < i);
        }
        if (!dominated) out.push_back(points[i]);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const FrontierPoint& a, const FrontierPoint& b) { return a.mortality > b.mortality; });
    return out;
}

/// Optimizes every chi in an ascending grid, warm-starting each search with
/// the previous optimum. `nested_seeds`, when given, supplies one extra seed
/// per grid point (e.g. the optimum of a smaller family at the same chi).
/// Returns the raw per-chi points in grid order.
inline std::vector<FrontierPoint> sweep(Family family, const ModelParams& p, std::span<const double> chi_grid,
                                        const SearchConfig& cfg,
                                        std::span<const PolicySchedule> nested_seeds = {}) {
    if (chi_grid.empty()) throw std::invalid_argument("sweep: chi grid is empty");
    if (!std::is_sorted(chi_grid.begin(), chi_grid.end()))
        throw std::invalid_argument("sweep: chi grid must be sorted ascending");
    if (!nested_seeds.empty() && nested_seeds.size() != chi_grid.size())
        throw std::invalid_argument("sweep: need one nested seed per chi");
    std::vector<FrontierPoint> out;
    out.reserve(chi_grid.size());
    for (std::size_t i = 0; i < chi_grid.size(); ++i) {
        std::vector<PolicySchedule> seeds;
        if (!nested_seeds.empty()) seeds.push_back(nested_seeds[i]);
        if (!out.empty()) seeds.push_back(out.back().policy);
        out.push_back(optimize_policy(family, p, chi_grid[i], cfg, seeds));
    }
    return out;
}

/// Pareto-filtered frontier over a chi grid.
inline std::vector<FrontierPoint> frontier(Family family, const ModelParams& p, std::span<const double> chi_grid,
                                           const SearchConfig& cfg,
                                           std::span<const PolicySchedule> nested_seeds = {}) {
    return pareto_filter(sweep(family, p, chi_grid, cfg, nested_seeds));
}

/// Pareto filter over `swept` plus the points of a smaller family's frontier,
/// re-expressed in `family` and re-evaluated. Every schedule of the smaller
/// family is a schedule of the larger one, so the result weakly dominates
/// `nested` point by point.
inline std::vector<FrontierPoint> merge_nested(Family family, const ModelParams& p,
                                               std::vector<FrontierPoint> swept,
                                               std::span<const FrontierPoint> nested, const SearchConfig& cfg) {
    for (const auto& n : nested) {
        if (!nests_in(n.policy.family, family)) continue;
        FrontierPoint pt = make_point(embed(n.policy, family), p, n.chi, cfg.dt);
        pt.seed = n.seed;
        swept.push_back(std::move(pt));
    }
    return pareto_filter(std::move(swept));
}

/// Policies of the raw sweep, for seeding a larger family or another scenario.
inline std::vector<PolicySchedule> policies_of(std::span<const FrontierPoint> points) {
    std::vector<PolicySchedule> out;
    out.reserve(points.size());
    for (const auto& pt : points) out.push_back(pt.policy);
    return out;
}

/// Chi scale at which shielding everyone for the whole horizon breaks even
/// with doing nothing: (loss(L=1) - loss(L=0)) / (mortality(L=0) - mortality(L=1)).
inline double reference_chi(const ModelParams& p, const SearchConfig& cfg) {
    const auto none = evaluate_policy(PolicySchedule::zero(Family::uniform, p.horizon, cfg.intervals), p, 0.0, cfg.dt);
    const auto full =
        evaluate_policy(PolicySchedule::constant(Family::uniform, p.horizon, cfg.intervals, 1.0), p, 0.0, cfg.dt);
    const double dm = none.mortality - full.mortality;
    const double de = full.econ_loss - none.econ_loss;
    if (!(dm > 0.0) || !(de > 0.0)) return 1.0;
    return de / dm;
}

/// Log-spaced chi grid around the probed reference scale, spanning
/// [reference / 100, reference * 100].
inline std::vector<double> default_chi_grid(const ModelParams& p, const SearchConfig& cfg, std::size_t n = 24) {
    if (n == 0) return {};
    const double ref = reference_chi(p, cfg);
    const double lo = std::log(ref / 100.0);
    const double hi = std::log(ref * 100.0);
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1);
        grid[i] = std::exp(lo + u * (hi - lo));
    }
    return grid;
}

inline constexpr double kSafetyChiUpper = 1e8;
inline constexpr std::size_t kSafetyMaxIterations = 25;

/// Minimal-economic-loss schedule whose mortality stays at or below `cap`.
/// Bisects chi (geometric midpoints on [1, 1e8] after a chi = 0 probe) until
/// the optimized mortality lands in [0.95 cap, cap], then returns the
/// cheapest feasible point among everything evaluated, including the seeds
/// and the full-shielding schedule.
inline FrontierPoint safety_policy(Family family, const ModelParams& p, double cap, const SearchConfig& cfg,
                                   std::span<const PolicySchedule> seeds = {}) {
    const PolicySchedule full = PolicySchedule::constant(family, p.horizon, cfg.intervals, 1.0);
    FrontierPoint full_pt = make_point(full, p, kSafetyChiUpper, cfg.dt);
    if (full_pt.mortality > cap)
        throw OptimizationError("mortality cap " + format_double(cap) + " is infeasible: full shielding gives " +
                                format_double(full_pt.mortality));

    std::size_t evals = 1;
    std::vector<FrontierPoint> candidates{full_pt};
    for (const auto& s : detail::usable_seeds(family, p, cfg.intervals, seeds)) {
        candidates.push_back(make_point(detail::decode(family, p, cfg.intervals, s), p, 0.0, cfg.dt));
        ++evals;
    }

    std::vector<PolicySchedule> base_seeds(seeds.begin(), seeds.end());
    FrontierPoint first = optimize_policy(family, p, 0.0, cfg, base_seeds);
    evals += first.evaluations;
    if (first.mortality <= cap) {
        first.evaluations = evals;
        return first;
    }
    candidates.push_back(first);

    double lo = 0.0;
    double hi = kSafetyChiUpper;
    std::optional<PolicySchedule> last_feasible;
    PolicySchedule last = first.policy;
    for (std::size_t it = 0; it < kSafetyMaxIterations; ++it) {
        const double chi = std::sqrt(std::max(lo, 1.0) * hi);
        std::vector<PolicySchedule> s = base_seeds;
        s.push_back(last);
        if (last_feasible) s.push_back(*last_feasible);
        FrontierPoint pt = optimize_policy(family, p, chi, cfg, s);
        evals += pt.evaluations;
        candidates.push_back(pt);
        last = pt.policy;
        if (pt.mortality > cap) {
            lo = chi;
        } else {
            hi = chi;
            last_feasible = pt.policy;
            if (pt.mortality >= 0.95 * cap) break;
        }
    }

    const FrontierPoint* best = nullptr;
    for (const auto& c : candidates)
        if (c.mortality <= cap && (!best || c.econ_loss < best->econ_loss)) best = &c;
    FrontierPoint out = *best;
    out.evaluations = evals;
    out.seed = cfg.seed;
    return out;
}

}  // namespace mgseir

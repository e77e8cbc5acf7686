#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "mgseir/parallel.hpp"

namespace mgseir {

enum class DeStrategy { rand1_bin, best1_bin, current_to_best1_bin };

struct DeSettings {
    std::size_t population = 24;
    std::size_t generations = 120;
    double weight = 0.7;      // differential weight F
    double crossover = 0.9;   // CR
    DeStrategy strategy = DeStrategy::current_to_best1_bin;
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

struct DeResult {
    std::vector<double> best;
    double value = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    bool converged = false;  // final population spread below 1e-6 relative
};

/// Synchronous differential evolution on the unit box [0,1]^dim.
///
/// Trial vectors for a generation are drawn sequentially from one seeded
/// generator, evaluated (possibly concurrently), then selected in index
/// order, so results do not depend on the number of workers. Seed vectors
/// replace the first members of the initial population. Out-of-box
/// coordinates are clipped to the bound.
template <class Objective>
DeResult differential_evolution(Objective&& f, std::size_t dim, const DeSettings& cfg,
                                std::span<const std::vector<double>> seeds = {}) {
    if (dim == 0) throw std::invalid_argument("differential_evolution: dimension must be >= 1");
    const std::size_t np = std::max<std::size_t>(cfg.population, 4);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, np - 1);
    std::uniform_int_distribution<std::size_t> pick_dim(0, dim - 1);

    std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
    for (std::size_t i = 0; i < np; ++i) {
        if (i < seeds.size() && seeds[i].size() == dim) {
            for (std::size_t k = 0; k < dim; ++k) pop[i][k] = std::clamp(seeds[i][k], 0.0, 1.0);
        } else {
            for (auto& v : pop[i]) v = unit(rng);
        }
    }

    DeResult res;
    std::vector<double> fit(np);
    parallel_for(np, [&](std::size_t i) { fit[i] = f(pop[i]); }, cfg.workers);
    res.evaluations += np;

    auto best_index = [&] {
        return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
    };

    std::vector<std::vector<double>> trials(np, std::vector<double>(dim));
    std::vector<double> trial_fit(np);
    for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
        const std::size_t b = best_index();
        for (std::size_t i = 0; i < np; ++i) {
            std::size_t r1, r2, r3;
            do r1 = pick(rng); while (r1 == i);
            do r2 = pick(rng); while (r2 == i || r2 == r1);
            do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
            const std::size_t forced = pick_dim(rng);
            auto& trial = trials[i];
            for (std::size_t k = 0; k < dim; ++k) {
                const bool cross = unit(rng) < cfg.crossover || k == forced;
                if (!cross) {
                    trial[k] = pop[i][k];
                    continue;
                }
                double v = 0.0;
                switch (cfg.strategy) {
                case DeStrategy::rand1_bin: v = pop[r1][k] + cfg.weight * (pop[r2][k] - pop[r3][k]); break;
                case DeStrategy::best1_bin: v = pop[b][k] + cfg.weight * (pop[r1][k] - pop[r2][k]); break;
                case DeStrategy::current_to_best1_bin:
                    v = pop[i][k] + cfg.weight * (pop[b][k] - pop[i][k]) + cfg.weight * (pop[r1][k] - pop[r2][k]);
                    break;
                }
                trial[k] = std::clamp(v, 0.0, 1.0);
            }
        }
        parallel_for(np, [&](std::size_t i) { trial_fit[i] = f(trials[i]); }, cfg.workers);
        res.evaluations += np;
        for (std::size_t i = 0; i < np; ++i)
            if (trial_fit[i] <= fit[i]) {
                std::swap(pop[i], trials[i]);
                fit[i] = trial_fit[i];
            }
    }

    const std::size_t b = best_index();
    res.best = pop[b];
    res.value = fit[b];
    const auto [lo, hi] = std::minmax_element(fit.begin(), fit.end());
    res.converged = (*hi - *lo) <= 1e-6 * (1.0 + std::abs(*lo));
    return res;
}

struct PolishResult {
    std::vector<double> best;
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Coordinate descent on [0,1]^dim: try +/- step on each coordinate, keep
/// improvements, halve the step once a full sweep stalls.
template <class Objective>
PolishResult coordinate_polish(Objective&& f, std::vector<double> x, double fx, double step_start = 0.1,
                               double step_end = 1e-4, std::size_t max_sweeps_per_step = 25) {
    PolishResult out{std::move(x), fx, 0};
    for (double step = step_start; step >= step_end; step *= 0.5) {
        for (std::size_t sweep = 0; sweep < max_sweeps_per_step; ++sweep) {
            bool improved = false;
            for (std::size_t k = 0; k < out.best.size(); ++k) {
                for (double dir : {1.0, -1.0}) {
                    const double old = out.best[k];
                    const double cand = std::clamp(old + dir * step, 0.0, 1.0);
                    if (cand == old) continue;
                    out.best[k] = cand;
                    const double v = f(out.best);
                    ++out.evaluations;
                    if (v < out.value) {
                        out.value = v;
                        improved = true;
                        break;
                    }
                    out.best[k] = old;
                }
            }
            if (!improved) break;
        }
    }
    return out;
}

}  // namespace mgseir

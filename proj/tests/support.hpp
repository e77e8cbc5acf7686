#pragma once

// Seeded generators for property tests.

#include <random>

#include "mgseir/mgseir.hpp"

namespace testsupport {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random parameters that pass validation.
inline mgseir::ModelParams random_params(std::mt19937_64& rng) {
    using namespace mgseir;
    ModelParams p = germany_baseline();
    double a = uniform(rng, 0.1, 1.0), b = uniform(rng, 0.1, 1.0), c = uniform(rng, 0.1, 1.0);
    const double s = a + b + c;
    p.groups[0].population_share = a / s;
    p.groups[1].population_share = b / s;
    p.groups[2].population_share = 1.0 - a / s - b / s;
    for (auto& g : p.groups) {
        g.income = uniform(rng, 0.05, 2.0);
        g.remaining_employment = uniform(rng, 0.0, 40.0 * 365.0);
        g.icu_share = uniform(rng, 0.0, 0.2);
        g.latent_exit = uniform(rng, 0.1, 0.5);
        g.infectious_exit = uniform(rng, 0.05, 0.3);
        g.baseline_death_rate = uniform(rng, 0.0, 0.9) * g.infectious_exit;
        g.shielding_leakage = uniform(rng, 0.3, 0.95);
        g.shielded_productivity = uniform(rng, 0.0, 1.0);
        g.undetected_infectious = uniform(rng, 0.5, 1.0);
        g.undetected_exposed = uniform(rng, 0.5, 1.0);
        g.immunity_passport = uniform(rng, 0.0, 1.0);
    }
    for (std::size_t j = 0; j < kGroups; ++j)
        for (std::size_t k = j; k < kGroups; ++k) {
            const double v = uniform(rng, 0.05, 1.0);
            p.contacts.rho[j][k] = p.contacts.rho[k][j] = v;
        }
    p.beta = uniform(rng, 0.1, 0.8);
    p.mortality_lambda = uniform(rng, 0.0, 2.0);
    p.initial_exposed_share = uniform(rng, 1e-4, 0.02);
    require_valid(p);
    return p;
}

inline mgseir::PolicySchedule random_policy(std::mt19937_64& rng, mgseir::Family f, double horizon,
                                            std::size_t intervals) {
    auto p = mgseir::PolicySchedule::zero(f, horizon, intervals);
    for (auto& v : p.levels) v = uniform(rng, 0.0, 1.0);
    return p;
}

}  // namespace testsupport

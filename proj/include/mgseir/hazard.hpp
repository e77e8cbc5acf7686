#pragma once

#include <algorithm>

#include "mgseir/model.hpp"

namespace mgseir {

/// Total ICU load H = sum_j iota_j I_j.
inline double icu_load(const ModelState& s, const ModelParams& p) noexcept {
    double h = 0.0;
    for (std::size_t j = 0; j < kGroups; ++j) h += p.groups[j].icu_share * s.groups[j].I;
    return h;
}

struct DeathRates {
    PerGroup<double> rate{};
    bool clamped = false;  // some group hit the gamma^I ceiling
};

/// ICU death rate with congestion: baseline * (1 + lambda H), capped at
/// gamma^I so the implied ICU recovery rate stays nonnegative.
inline DeathRates death_rates(double icu, const ModelParams& p) noexcept {
    DeathRates out;
    const double congestion = 1.0 + p.mortality_lambda * icu;
    for (std::size_t j = 0; j < kGroups; ++j) {
        const GroupParams& g = p.groups[j];
        const double raw = g.baseline_death_rate * congestion;
        if (raw > g.infectious_exit) {
            out.rate[j] = g.infectious_exit;
            out.clamped = true;
        } else {
            out.rate[j] = raw;
        }
    }
    return out;
}

}  // namespace mgseir

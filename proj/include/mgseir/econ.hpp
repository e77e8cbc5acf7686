#pragma once

#include "mgseir/hazard.hpp"
#include "mgseir/model.hpp"

namespace mgseir {

/// Instantaneous income loss of one group, split by source (income units per day).
struct LossBreakdown {
    double susceptible_shielding = 0.0;
    double exposed = 0.0;
    double infectious = 0.0;
    double recovered_shielding = 0.0;
    double death_productivity = 0.0;

    double total() const noexcept {
        return susceptible_shielding + exposed + infectious + recovered_shielding + death_productivity;
    }

    LossBreakdown& operator+=(const LossBreakdown& o) noexcept {
        susceptible_shielding += o.susceptible_shielding;
        exposed += o.exposed;
        infectious += o.infectious;
        recovered_shielding += o.recovered_shielding;
        death_productivity += o.death_productivity;
        return *this;
    }
};

/// Loss terms of one group at shielding level `level` and ICU death rate `death_rate`.
/// Each group's own detection probabilities enter the exposed and infectious terms.
inline LossBreakdown group_loss(const Compartments& c, double level, const GroupParams& g,
                                double death_rate) noexcept {
    const double lost = (1.0 - g.shielded_productivity) * g.income;
    LossBreakdown out;
    out.susceptible_shielding = lost * c.S * level;
    out.exposed = lost * c.E * (1.0 - g.undetected_exposed * (1.0 - level));
    out.infectious = lost * c.I * (1.0 - g.undetected_exposed * g.undetected_infectious * (1.0 - level));
    out.recovered_shielding = lost * (1.0 - g.immunity_passport) * c.R * level;
    out.death_productivity = g.income * g.remaining_employment * g.icu_share * death_rate * c.I;
    return out;
}

/// Per-group breakdown; the death rate is evaluated at the current ICU load.
inline PerGroup<LossBreakdown> instantaneous_loss(const ModelState& s, const Levels& L, const ModelParams& p) {
    const DeathRates dr = death_rates(icu_load(s, p), p);
    PerGroup<LossBreakdown> out{};
    for (std::size_t j = 0; j < kGroups; ++j) out[j] = group_loss(s.groups[j], L[j], p.groups[j], dr.rate[j]);
    return out;
}

/// One year of undisrupted output, sum_j w_j N_j * 365, in income units.
inline double annual_gdp(const ModelParams& p) noexcept {
    double daily = 0.0;
    for (const auto& g : p.groups) daily += g.income * g.population_share;
    return daily * 365.0;
}

/// Loss measured in years of output.
inline double loss_gdp_years(double loss, const ModelParams& p) noexcept { return loss / annual_gdp(p); }

/// Loss in percent of one year's output (the figure axis).
inline double loss_pct_gdp(double loss, const ModelParams& p) noexcept { return 100.0 * loss_gdp_years(loss, p); }

}  // namespace mgseir

#pragma once

#include "mgseir/calibration.hpp"
#include "mgseir/model.hpp"

namespace mgseir {

inline constexpr double kDaysPerYear = 365.0;
inline constexpr double kBaselineR0 = 2.4;

/// Pre-distancing contact matrix (young, middle, senior).
inline ContactMatrix reference_contact_matrix() {
    return ContactMatrix{{{{1.0, 0.5, 0.4}, {0.5, 0.6, 0.4}, {0.4, 0.4, 0.5}}}};
}

/// Calibrated German baseline.
///
/// ICU shares, shielding leakage and the initial exposed share are not
/// published values; they are placeholders that can be overridden in the
/// parameter file.
inline ModelParams germany_baseline() {
    ModelParams p;
    constexpr PerGroup<double> shares{0.46, 0.28, 0.26};
    constexpr PerGroup<double> income{1.0, 1.0, 0.085};
    constexpr PerGroup<double> employment_years{32.43, 10.44, 2.50};
    constexpr PerGroup<double> death_rate{0.001, 0.01, 0.06};
    constexpr PerGroup<double> icu_share{0.002, 0.02, 0.08};  // placeholder

    for (std::size_t j = 0; j < kGroups; ++j) {
        GroupParams& g = p.groups[j];
        g.population_share = shares[j];
        g.income = income[j];
        g.remaining_employment = employment_years[j] * kDaysPerYear;
        g.icu_share = icu_share[j];
        g.baseline_death_rate = death_rate[j];
        g.latent_exit = 1.0 / 6.0;
        g.infectious_exit = 1.0 / 9.0;
        g.shielding_leakage = 0.75;  // placeholder
        g.shielded_productivity = 0.3;
        g.undetected_infectious = 0.9;
        g.undetected_exposed = 1.0;
        g.immunity_passport = 1.0;
    }
    p.reference_contacts = reference_contact_matrix();
    p.contacts = scale_contacts(p.reference_contacts, ContactMask::all(), 0.75);
    p.matching_alpha = 2.0;
    p.mortality_lambda = 0.6;
    p.icu_cap = std::nullopt;
    p.horizon = 546.0;
    p.initial_exposed_share = 0.003;  // placeholder
    p.beta = calibrate_beta(p, kBaselineR0);
    return p;
}

}  // namespace mgseir

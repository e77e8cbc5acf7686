#pragma once

#include <stdexcept>

#include "mgseir/dynamics.hpp"
#include "mgseir/econ.hpp"

namespace mgseir {

/// Integrated economic loss up to the horizon (income units).
inline double total_economic_loss(const Trajectory& tr) {
    if (!tr.complete()) throw std::invalid_argument("total_economic_loss: trajectory does not reach the horizon");
    return tr.final_state().accumulated_loss;
}

/// Deaths by the horizon, as a fraction of the total population.
inline double total_mortality(const ModelState& s) noexcept {
    double d = 0.0;
    for (const auto& c : s.groups) d += c.D;
    return d;
}

inline double total_mortality(const Trajectory& tr) {
    if (tr.states.empty()) throw std::invalid_argument("total_mortality: empty trajectory");
    return total_mortality(tr.final_state());
}

/// Planner objective: economic loss + chi * mortality.
inline double objective(double econ_loss, double mortality, double chi) {
    if (!(chi >= 0.0)) throw std::invalid_argument("objective: chi must be >= 0");
    return econ_loss + chi * mortality;
}

inline double objective(const Trajectory& tr, double chi) {
    return objective(total_economic_loss(tr), total_mortality(tr), chi);
}

/// Trapezoid integrals of each loss term per group over a recorded
/// trajectory. Reporting only; the objective uses the RK4 loss coordinate.
inline PerGroup<LossBreakdown> loss_breakdown_integrals(const Trajectory& tr, const ModelParams& p) {
    PerGroup<LossBreakdown> acc{};
    if (tr.states.size() < 2) return acc;
    for (std::size_t i = 1; i < tr.states.size(); ++i) {
        // The level in force on [t_{i-1}, t_i) applies at both ends.
        const Levels& L = tr.levels[i - 1];
        const bool last = i + 1 == tr.states.size();
        const ModelState& right = last && tr.terminal_applied ? tr.pre_terminal : tr.states[i];
        const PerGroup<LossBreakdown> a = instantaneous_loss(tr.states[i - 1], L, p);
        const PerGroup<LossBreakdown> b = instantaneous_loss(right, L, p);
        const double w = 0.5 * (tr.times[i] - tr.times[i - 1]);
        for (std::size_t j = 0; j < kGroups; ++j) {
            acc[j].susceptible_shielding += w * (a[j].susceptible_shielding + b[j].susceptible_shielding);
            acc[j].exposed += w * (a[j].exposed + b[j].exposed);
            acc[j].infectious += w * (a[j].infectious + b[j].infectious);
            acc[j].recovered_shielding += w * (a[j].recovered_shielding + b[j].recovered_shielding);
            acc[j].death_productivity += w * (a[j].death_productivity + b[j].death_productivity);
        }
    }
    return acc;
}

}  // namespace mgseir

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgseir/calibration.hpp"
#include "mgseir/econ.hpp"
#include "mgseir/hazard.hpp"
#include "mgseir/model.hpp"
#include "mgseir/policy.hpp"
#include "mgseir/rk4.hpp"

namespace mgseir {

/// Raised when a trajectory cannot be computed (CLI exit code 3).
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-group rates of change plus the loss rate.
struct StateDerivative {
    PerGroup<Compartments> groups{};
    double loss = 0.0;
    bool death_clamped = false;
};

/// Matching congestion factor M_j; identically 1 when alpha == 2.
inline double matching_factor(const ModelState& s, const Levels& L, const ModelParams& p, std::size_t j) {
    if (p.matching_alpha == 2.0) return 1.0;
    const double theta_j = p.groups[j].shielding_leakage;
    double bracket = 0.0;
    for (std::size_t k = 0; k < kGroups; ++k) {
        const GroupParams& g = p.groups[k];
        const Compartments& c = s.groups[k];
        const double active = c.S + g.undetected_exposed * c.E +
                              g.undetected_exposed * g.undetected_infectious * c.I +
                              (1.0 - g.immunity_passport) * c.R;
        bracket += p.contacts.rho[j][k] * (active * (1.0 - theta_j * L[k]) + g.immunity_passport * c.R);
    }
    return std::pow(bracket, p.matching_alpha - 2.0);
}

/// New-exposed rate per group.
inline PerGroup<double> force_of_infection(const ModelState& s, const Levels& L, const ModelParams& p) {
    PerGroup<double> pressure{};
    for (std::size_t k = 0; k < kGroups; ++k) {
        const GroupParams& g = p.groups[k];
        pressure[k] = g.undetected_exposed * g.undetected_infectious * (1.0 - g.shielding_leakage * L[k]) *
                      s.groups[k].I;
    }
    PerGroup<double> out{};
    for (std::size_t j = 0; j < kGroups; ++j) {
        double contact = 0.0;
        for (std::size_t k = 0; k < kGroups; ++k) contact += p.contacts.rho[j][k] * pressure[k];
        if (contact == 0.0 || s.groups[j].S == 0.0) continue;
        out[j] = matching_factor(s, L, p, j) * p.beta * (1.0 - p.groups[j].shielding_leakage * L[j]) *
                 s.groups[j].S * contact;
    }
    return out;
}

namespace detail {

inline constexpr std::size_t kFlatSize = kGroups * 5 + 1;
using FlatState = std::array<double, kFlatSize>;

/// Right-hand side for fixed shielding levels on the flat layout
/// [S,E,I,R,D] x {y,m,s} followed by the loss coordinate.
class RateKernel {
public:
    RateKernel(const ModelParams& p, const Levels& L) : p_(p), L_(L) {
        quadratic_ = p.matching_alpha == 2.0;
        for (std::size_t j = 0; j < kGroups; ++j) {
            const GroupParams& g = p.groups[j];
            const double shield = 1.0 - g.shielding_leakage * L[j];
            susceptibility_[j] = p.beta * shield;
            infectivity_[j] = g.undetected_exposed * g.undetected_infectious * shield;
        }
    }

    /// Returns true when the death-rate ceiling was active.
    bool operator()(const FlatState& y, FlatState& dy) const {
        PerGroup<double> pressure{};
        double icu = 0.0;
        for (std::size_t k = 0; k < kGroups; ++k) {
            pressure[k] = infectivity_[k] * y[5 * k + 2];
            icu += p_.groups[k].icu_share * y[5 * k + 2];
        }
        const double congestion = 1.0 + p_.mortality_lambda * icu;
        bool clamped = false;
        double loss = 0.0;
        for (std::size_t j = 0; j < kGroups; ++j) {
            const GroupParams& g = p_.groups[j];
            const Compartments c{y[5 * j], y[5 * j + 1], y[5 * j + 2], y[5 * j + 3], y[5 * j + 4]};
            double contact = 0.0;
            for (std::size_t k = 0; k < kGroups; ++k) contact += p_.contacts.rho[j][k] * pressure[k];
            double infections = 0.0;
            if (contact != 0.0 && c.S != 0.0) {
                infections = susceptibility_[j] * c.S * contact;
                if (!quadratic_) infections *= matching_factor(unflatten(y), L_, p_, j);
            }
            double death = g.baseline_death_rate * congestion;
            if (death > g.infectious_exit) {
                death = g.infectious_exit;
                clamped = true;
            }
            const double onset = g.latent_exit * c.E;
            const double in_icu = g.icu_share * c.I;
            dy[5 * j + 0] = -infections;
            dy[5 * j + 1] = infections - onset;
            dy[5 * j + 2] = onset - g.infectious_exit * c.I;
            dy[5 * j + 3] = (g.infectious_exit - death) * in_icu + g.infectious_exit * (c.I - in_icu);
            dy[5 * j + 4] = death * in_icu;
            loss += group_loss(c, L_[j], g, death).total();
        }
        dy[kFlatSize - 1] = loss;
        return clamped;
    }

    static ModelState unflatten(const FlatState& f) noexcept {
        ModelState s;
        for (std::size_t j = 0; j < kGroups; ++j)
            s.groups[j] = Compartments{f[5 * j + 0], f[5 * j + 1], f[5 * j + 2], f[5 * j + 3], f[5 * j + 4]};
        s.accumulated_loss = f[kFlatSize - 1];
        return s;
    }

    static FlatState flatten(const ModelState& s) noexcept {
        FlatState f{};
        for (std::size_t j = 0; j < kGroups; ++j) {
            const Compartments& c = s.groups[j];
            f[5 * j + 0] = c.S;
            f[5 * j + 1] = c.E;
            f[5 * j + 2] = c.I;
            f[5 * j + 3] = c.R;
            f[5 * j + 4] = c.D;
        }
        f[kFlatSize - 1] = s.accumulated_loss;
        return f;
    }

private:
    const ModelParams& p_;
    Levels L_;
    bool quadratic_ = true;
    PerGroup<double> susceptibility_{};
    PerGroup<double> infectivity_{};
};

inline FlatState flatten(const ModelState& s) noexcept { return RateKernel::flatten(s); }
inline ModelState unflatten(const FlatState& f) noexcept { return RateKernel::unflatten(f); }

}  // namespace detail

/// Right-hand side at fixed shielding levels.
inline StateDerivative rates(const ModelState& s, const Levels& L, const ModelParams& p) {
    detail::FlatState dy{};
    StateDerivative d;
    d.death_clamped = detail::RateKernel(p, L)(detail::flatten(s), dy);
    for (std::size_t j = 0; j < kGroups; ++j)
        d.groups[j] = Compartments{dy[5 * j], dy[5 * j + 1], dy[5 * j + 2], dy[5 * j + 3], dy[5 * j + 4]};
    d.loss = dy[detail::kFlatSize - 1];
    return d;
}

/// Time derivative under `policy` at day t, for t in [0, horizon).
inline StateDerivative derivative(const ModelState& s, double t, const PolicySchedule& policy, const ModelParams& p) {
    if (!(t >= 0.0) || t >= p.horizon)
        throw std::domain_error("derivative: t must lie in [0, horizon); no dynamics after the vaccine date");
    return rates(s, policy.at(t), p);
}

/// Vaccine and cure: everyone alive moves to R.
inline ModelState apply_vaccine_terminal(const ModelState& s) noexcept {
    ModelState out = s;
    for (auto& c : out.groups) {
        c.R += c.S + c.E + c.I;
        c.S = c.E = c.I = 0.0;
    }
    return out;
}

struct IntegrationDiagnostics {
    double clamp_mass = 0.0;        // total mass added by clamping negative compartments
    std::size_t clamp_events = 0;
    std::size_t death_clamp_steps = 0;  // steps where the death-rate ceiling was active
    double icu_excess = 0.0;        // integral of max(0, H - icu_cap), zero without a cap
    double max_icu = 0.0;
};

struct IntegrateOptions {
    bool apply_terminal = true;
    bool record = true;
};

/// Recorded trajectory. states[i] is the state at times[i]; when the terminal
/// event is applied the last entry is the post-vaccine state and
/// `pre_terminal` holds the state just before it.
struct Trajectory {
    double dt = 0.0;
    double horizon = 0.0;
    bool terminal_applied = false;
    PolicySchedule policy;
    std::vector<double> times;
    std::vector<ModelState> states;
    std::vector<double> icu;
    std::vector<double> rt;
    std::vector<Levels> levels;
    ModelState pre_terminal;
    IntegrationDiagnostics diagnostics;

    bool complete() const noexcept {
        return !states.empty() && !times.empty() && std::abs(times.back() - horizon) <= 1e-9 * horizon;
    }
    const ModelState& final_state() const { return states.back(); }
};

namespace detail {

inline std::size_t step_count(double horizon, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
    const double ratio = horizon / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw ConfigError("horizon " + format_double(horizon) + " is not an integer multiple of dt " +
                          format_double(dt));
    return static_cast<std::size_t>(rounded);
}

inline constexpr double kMaxClampMass = 1e-6;

/// Shared stepping loop. `observe(i, t, state, levels, icu)` is called at every
/// grid point before the terminal event.
template <class Observer>
ModelState run_dynamics(const ModelParams& p, const PolicySchedule& policy, double dt, IntegrationDiagnostics& diag,
                        Observer&& observe) {
    if (std::abs(policy.horizon - p.horizon) > 1e-9 * p.horizon)
        throw ConfigError("policy horizon " + format_double(policy.horizon) + " does not match model horizon " +
                          format_double(p.horizon));
    if (auto probs = policy.problems(); !probs.empty()) throw ConfigError(probs.front());
    const std::size_t steps = step_count(p.horizon, dt);

    FlatState y = flatten(initial_state(p));
    std::size_t death_clamped = 0;
    const double cap = p.icu_cap.value_or(std::numeric_limits<double>::infinity());
    auto icu_of = [&](const FlatState& f) {
        double h = 0.0;
        for (std::size_t j = 0; j < kGroups; ++j) h += p.groups[j].icu_share * f[5 * j + 2];
        return h;
    };

    double h_prev = icu_of(y);
    diag.max_icu = h_prev;
    observe(std::size_t{0}, 0.0, y, policy.at(0.0), h_prev);

    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const Levels L = policy.at(t);
        const RateKernel kernel(p, L);
        bool clamped_here = false;
        auto f = [&](double, const FlatState& state) {
            FlatState dy;
            clamped_here = kernel(state, dy) || clamped_here;
            return dy;
        };
        y = rk4_step(y, t, dt, f);
        if (clamped_here) ++death_clamped;
        for (std::size_t k = 0; k + 1 < kFlatSize; ++k) {
            if (!std::isfinite(y[k])) throw IntegrationError("non-finite state at t=" + format_double(t + dt));
            if (y[k] < 0.0) {
                diag.clamp_mass -= y[k];
                ++diag.clamp_events;
                y[k] = 0.0;
            }
        }
        if (diag.clamp_mass > kMaxClampMass)
            throw IntegrationError("negative-value clamp mass " + format_double(diag.clamp_mass) +
                                   " exceeds 1e-6; reduce dt");
        const double t_next = static_cast<double>(i + 1) * dt;
        const double h = icu_of(y);
        diag.icu_excess += 0.5 * dt * (std::max(0.0, h_prev - cap) + std::max(0.0, h - cap));
        diag.max_icu = std::max(diag.max_icu, h);
        h_prev = h;
        observe(i + 1, t_next, y, policy.at(t_next), h);
    }
    diag.death_clamp_steps = death_clamped;
    return unflatten(y);
}

}  // namespace detail

/// Fixed-step RK4 trajectory from the initial state implied by e0. The loss
/// integral is carried as an extra coordinate through the same stages.
inline Trajectory integrate(const ModelParams& p, const PolicySchedule& policy, double dt,
                            const IntegrateOptions& opts = {}) {
    Trajectory tr;
    tr.dt = dt;
    tr.horizon = p.horizon;
    tr.policy = policy;
    const bool ngm_ok = p.matching_alpha == 2.0;
    auto observe = [&](std::size_t, double t, const detail::FlatState& y, const Levels& L, double h) {
        if (!opts.record) return;
        ModelState s = detail::unflatten(y);
        tr.times.push_back(t);
        tr.icu.push_back(h);
        tr.levels.push_back(L);
        tr.rt.push_back(ngm_ok ? effective_rt(s, L, p) : std::numeric_limits<double>::quiet_NaN());
        tr.states.push_back(s);
    };
    const ModelState last = detail::run_dynamics(p, policy, dt, tr.diagnostics, observe);
    tr.pre_terminal = last;
    if (!opts.record) {
        tr.times.push_back(p.horizon);
        tr.states.push_back(last);
        tr.icu.push_back(icu_load(last, p));
        tr.levels.push_back(policy.at(p.horizon));
        tr.rt.push_back(ngm_ok ? effective_rt(last, tr.levels.back(), p)
                               : std::numeric_limits<double>::quiet_NaN());
    }
    if (opts.apply_terminal) {
        tr.terminal_applied = true;
        const ModelState post = apply_vaccine_terminal(last);
        tr.states.back() = post;
        tr.icu.back() = icu_load(post, p);
        tr.rt.back() = ngm_ok ? effective_rt(post, tr.levels.back(), p) : std::numeric_limits<double>::quiet_NaN();
    }
    return tr;
}

/// Scalar outcome of one run without storing the path.
struct RunOutcome {
    ModelState final_state;  // post-terminal
    IntegrationDiagnostics diagnostics;
};

inline RunOutcome simulate_outcome(const ModelParams& p, const PolicySchedule& policy, double dt) {
    RunOutcome out;
    auto ignore = [](std::size_t, double, const detail::FlatState&, const Levels&, double) {};
    out.final_state = apply_vaccine_terminal(detail::run_dynamics(p, policy, dt, out.diagnostics, ignore));
    return out;
}

}  // namespace mgseir

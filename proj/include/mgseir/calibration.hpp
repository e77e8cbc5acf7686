#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mgseir/model.hpp"

namespace mgseir {

/// Next-generation matrix: K[j][k] is the expected number of new infections
/// in group j caused by one infectious member of group k.
struct NextGenMatrix {
    Matrix3 K{};
    bool shielding = false;   // (1 - theta L) factors folded in
    bool detection = false;   // eta^E eta^I folded in
    bool depletion = false;   // current S rather than N
};

/// Only defined for the quadratic matching case (alpha = 2).
inline NextGenMatrix next_generation_matrix(const ModelParams& p, const ModelState& state, const Levels& L) {
    if (p.matching_alpha != 2.0)
        throw std::domain_error("next-generation matrix requires matching_alpha == 2");
    NextGenMatrix out;
    out.shielding = true;
    out.detection = true;
    out.depletion = true;
    for (std::size_t j = 0; j < kGroups; ++j) {
        const double sj = (1.0 - p.groups[j].shielding_leakage * L[j]) * state.groups[j].S;
        for (std::size_t k = 0; k < kGroups; ++k) {
            const GroupParams& gk = p.groups[k];
            const double transmit = gk.undetected_exposed * gk.undetected_infectious *
                                    (1.0 - gk.shielding_leakage * L[k]);
            out.K[j][k] = gk.infectious_exit > 0.0
                              ? p.beta * sj * p.contacts.rho[j][k] * transmit / gk.infectious_exit
                              : 0.0;
        }
    }
    return out;
}

/// Disease-free, policy-free, detection-free matrix on the reference
/// (pre-distancing) contacts, scaled by `beta`.
inline NextGenMatrix calibration_ngm(const ModelParams& p, double beta) {
    NextGenMatrix out;
    for (std::size_t j = 0; j < kGroups; ++j)
        for (std::size_t k = 0; k < kGroups; ++k) {
            const double gamma = p.groups[k].infectious_exit;
            out.K[j][k] = gamma > 0.0
                              ? beta * p.groups[j].population_share * p.reference_contacts.rho[j][k] / gamma
                              : 0.0;
        }
    return out;
}

namespace detail {

inline bool power_iterate(const Matrix3& A, double shift, double& result) {
    std::array<double, kGroups> x{1.0, 1.0, 1.0};
    double prev = -1.0;
    for (int it = 0; it < 10000; ++it) {
        std::array<double, kGroups> y{};
        for (std::size_t i = 0; i < kGroups; ++i) {
            double acc = shift * x[i];
            for (std::size_t k = 0; k < kGroups; ++k) acc += A[i][k] * x[k];
            y[i] = acc;
        }
        double norm = 0.0;
        for (double v : y) norm = std::max(norm, std::abs(v));
        if (norm == 0.0) {
            result = 0.0;
            return true;
        }
        for (std::size_t i = 0; i < kGroups; ++i) x[i] = y[i] / norm;
        if (std::abs(norm - prev) <= 1e-12 * norm) {
            result = norm - shift;
            return true;
        }
        prev = norm;
    }
    return false;
}

}  // namespace detail

/// Perron root of a nonnegative 3x3 matrix by power iteration (relative
/// tolerance 1e-12, at most 1e4 iterations). Periodic matrices that make the
/// plain iteration oscillate are retried with a diagonal shift.
inline double spectral_radius(const Matrix3& A) {
    double norm_inf = 0.0;
    for (const auto& row : A) {
        double s = 0.0;
        for (double v : row) {
            if (!std::isfinite(v)) throw std::invalid_argument("spectral_radius: non-finite entry");
            s += std::abs(v);
        }
        norm_inf = std::max(norm_inf, s);
    }
    if (norm_inf == 0.0) return 0.0;
    double r = 0.0;
    if (detail::power_iterate(A, 0.0, r)) return r;
    if (detail::power_iterate(A, norm_inf, r)) return r;
    throw std::runtime_error("spectral_radius: power iteration did not converge");
}

inline double spectral_radius(const NextGenMatrix& K) { return spectral_radius(K.K); }

/// Returns beta such that the calibration NGM has spectral radius `target_r0`.
/// R0 is linear in beta, so one evaluation at beta = 1 suffices.
inline double calibrate_beta(const ModelParams& p, double target_r0) {
    if (!(target_r0 > 0.0) || !std::isfinite(target_r0))
        throw std::invalid_argument("calibrate_beta: target R0 must be > 0");
    const double unit = spectral_radius(calibration_ngm(p, 1.0));
    if (!(unit > 0.0)) throw std::invalid_argument("calibrate_beta: degenerate contact matrix");
    return target_r0 / unit;
}

/// Basic reproduction number implied by p.beta in the calibration context.
inline double basic_reproduction_number(const ModelParams& p) {
    return spectral_radius(calibration_ngm(p, p.beta));
}

/// Spectral radius of the NGM at the current state, shielding and detection.
inline double effective_rt(const ModelState& state, const Levels& L, const ModelParams& p) {
    return spectral_radius(next_generation_matrix(p, state, L));
}

/// Share of an infected cohort that dies with no ICU congestion:
/// iota_j * baseline_death_rate_j / gamma^I_j.
inline PerGroup<double> implied_ifr(const ModelParams& p) {
    PerGroup<double> out{};
    for (std::size_t j = 0; j < kGroups; ++j) {
        const GroupParams& g = p.groups[j];
        out[j] = g.infectious_exit > 0.0 ? g.icu_share * g.baseline_death_rate / g.infectious_exit : 0.0;
    }
    return out;
}

}  // namespace mgseir

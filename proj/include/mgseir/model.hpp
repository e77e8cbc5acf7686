#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mgseir/format.hpp"

namespace mgseir {

inline constexpr std::size_t kGroups = 3;

/// Age groups. The numeric value is the array index used everywhere.
enum class GroupId : std::size_t { young = 0, middle = 1, senior = 2 };

inline constexpr std::array<GroupId, kGroups> kAllGroups{GroupId::young, GroupId::middle,
                                                        GroupId::senior};

constexpr std::size_t idx(GroupId g) noexcept { return static_cast<std::size_t>(g); }

constexpr std::string_view group_name(GroupId g) noexcept {
    switch (g) {
    case GroupId::young: return "young";
    case GroupId::middle: return "middle";
    case GroupId::senior: return "senior";
    }
    return "?";
}

/// Short suffix used in CSV headers (S_y, S_m, S_s).
constexpr std::string_view group_suffix(GroupId g) noexcept {
    switch (g) {
    case GroupId::young: return "y";
    case GroupId::middle: return "m";
    case GroupId::senior: return "s";
    }
    return "?";
}

inline std::optional<GroupId> parse_group(std::string_view name) {
    for (GroupId g : kAllGroups)
        if (name == group_name(g) || name == group_suffix(g)) return g;
    return std::nullopt;
}

template <class T>
using PerGroup = std::array<T, kGroups>;

/// Shielding intensity L_j per group, each in [0,1].
using Levels = PerGroup<double>;

using Matrix3 = std::array<std::array<double, kGroups>, kGroups>;

/// Raised for configuration or parameter problems (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Symmetric contact-rate matrix; entries multiply the transmission rate.
struct ContactMatrix {
    Matrix3 rho{};

    double operator()(GroupId j, GroupId k) const noexcept { return rho[idx(j)][idx(k)]; }
    double& operator()(GroupId j, GroupId k) noexcept { return rho[idx(j)][idx(k)]; }

    bool symmetric() const noexcept {
        for (std::size_t j = 0; j < kGroups; ++j)
            for (std::size_t k = j + 1; k < kGroups; ++k)
                if (rho[j][k] != rho[k][j]) return false;
        return true;
    }

    friend bool operator==(const ContactMatrix&, const ContactMatrix&) = default;
};

/// Set of (j,k) entries a contact transform acts on.
class ContactMask {
public:
    ContactMask() = default;
    ContactMask(std::initializer_list<std::pair<GroupId, GroupId>> pairs) {
        for (auto [j, k] : pairs) add(j, k);
    }

    /// Adds (j,k) and its mirror (k,j).
    ContactMask& add(GroupId j, GroupId k) {
        bits_[idx(j)][idx(k)] = true;
        bits_[idx(k)][idx(j)] = true;
        return *this;
    }

    bool contains(std::size_t j, std::size_t k) const noexcept { return bits_[j][k]; }

    bool disjoint(const ContactMask& other) const noexcept {
        for (std::size_t j = 0; j < kGroups; ++j)
            for (std::size_t k = 0; k < kGroups; ++k)
                if (bits_[j][k] && other.bits_[j][k]) return false;
        return true;
    }

    static ContactMask all() {
        ContactMask m;
        for (GroupId j : kAllGroups)
            for (GroupId k : kAllGroups) m.add(j, k);
        return m;
    }

    /// rho_ys and rho_ms (contacts of the two working-age groups with seniors).
    static ContactMask senior_cross() {
        return {{GroupId::young, GroupId::senior}, {GroupId::middle, GroupId::senior}};
    }

    /// rho_yy, rho_mm and rho_ym.
    static ContactMask working_age() {
        return {{GroupId::young, GroupId::young},
                {GroupId::middle, GroupId::middle},
                {GroupId::young, GroupId::middle}};
    }

    static ContactMask within_senior() { return {{GroupId::senior, GroupId::senior}}; }

private:
    std::array<std::array<bool, kGroups>, kGroups> bits_{};
};

/// Multiplies the masked entries by `factor`. The mask is symmetric by
/// construction, so symmetric input stays symmetric.
inline ContactMatrix scale_contacts(const ContactMatrix& m, const ContactMask& mask, double factor) {
    if (!(factor >= 0.0) || !std::isfinite(factor))
        throw std::invalid_argument("contact scale factor must be a finite nonnegative number, got " +
                                    format_double(factor));
    ContactMatrix out = m;
    for (std::size_t j = 0; j < kGroups; ++j)
        for (std::size_t k = 0; k < kGroups; ++k)
            if (mask.contains(j, k)) out.rho[j][k] *= factor;
    return out;
}

struct GroupParams {
    double population_share = 0.0;      // N_j, fraction of total adult population
    double income = 0.0;                // w_j, per-capita daily income (young = 1)
    double remaining_employment = 0.0;  // Delta_j, in days
    double icu_share = 0.0;             // iota_j
    double baseline_death_rate = 0.0;   // per day, ICU patients, before congestion
    double latent_exit = 0.0;           // gamma^E_j, per day
    double infectious_exit = 0.0;       // gamma^I_j, per day
    double shielding_leakage = 0.0;     // theta_j in [0,1)
    double shielded_productivity = 0.0; // xi_j
    double undetected_infectious = 1.0; // eta^I_j
    double undetected_exposed = 1.0;    // eta^E_j
    double immunity_passport = 1.0;     // kappa_j

    friend bool operator==(const GroupParams&, const GroupParams&) = default;
};

struct ModelParams {
    PerGroup<GroupParams> groups{};
    /// Contact matrix used by the dynamics.
    ContactMatrix contacts{};
    /// Pre-distancing matrix rho^0; used for beta calibration and for
    /// scenarios that rebuild the contact matrix from scratch.
    ContactMatrix reference_contacts{};
    double beta = 0.0;
    double matching_alpha = 2.0;
    double mortality_lambda = 0.0;
    std::optional<double> icu_cap;
    double horizon = 0.0;  // days until vaccine and cure
    double initial_exposed_share = 0.0;

    const GroupParams& group(GroupId g) const noexcept { return groups[idx(g)]; }
    GroupParams& group(GroupId g) noexcept { return groups[idx(g)]; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Compartments of one group as fractions of the TOTAL population.
struct Compartments {
    double S = 0.0;
    double E = 0.0;
    double I = 0.0;
    double R = 0.0;
    double D = 0.0;

    double total() const noexcept { return S + E + I + R + D; }

    friend bool operator==(const Compartments&, const Compartments&) = default;
};

struct ModelState {
    PerGroup<Compartments> groups{};
    double accumulated_loss = 0.0;

    const Compartments& operator[](GroupId g) const noexcept { return groups[idx(g)]; }
    Compartments& operator[](GroupId g) noexcept { return groups[idx(g)]; }

    friend bool operator==(const ModelState&, const ModelState&) = default;
};

/// Everyone susceptible except a share e0 of each group placed in E.
inline ModelState initial_state(const ModelParams& p) {
    ModelState s;
    for (std::size_t j = 0; j < kGroups; ++j) {
        const double n = p.groups[j].population_share;
        s.groups[j].E = p.initial_exposed_share * n;
        s.groups[j].S = n - s.groups[j].E;
    }
    return s;
}

namespace detail {

inline void check_share(std::vector<std::string>& out, std::string_view field, GroupId g, double v) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        out.push_back(std::string(field) + "[" + std::string(group_name(g)) + "] must be in [0,1], got " +
                      format_double(v));
}

inline void check_rate(std::vector<std::string>& out, std::string_view field, GroupId g, double v) {
    if (!std::isfinite(v) || v < 0.0)
        out.push_back(std::string(field) + "[" + std::string(group_name(g)) + "] must be >= 0, got " +
                      format_double(v));
}

inline void check_matrix(std::vector<std::string>& out, std::string_view field, const ContactMatrix& m) {
    for (std::size_t j = 0; j < kGroups; ++j)
        for (std::size_t k = 0; k < kGroups; ++k)
            if (!std::isfinite(m.rho[j][k]) || m.rho[j][k] < 0.0)
                out.push_back(std::string(field) + ".rho[" + std::to_string(j) + "][" + std::to_string(k) +
                              "] must be >= 0, got " + format_double(m.rho[j][k]));
    if (!m.symmetric()) out.push_back(std::string(field) + " must be symmetric");
}

}  // namespace detail

/// Lists every invariant violation. An empty result means the parameters are valid.
inline std::vector<std::string> validate(const ModelParams& p) {
    std::vector<std::string> out;
    double share_sum = 0.0;
    for (const auto& g : p.groups) share_sum += g.population_share;
    if (!(std::abs(share_sum - 1.0) <= 1e-12))
        out.push_back("population shares sum to " + format_double(share_sum));

    for (GroupId id : kAllGroups) {
        const GroupParams& g = p.group(id);
        detail::check_share(out, "population_share", id, g.population_share);
        detail::check_rate(out, "income", id, g.income);
        detail::check_rate(out, "remaining_employment", id, g.remaining_employment);
        detail::check_share(out, "icu_share", id, g.icu_share);
        detail::check_rate(out, "baseline_death_rate", id, g.baseline_death_rate);
        detail::check_rate(out, "latent_exit", id, g.latent_exit);
        detail::check_rate(out, "infectious_exit", id, g.infectious_exit);
        detail::check_share(out, "shielded_productivity", id, g.shielded_productivity);
        detail::check_share(out, "undetected_infectious", id, g.undetected_infectious);
        detail::check_share(out, "undetected_exposed", id, g.undetected_exposed);
        detail::check_share(out, "immunity_passport", id, g.immunity_passport);
        if (!std::isfinite(g.shielding_leakage) || g.shielding_leakage < 0.0)
            out.push_back("shielding_leakage[" + std::string(group_name(id)) + "] must be >= 0");
        else if (g.shielding_leakage >= 1.0)
            out.push_back("shielding_leakage[" + std::string(group_name(id)) + "] must be < 1");
        if (g.baseline_death_rate > g.infectious_exit)
            out.push_back("baseline_death_rate[" + std::string(group_name(id)) +
                          "] must not exceed infectious_exit");
    }

    detail::check_matrix(out, "contacts", p.contacts);
    detail::check_matrix(out, "reference_contacts", p.reference_contacts);

    if (!(p.beta > 0.0) || !std::isfinite(p.beta)) out.push_back("beta must be > 0");
    if (!(p.matching_alpha >= 2.0) || !std::isfinite(p.matching_alpha))
        out.push_back("matching_alpha must be >= 2");
    if (!(p.mortality_lambda >= 0.0) || !std::isfinite(p.mortality_lambda))
        out.push_back("mortality_lambda must be >= 0");
    if (p.icu_cap && (!(*p.icu_cap > 0.0) || !std::isfinite(*p.icu_cap)))
        out.push_back("icu_cap must be > 0 when present");
    if (!(p.horizon > 0.0) || !std::isfinite(p.horizon)) out.push_back("horizon must be > 0");
    if (!(p.initial_exposed_share >= 0.0 && p.initial_exposed_share <= 0.05))
        out.push_back("initial_exposed_share must be in [0, 0.05]");
    return out;
}

/// Throws ConfigError listing all violations.
inline void require_valid(const ModelParams& p) {
    auto errs = validate(p);
    if (errs.empty()) return;
    std::string msg = "invalid parameters:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
}

}  // namespace mgseir

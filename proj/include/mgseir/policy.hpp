#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mgseir/model.hpp"

namespace mgseir {

/// Targeting family: how many independent shielding schedules exist.
enum class Family { uniform, semi_targeted, fully_targeted };

constexpr std::size_t channel_count(Family f) noexcept {
    switch (f) {
    case Family::uniform: return 1;
    case Family::semi_targeted: return 2;
    case Family::fully_targeted: return 3;
    }
    return 0;
}

/// Channel that drives group g. Semi-targeted: 0 = {young, middle}, 1 = senior.
constexpr std::size_t channel_of(Family f, GroupId g) noexcept {
    switch (f) {
    case Family::uniform: return 0;
    case Family::semi_targeted: return g == GroupId::senior ? 1 : 0;
    case Family::fully_targeted: return idx(g);
    }
    return 0;
}

constexpr std::string_view family_name(Family f) noexcept {
    switch (f) {
    case Family::uniform: return "uniform";
    case Family::semi_targeted: return "semi";
    case Family::fully_targeted: return "full";
    }
    return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
    if (s == "uniform") return Family::uniform;
    if (s == "semi" || s == "semi_targeted") return Family::semi_targeted;
    if (s == "full" || s == "fully_targeted") return Family::fully_targeted;
    return std::nullopt;
}

/// Piecewise-constant shielding schedule on K equal intervals of [0, horizon).
/// Levels are stored channel-major: levels[c * K + i].
struct PolicySchedule {
    Family family = Family::uniform;
    double horizon = 0.0;
    std::size_t intervals = 1;
    std::vector<double> levels;

    static PolicySchedule constant(Family f, double horizon, std::size_t intervals, double value) {
        if (intervals == 0) throw std::invalid_argument("policy needs at least one interval");
        return PolicySchedule{f, horizon, intervals,
                              std::vector<double>(channel_count(f) * intervals, value)};
    }

    static PolicySchedule zero(Family f, double horizon, std::size_t intervals) {
        return constant(f, horizon, intervals, 0.0);
    }

    std::size_t channels() const noexcept { return channel_count(family); }
    std::size_t dimension() const noexcept { return channels() * intervals; }
    double interval_length() const noexcept { return horizon / static_cast<double>(intervals); }

    double level(std::size_t channel, std::size_t interval) const { return levels.at(channel * intervals + interval); }

    /// Interval index containing t, or `intervals` when t >= horizon.
    std::size_t interval_at(double t) const noexcept {
        if (t >= horizon) return intervals;
        if (t <= 0.0) return 0;
        const auto i = static_cast<std::size_t>(std::floor(t * static_cast<double>(intervals) / horizon));
        return std::min(i, intervals - 1);
    }

    /// L_j(t): right-continuous, zero from the horizon on.
    Levels at(double t) const {
        Levels out{};
        const std::size_t i = interval_at(t);
        if (i >= intervals) return out;
        for (GroupId g : kAllGroups) out[idx(g)] = levels[channel_of(family, g) * intervals + i];
        return out;
    }

    /// Empty when well formed.
    std::vector<std::string> problems() const {
        std::vector<std::string> out;
        if (intervals == 0) out.emplace_back("policy intervals must be >= 1");
        if (!(horizon > 0.0)) out.emplace_back("policy horizon must be > 0");
        if (levels.size() != channels() * intervals)
            out.push_back("policy expects " + std::to_string(channels() * intervals) + " levels, got " +
                          std::to_string(levels.size()));
        for (double v : levels)
            if (!(v >= 0.0 && v <= 1.0)) {
                out.emplace_back("policy levels must lie in [0,1]");
                break;
            }
        return out;
    }

    friend bool operator==(const PolicySchedule&, const PolicySchedule&) = default;
};

/// Is every schedule of `inner` expressible in `outer`?
constexpr bool nests_in(Family inner, Family outer) noexcept {
    return channel_count(inner) <= channel_count(outer);
}

/// Re-expresses a schedule in a larger family (same L_j(t) for every group).
inline PolicySchedule embed(const PolicySchedule& p, Family target) {
    if (p.family == target) return p;
    if (!nests_in(p.family, target))
        throw std::invalid_argument("cannot embed a " + std::string(family_name(p.family)) + " policy into " +
                                    std::string(family_name(target)));
    PolicySchedule out = PolicySchedule::zero(target, p.horizon, p.intervals);
    for (GroupId g : kAllGroups) {
        const std::size_t src = channel_of(p.family, g);
        const std::size_t dst = channel_of(target, g);
        for (std::size_t i = 0; i < p.intervals; ++i)
            out.levels[dst * p.intervals + i] = p.levels[src * p.intervals + i];
    }
    return out;
}

}  // namespace mgseir

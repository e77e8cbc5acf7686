#pragma once

// Independent reference computations used by the tests. None of these call
// into the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Root of f on [lo, hi] by plain bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
    double flo = f(lo);
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Positive root of z = 1 - exp(-r0 z) for r0 > 1.
inline double final_size(double r0) {
    return bisect([r0](double z) { return z - 1.0 + std::exp(-r0 * z); }, 1e-9, 1.0);
}

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Largest real root of the characteristic cubic
/// x^3 - tr x^2 + m x - det, which for a nonnegative matrix is its spectral radius.
inline double perron_root(const Mat3& a) {
    const double tr = a[0][0] + a[1][1] + a[2][2];
    const double m = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] +
                     a[1][1] * a[2][2] - a[1][2] * a[2][1];
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    auto p = [&](double x) { return ((x - tr) * x + m) * x - det; };

    double bound = 0.0;
    for (const auto& row : a) bound = std::max(bound, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
    bound = 2.0 * bound + 1.0;

    // p' = 3x^2 - 2 tr x + m; p is increasing to the right of its larger critical point.
    const double disc = tr * tr - 3.0 * m;
    if (disc > 0.0) {
        const double c_hi = (tr + std::sqrt(disc)) / 3.0;
        const double c_lo = (tr - std::sqrt(disc)) / 3.0;
        if (p(c_hi) <= 0.0) return bisect(p, c_hi, bound);
        return bisect(p, -bound, c_lo);
    }
    return bisect(p, -bound, bound);
}

/// Composite trapezoid rule on samples y over a uniform grid of step h.
inline double trapezoid(const std::vector<double>& y, double h) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
    return s * h;
}

}  // namespace oracle

#pragma once

#include <array>
#include <cstddef>

namespace mgseir {

/// One classic fourth-order Runge-Kutta step for dy/dt = f(t, y).
template <std::size_t N, class Rhs>
std::array<double, N> rk4_step(const std::array<double, N>& y, double t, double h, Rhs&& f) {
    using State = std::array<double, N>;
    auto axpy = [](const State& base, double a, const State& k) {
        State out;
        for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + a * k[i];
        return out;
    };
    const double half = 0.5 * h;
    const State k1 = f(t, y);
    const State k2 = f(t + half, axpy(y, half, k1));
    const State k3 = f(t + half, axpy(y, half, k2));
    const State k4 = f(t + h, axpy(y, h, k3));
    State out;
    const double sixth = h / 6.0;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace mgseir

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hybridplant/errors.hpp"

namespace hybridplant {

enum class Integrator { Rk4, Euler };

namespace detail {

inline void check_finite(const std::vector<double>& x, const char* stage) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]))
            throw SimulationFault(std::string("non-finite derivative in channel ") +
                                  std::to_string(i) + " during " + stage);
}

} // namespace detail

// One explicit fixed step of x' = f(x). The derivative function must be
// total on the state domain; non-finite output raises a fault naming the
// offending channel.
inline std::vector<double> integrate_step(const std::vector<double>& x,
                                          const std::function<std::vector<double>(const std::vector<double>&)>& f,
                                          double dt, Integrator method = Integrator::Rk4) {
    if (dt <= 0.0) throw DomainError("dt must be positive");
    const std::size_t n = x.size();
    std::vector<double> out(n);
    if (method == Integrator::Euler) {
        auto k1 = f(x);
        detail::check_finite(k1, "euler step");
        for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + dt * k1[i];
        return out;
    }
    auto k1 = f(x);
    detail::check_finite(k1, "rk4 stage 1");
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    auto k2 = f(tmp);
    detail::check_finite(k2, "rk4 stage 2");
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    auto k3 = f(tmp);
    detail::check_finite(k3, "rk4 stage 3");
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    auto k4 = f(tmp);
    detail::check_finite(k4, "rk4 stage 4");
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Fixed-size fast path for the chain steppers' inner loops.
template <std::size_t N, typename F>
inline std::array<double, N> rk4_step(const std::array<double, N>& x, F&& f, double dt) {
    std::array<double, N> tmp, out;
    auto k1 = f(x);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    auto k2 = f(tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    auto k3 = f(tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + dt * k3[i];
    auto k4 = f(tmp);
    for (std::size_t i = 0; i < N; ++i)
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

} // namespace hybridplant

#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "hybridplant/errors.hpp"

namespace hybridplant {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kGridOmega = kTwoPi * 50.0;  // rad/s, 50 Hz grid

struct PiGains {
    double kp = 0.0;
    double ki = 0.0;  // 1/s
};

// Discrete PI with trapezoidal integration and clamping anti-windup: the
// accumulator only advances while the unsaturated command stays inside
// [u_min, u_max].
struct PiState {
    double integral_accum = 0.0;
    double prev_error = 0.0;
    double u_min = -std::numeric_limits<double>::infinity();
    double u_max = std::numeric_limits<double>::infinity();
};

inline double pi_step(PiState& state, const PiGains& gains, double error, double ts) {
    if (ts <= 0.0) throw DomainError("sampling time must be positive");
    double increment = 0.5 * ts * (error + state.prev_error);
    double u = gains.kp * error + gains.ki * (state.integral_accum + increment);
    if (u >= state.u_min && u <= state.u_max) {
        state.integral_accum += increment;
    } else {
        u = u < state.u_min ? state.u_min : state.u_max;
    }
    state.prev_error = error;
    return u;
}

struct DqPair {
    double d = 0.0;
    double q = 0.0;
};

struct GridAngle {
    double theta = 0.0;  // rad, wrapped to [0, 2pi)
    double omega = kGridOmega;
};

inline double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    return t < 0.0 ? t + kTwoPi : t;
}

// Amplitude-invariant (2/3-scaled) rotating-frame transform: a balanced
// unit-cosine set maps to (d=1, q=0) at every angle.
inline DqPair abc_to_dq(double va, double vb, double vc, double theta) {
    const double c0 = std::cos(theta);
    const double c1 = std::cos(theta - kTwoPi / 3.0);
    const double c2 = std::cos(theta - 2.0 * kTwoPi / 3.0);
    const double s0 = std::sin(theta);
    const double s1 = std::sin(theta - kTwoPi / 3.0);
    const double s2 = std::sin(theta - 2.0 * kTwoPi / 3.0);
    return {2.0 / 3.0 * (c0 * va + c1 * vb + c2 * vc),
            2.0 / 3.0 * (-s0 * va - s1 * vb - s2 * vc)};
}

inline std::array<double, 3> dq_to_abc(const DqPair& pair, double theta) {
    const double c0 = std::cos(theta);
    const double c1 = std::cos(theta - kTwoPi / 3.0);
    const double c2 = std::cos(theta - 2.0 * kTwoPi / 3.0);
    const double s0 = std::sin(theta);
    const double s1 = std::sin(theta - kTwoPi / 3.0);
    const double s2 = std::sin(theta - 2.0 * kTwoPi / 3.0);
    return {c0 * pair.d - s0 * pair.q, c1 * pair.d - s1 * pair.q, c2 * pair.d - s2 * pair.q};
}

// Ideal stiff-grid angle source; replaces a PLL because the simulated grid
// is an ideal balanced sinusoid with known frequency.
inline GridAngle ideal_grid_angle(double t, double omega = kGridOmega, double theta0 = 0.0) {
    if (t < 0.0) throw DomainError("time must be >= 0");
    return {wrap_angle(theta0 + omega * t), omega};
}

struct LegVoltages {
    std::array<double, 3> v = {0.0, 0.0, 0.0};
    bool saturated = false;
};

// Switching-period average of a two-level leg: pole voltage equals duty
// ratio times the bus voltage. Out-of-range duties saturate and flag.
inline LegVoltages averaged_leg_voltage(const std::array<double, 3>& duty, double vdc) {
    if (vdc <= 0.0) throw DomainError("bus voltage must be positive");
    LegVoltages out;
    for (int k = 0; k < 3; ++k) {
        double d = duty[k];
        if (d < 0.0) {
            d = 0.0;
            out.saturated = true;
        } else if (d > 1.0) {
            d = 1.0;
            out.saturated = true;
        }
        out.v[k] = d * vdc;
    }
    return out;
}

} // namespace hybridplant

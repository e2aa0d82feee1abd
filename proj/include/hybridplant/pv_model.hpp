#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "hybridplant/config.hpp"
#include "hybridplant/errors.hpp"

namespace hybridplant {

inline constexpr double kCelsiusOffset = 273.15;

inline double celsius_to_kelvin(double c) { return c + kCelsiusOffset; }
inline double kelvin_to_celsius(double k) { return k - kCelsiusOffset; }

// Single-diode module constants. Defaults are the 350 W monocrystalline
// module the plant is built from (72 cells, datasheet values).
struct PvModuleParams {
    double i_sc = 9.68;            // short-circuit current, A
    double k_i = 5e-4;             // current temperature coefficient, A/K
    double v_oc = 46.5;            // open-circuit voltage, V
    double n_ideality = 1.2;
    int n_cells_series = 72;
    double e_g0 = 1.12;            // bandgap, eV
    double r_s = 0.100;            // series resistance, ohm
    double r_p = 515.0;            // shunt resistance, ohm
    double t_nominal = 298.15;     // reference cell temperature, K
    double q_charge = 1.6e-19;     // C
    double k_boltzmann = 1.38e-23; // J/K
    double p_max = 350.0;          // datasheet MPP power, W
    double v_mpp = 37.9;           // datasheet MPP voltage, V
    double i_mpp = 9.24;           // datasheet MPP current, A

    void validate() const {
        if (r_s <= 0 || r_p <= 0) throw ValidationError("resistances must be positive");
        if (i_sc <= 0 || v_oc <= 0) throw ValidationError("i_sc and v_oc must be positive");
        if (n_ideality < 1.0 || n_ideality > 2.0) throw ValidationError("ideality outside [1,2]");
        if (v_mpp >= v_oc) throw ValidationError("v_mpp must be below v_oc");
        if (i_mpp >= i_sc) throw ValidationError("i_mpp must be below i_sc");
    }

    // 1/(thermal voltage of the whole series string), 1/V
    double exponent_scale(double t_kelvin) const {
        if (t_kelvin <= 0.0) throw DomainError("cell temperature must be positive kelvin");
        return q_charge / (n_ideality * n_cells_series * k_boltzmann * t_kelvin);
    }

    static PvModuleParams from_config(const Config& cfg, const std::string& section = "pv_module") {
        PvModuleParams p;
        auto key = [&](const char* k) { return section + "." + k; };
        p.i_sc = cfg.get_double(key("i_sc"), p.i_sc);
        p.k_i = cfg.get_double(key("k_i"), p.k_i);
        p.v_oc = cfg.get_double(key("v_oc"), p.v_oc);
        p.n_ideality = cfg.get_double(key("n"), p.n_ideality);
        p.n_cells_series = static_cast<int>(cfg.get_int(key("n_s"), p.n_cells_series));
        p.e_g0 = cfg.get_double(key("e_g0"), p.e_g0);
        p.r_s = cfg.get_double(key("r_s"), p.r_s);
        p.r_p = cfg.get_double(key("r_p"), p.r_p);
        p.t_nominal = cfg.get_double(key("t_nominal_k"), p.t_nominal);
        p.q_charge = cfg.get_double(key("q"), p.q_charge);
        p.k_boltzmann = cfg.get_double(key("k"), p.k_boltzmann);
        p.p_max = cfg.get_double(key("p_max"), p.p_max);
        p.v_mpp = cfg.get_double(key("v_mpp"), p.v_mpp);
        p.i_mpp = cfg.get_double(key("i_mpp"), p.i_mpp);
        p.validate();
        return p;
    }
};

struct PvOperatingConditions {
    double g = 1000.0;       // plane-of-array irradiance, W/m^2
    double t_cell = 298.15;  // cell temperature, K

    void validate() const {
        if (g < 0.0) throw ValidationError("irradiance must be >= 0");
        if (t_cell <= 0.0) throw ValidationError("cell temperature must be positive kelvin");
    }
};

// 8 modules in series per set, 5 sets in parallel per string, 358 strings.
struct PvArrayLayout {
    int modules_series_per_set = 8;
    int sets_parallel_per_string = 5;
    int string_count = 358;

    void validate() const {
        if (modules_series_per_set < 1 || sets_parallel_per_string < 1 || string_count < 1)
            throw ValidationError("layout counts must be >= 1");
    }
    int modules_per_string() const { return modules_series_per_set * sets_parallel_per_string; }
    int total_modules() const { return modules_per_string() * string_count; }
};

struct IvPoint {
    double v = 0.0;
    double i = 0.0;
    double p = 0.0;
};

inline double photo_current(const PvOperatingConditions& cond, const PvModuleParams& params) {
    cond.validate();
    return (params.i_sc + params.k_i * (cond.t_cell - params.t_nominal)) * cond.g / 1000.0;
}

inline double reverse_saturation_current(const PvModuleParams& params, double t_kelvin) {
    double a = params.exponent_scale(t_kelvin);
    double ex = a * params.v_oc;
    if (ex > 700.0) throw DomainError("saturation-current exponent overflow at t = " + format_double(t_kelvin));
    return params.i_sc / (std::exp(ex) - 1.0);
}

inline double saturation_current(const PvModuleParams& params, double t_kelvin) {
    if (t_kelvin <= 0.0) throw DomainError("temperature must be positive kelvin");
    double i_rs = reverse_saturation_current(params, t_kelvin);
    double ratio = t_kelvin / params.t_nominal;
    double ex = params.q_charge * params.e_g0 * (1.0 / params.t_nominal - 1.0 / t_kelvin) /
                (params.n_ideality * params.k_boltzmann);
    if (ex > 700.0) throw DomainError("saturation-current exponent overflow");
    return i_rs * ratio * ratio * ratio * std::exp(ex);
}

namespace detail {

struct DiodeEquation {
    double i_ph, i_0, a, r_s, r_p, v;

    double residual(double i) const {
        return i_ph - i_0 * (std::exp(a * (v + i * r_s)) - 1.0) - (v + r_s * i) / r_p - i;
    }
    // strictly negative: residual is monotone decreasing in i
    double derivative(double i) const {
        return -i_0 * std::exp(a * (v + i * r_s)) * a * r_s - r_s / r_p - 1.0;
    }
};

inline DiodeEquation make_diode(double v, const PvOperatingConditions& cond,
                                const PvModuleParams& params) {
    return DiodeEquation{photo_current(cond, params), saturation_current(params, cond.t_cell),
                         params.exponent_scale(cond.t_cell), params.r_s, params.r_p, v};
}

} // namespace detail

// Output current at terminal voltage v. The current appears on both sides of
// the diode equation, so the root is found by damped Newton from the
// photo-current, with a bisection fallback when Newton stalls.
inline double solve_output_current(double v, const PvOperatingConditions& cond,
                                   const PvModuleParams& params, double tol = 1e-9,
                                   int max_iter = 100) {
    if (v < 0.0 || v > params.v_oc * 1.1)
        throw DomainError("terminal voltage outside [0, 1.1*v_oc]");
    auto eq = detail::make_diode(v, cond, params);
    double i = eq.i_ph;
    double r = eq.residual(i);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(r) < tol) return i;
        double step = -r / eq.derivative(i);
        // halve the step until the residual actually shrinks
        double damp = 1.0;
        double i_next = i + step;
        double r_next = eq.residual(i_next);
        int halvings = 0;
        while (!(std::isfinite(r_next) && std::abs(r_next) < std::abs(r)) && halvings < 50) {
            damp *= 0.5;
            i_next = i + damp * step;
            r_next = eq.residual(i_next);
            ++halvings;
        }
        if (halvings == 50) break;  // Newton stalled, fall back below
        i = i_next;
        r = r_next;
    }
    if (std::abs(r) < tol) return i;
    // bisection fallback on the monotone residual; the lower bracket can sit
    // far below -i_sc when a hot, dim cell is driven past its open circuit
    double lo = -params.i_sc, hi = eq.i_ph + 1.0;
    for (int k = 0; k < 40 && eq.residual(lo) < 0.0; ++k) lo *= 2.0;
    if (eq.residual(lo) < 0.0 || eq.residual(hi) > 0.0)
        throw SolverError("diode equation bracket failed, residual " + format_double(r));
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double rm = eq.residual(mid);
        if (std::abs(rm) < tol) return mid;
        (rm > 0.0 ? lo : hi) = mid;
    }
    throw SolverError("diode equation did not converge, residual " +
                      format_double(eq.residual(0.5 * (lo + hi))));
}

// Brute-force maximum power point over [0, v_oc] at voltage step dv.
inline IvPoint mpp_scan(const PvOperatingConditions& cond, const PvModuleParams& params,
                        double dv = 0.01) {
    if (dv <= 0.0 || dv > 1.0) throw DomainError("scan step must be in (0, 1] V");
    IvPoint best;
    for (double v = 0.0; v <= params.v_oc; v += dv) {
        double i = solve_output_current(v, cond, params);
        double p = v * i;
        if (p > best.p) best = {v, i, p};
    }
    return best;
}

// Golden-section refinement of the maximum power point; assumes the power
// curve is unimodal on [0, v_oc]. Used by the hourly runner where a full
// scan per hour would be wasteful.
inline IvPoint mpp_golden(const PvOperatingConditions& cond, const PvModuleParams& params,
                          double tol_v = 1e-4) {
    const double gr = 0.6180339887498949;
    double a = 0.0, b = params.v_oc;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    auto power = [&](double v) { return v * solve_output_current(v, cond, params); };
    double f1 = power(x1), f2 = power(x2);
    while (b - a > tol_v) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = power(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = power(x1);
        }
    }
    double v = 0.5 * (a + b);
    double i = solve_output_current(v, cond, params);
    return {v, i, v * i};
}

// NOCT linear cell-temperature model. All interfaces speak degC.
inline double cell_temperature(double t_ambient_c, double g, double noct_c = 45.0) {
    if (g < 0.0) throw DomainError("irradiance must be >= 0");
    return t_ambient_c + (noct_c - 20.0) * g / 800.0;
}

struct ArrayPower {
    double string_w = 0.0;
    double plant_w = 0.0;
};

// No loss factors here: the plant number is the plain module-count product.
inline ArrayPower array_power(double module_mpp_w, const PvArrayLayout& layout) {
    layout.validate();
    double string_w = module_mpp_w * layout.modules_per_string();
    return {string_w, string_w * layout.string_count};
}

// Series/shunt pair chosen so the modeled maximum power point lands on the
// datasheet (v_mpp, p_max), per the module vendor's characterization method:
// sweep r_s upward, solve r_p from the requirement P(v_mpp) = p_max, stop
// when the curve's scanned maximum equals p_max.
inline PvModuleParams calibrate_series_shunt(const PvModuleParams& base, double tol_w = 1e-3) {
    PvOperatingConditions stc{1000.0, base.t_nominal};
    double a = base.exponent_scale(base.t_nominal);
    double i0 = base.i_sc / (std::exp(a * base.v_oc) - 1.0);
    PvModuleParams best = base;
    double best_err = std::numeric_limits<double>::infinity();
    for (double rs = 0.001; rs < 1.0; rs += 0.001) {
        double den = base.v_mpp * base.i_sc -
                     base.v_mpp * i0 * (std::exp(a * (base.v_mpp + base.i_mpp * rs)) - 1.0) -
                     base.p_max;
        if (den <= 0.0) break;  // past the feasible r_s range
        double rp = base.v_mpp * (base.v_mpp + base.i_mpp * rs) / den;
        if (rp <= 0.0) continue;
        PvModuleParams cand = base;
        cand.r_s = rs;
        cand.r_p = rp;
        double p = mpp_golden(stc, cand, 1e-4).p;
        double err = std::abs(p - base.p_max);
        if (err < best_err) {
            best_err = err;
            best = cand;
        }
        if (err < tol_w) break;
    }
    if (!std::isfinite(best_err)) throw SolverError("series/shunt calibration found no feasible pair");
    return best;
}

} // namespace hybridplant

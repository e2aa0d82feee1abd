#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "hybridplant/control.hpp"
#include "hybridplant/errors.hpp"
#include "hybridplant/integrate.hpp"
#include "hybridplant/pv_model.hpp"

namespace hybridplant {

// ---------------------------------------------------------------------------
// DC-DC boost stage
// ---------------------------------------------------------------------------

struct BoostParams {
    double l = 5e-3;       // H
    double c = 1e-3;       // F
    double r_load = 10.0;  // equivalent load for standalone converter tests, ohm

    void validate() const {
        if (l <= 0 || c <= 0 || r_load <= 0) throw ValidationError("boost parameters must be positive");
    }
};

struct BoostState {
    double i_l = 0.0;  // inductor current, A
    double v_c = 0.0;  // capacitor voltage, V
};

// Averaged two-loop converter model; duty = 1 would short the input forever,
// so it is rejected.
inline std::array<double, 2> boost_derivatives(const BoostState& state, double v_in, double duty,
                                               const BoostParams& params) {
    params.validate();
    if (duty < 0.0 || duty >= 1.0) throw DomainError("duty must lie in [0, 1)");
    double di = (v_in - state.v_c * (1.0 - duty)) / params.l;
    double dv = (state.i_l * (1.0 - duty) - state.v_c / params.r_load) / params.c;
    return {di, dv};
}

// ---------------------------------------------------------------------------
// Perturb-and-observe tracker
// ---------------------------------------------------------------------------

struct MpptState {
    double v_ref = 0.0;       // commanded operating voltage, V
    double prev_power = 0.0;  // last observed power, W
    double prev_dv = 0.0;     // last applied signed step, V
    double dv_mag = 0.5;      // perturbation magnitude, V
};

// Keep stepping in the direction that did not lose power, reverse otherwise.
inline MpptState perturb_observe_step(const MpptState& state, double measured_power) {
    if (state.dv_mag <= 0.0) throw DomainError("perturbation magnitude must be positive");
    double delta_p = measured_power - state.prev_power;
    double last = state.prev_dv != 0.0 ? state.prev_dv : state.dv_mag;
    double step = delta_p >= 0.0 ? last : -last;
    MpptState next = state;
    next.v_ref = state.v_ref + step;
    next.prev_power = measured_power;
    next.prev_dv = step;
    return next;
}

// ---------------------------------------------------------------------------
// Averaged inverter and RL filter
// ---------------------------------------------------------------------------

// Line-to-neutral voltages of a two-level bridge from the averaged switch
// commands. Rows sum to zero: no zero-sequence output.
inline std::array<double, 3> inverter_phase_voltages(double s_a, double s_b, double s_c,
                                                     double vdc) {
    for (double s : {s_a, s_b, s_c})
        if (s < 0.0 || s > 1.0) throw DomainError("switch command outside [0,1]");
    double h = vdc / 2.0 / 3.0;
    return {h * (2.0 * s_a - s_b - s_c), h * (-s_a + 2.0 * s_b - s_c),
            h * (-s_a - s_b + 2.0 * s_c)};
}

struct RlFilterParams {
    double r_f = 0.75;     // ohm
    double l_f = 0.75e-3;  // H
    double omega = kGridOmega;

    void validate() const {
        if (r_f < 0 || l_f <= 0) throw ValidationError("filter parameters invalid");
    }
};

// Rotating-frame filter dynamics with cross-coupling. Current is positive
// flowing from the grid node toward the converter, so raising the converter
// voltage above the grid lowers the current.
inline std::array<double, 2> rl_filter_dq_derivatives(const DqPair& i, const DqPair& v_inv,
                                                      const DqPair& v_grid,
                                                      const RlFilterParams& params) {
    params.validate();
    double did = (v_grid.d - v_inv.d - params.r_f * i.d + params.l_f * params.omega * i.q) / params.l_f;
    double diq = (v_grid.q - v_inv.q - params.r_f * i.q - params.l_f * params.omega * i.d) / params.l_f;
    return {did, diq};
}

enum class PowerConvention {
    Paper,     // P = vd*id + vq*iq as printed, amplitude-invariant frame
    Physical,  // times 3/2, actual three-phase watts
};

struct PqPair {
    double p = 0.0;
    double q = 0.0;
};

inline PqPair measure_pq(const DqPair& v, const DqPair& i, PowerConvention convention) {
    double p = v.d * i.d + v.q * i.q;
    double q = v.q * i.d - v.d * i.q;
    if (convention == PowerConvention::Physical) {
        p *= 1.5;
        q *= 1.5;
    }
    return {p, q};
}

// ---------------------------------------------------------------------------
// Grid-power loop
// ---------------------------------------------------------------------------

struct PowerLoopState {
    PiState pi_d;   // reactive channel -> d-axis voltage
    PiState pi_q;   // active channel -> q-axis voltage
    double p_ref = 0.0;  // W (negative = inject into the grid)
    double q_ref = 0.0;  // var
    double p_base = 14000.0;  // error normalization, W
};

// Symmetric PI structure on normalized power errors. The filter convention
// makes the converter-voltage-to-power gain negative, so the errors are
// taken measurement-minus-reference; the PI outputs ride on a grid-voltage
// feed-forward so zero error means zero current.
inline DqPair power_loop_step(PowerLoopState& loop, const PiGains& gains, const PqPair& measured,
                              const DqPair& v_grid, double ts) {
    if (ts <= 0.0) throw DomainError("sampling time must be positive");
    double e_p = (measured.p - loop.p_ref) / loop.p_base;
    double e_q = (measured.q - loop.q_ref) / loop.p_base;
    double u_q = pi_step(loop.pi_q, gains, e_p, ts);
    double u_d = pi_step(loop.pi_d, gains, e_q, ts);
    return {v_grid.d + u_d, v_grid.q + u_q};
}

// ---------------------------------------------------------------------------
// One PV string: array at its tracker voltage, regulated DC link, averaged
// inverter behind an RL filter into a stiff grid. Single-owner stepper.
// ---------------------------------------------------------------------------

struct PvStringConfig {
    PvModuleParams module;
    PvArrayLayout layout;
    RlFilterParams filter;
    PiGains power_gains{5.6749, 11.6077};
    double v_grid_phase = 690.0 * 1.4142135623730951 / 1.7320508075688772;  // phase amplitude, V
    double vdc = 1200.0;
    double g = 1000.0;           // module irradiance, W/m^2
    double t_cell_c = 25.0;      // cell temperature, degC
    bool mppt_enabled = true;
    double mppt_dv = 0.5;        // V
    int mppt_decimation = 10;    // tracker updates every N control steps
    double v_ref0 = 30.0;        // tracker start voltage, V
    double fixed_p_ref = 0.0;    // W, used when the tracker is off (negative = inject)
    PowerConvention convention = PowerConvention::Physical;
};

class PvStringSim {
public:
    explicit PvStringSim(const PvStringConfig& cfg) : cfg_(cfg) {
        cfg_.layout.validate();
        double margin_d = 140.0;  // d-axis authority, V
        double v_lim = cfg_.vdc / 2.0;
        double q_head = std::sqrt(v_lim * v_lim - margin_d * margin_d);
        loop_.pi_d.u_min = -margin_d;
        loop_.pi_d.u_max = margin_d;
        loop_.pi_q.u_min = -(v_lim + cfg_.v_grid_phase);
        loop_.pi_q.u_max = q_head - cfg_.v_grid_phase;
        loop_.p_base = cfg_.module.p_max * cfg_.layout.modules_per_string();
        mppt_.v_ref = cfg_.v_ref0;
        mppt_.dv_mag = cfg_.mppt_dv;
        loop_.p_ref = cfg_.fixed_p_ref;
        loop_.q_ref = 0.0;
    }

    // Advance one control period: refresh the tracker (on its decimated
    // cadence), update the power loop, then integrate the filter at dt_e.
    void control_step(double dt_control, double dt_electrical) {
        PvOperatingConditions cond{cfg_.g, celsius_to_kelvin(cfg_.t_cell_c)};
        if (cfg_.mppt_enabled) {
            if (control_count_ % cfg_.mppt_decimation == 0) {
                double i = solve_output_current(mppt_.v_ref, cond, cfg_.module);
                double p_module = mppt_.v_ref * i;
                mppt_ = perturb_observe_step(mppt_, p_module);
                mppt_.v_ref = std::min(std::max(mppt_.v_ref, 1.0), cfg_.module.v_oc - 0.5);
                string_dc_power_ = p_module * cfg_.layout.modules_per_string();
                loop_.p_ref = -string_dc_power_;
            }
        } else {
            loop_.p_ref = cfg_.fixed_p_ref;
        }
        DqPair v_grid{0.0, cfg_.v_grid_phase};
        PqPair meas = measure_pq(v_grid, i_f_, cfg_.convention);
        v_inv_ = power_loop_step(loop_, cfg_.power_gains, meas, v_grid, dt_control);
        int n = std::max(1, static_cast<int>(std::lround(dt_control / dt_electrical)));
        double dt = dt_control / n;
        for (int k = 0; k < n; ++k) {
            std::array<double, 2> x{i_f_.d, i_f_.q};
            auto f = [&](const std::array<double, 2>& s) {
                return rl_filter_dq_derivatives({s[0], s[1]}, v_inv_, v_grid, cfg_.filter);
            };
            x = rk4_step<2>(x, f, dt);
            if (!std::isfinite(x[0]) || !std::isfinite(x[1]))
                throw SimulationFault("pv string filter current diverged");
            i_f_ = {x[0], x[1]};
        }
        ++control_count_;
    }

    // Reference override for scenarios that drive the loop directly.
    void set_p_ref(double p_ref_w) {
        cfg_.mppt_enabled = false;
        cfg_.fixed_p_ref = p_ref_w;
    }

    PqPair grid_power() const {
        return measure_pq({0.0, cfg_.v_grid_phase}, i_f_, cfg_.convention);
    }
    double p_ref() const { return loop_.p_ref; }
    double q_ref() const { return loop_.q_ref; }
    const DqPair& filter_current() const { return i_f_; }
    const MpptState& tracker() const { return mppt_; }
    const PvStringConfig& config() const { return cfg_; }

private:
    PvStringConfig cfg_;
    PowerLoopState loop_;
    MpptState mppt_;
    DqPair i_f_{};
    DqPair v_inv_{};
    double string_dc_power_ = 0.0;
    long control_count_ = 0;
};

} // namespace hybridplant

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "hybridplant/config.hpp"
#include "hybridplant/control.hpp"
#include "hybridplant/errors.hpp"
#include "hybridplant/integrate.hpp"
#include "hybridplant/pv_chain.hpp"

namespace hybridplant {

// ---------------------------------------------------------------------------
// Turbine aerodynamics and drivetrain
// ---------------------------------------------------------------------------

struct TurbineParams {
    double rho = 1.225;            // air density, kg/m^3
    double radius = 45.0;          // blade radius, m
    std::array<double, 6> cp_coeffs = {0.5176, 116.0, 0.4, 5.0, 21.0, 0.0068};
    double gearbox_ratio = 100.0;
    double j_turbine = 1.4e6;      // kg m^2 at the turbine shaft
    double j_generator = 114.0;    // kg m^2
    double f_viscous = 0.0;        // N m s/rad, generator side
    double lambda_opt = 7.07;      // tracking target
    double cp_max = 0.35;          // rating target
    double v_rated = 13.0;         // m/s
    double p_rated = 3e6;          // W
    double v_cut_in = 4.0;         // m/s
    double v_cut_out = 25.0;       // m/s
    double pitch_deg = 0.0;        // fixed at the aerodynamic optimum

    void validate() const {
        if (radius <= 0 || gearbox_ratio <= 0) throw ValidationError("turbine geometry invalid");
        if (cp_max <= 0 || cp_max >= 0.593) throw ValidationError("cp_max outside (0, 0.593)");
        if (!(v_cut_in < v_rated && v_rated < v_cut_out))
            throw ValidationError("need cut-in < rated < cut-out");
    }

    double inertia_generator_side() const {
        return j_turbine / (gearbox_ratio * gearbox_ratio) + j_generator;
    }

    static TurbineParams from_config(const Config& cfg, const std::string& section = "turbine") {
        TurbineParams p;
        auto key = [&](const char* k) { return section + "." + k; };
        p.rho = cfg.get_double(key("rho"), p.rho);
        p.radius = cfg.get_double(key("radius"), p.radius);
        auto coeffs = cfg.get_doubles(key("cp_coeffs"),
                                      {p.cp_coeffs.begin(), p.cp_coeffs.end()});
        if (coeffs.size() != 6) throw ConfigError("cp_coeffs needs exactly 6 values");
        std::copy(coeffs.begin(), coeffs.end(), p.cp_coeffs.begin());
        p.gearbox_ratio = cfg.get_double(key("gearbox_ratio"), p.gearbox_ratio);
        p.j_turbine = cfg.get_double(key("j_turbine"), p.j_turbine);
        p.j_generator = cfg.get_double(key("j_generator"), p.j_generator);
        p.f_viscous = cfg.get_double(key("f_viscous"), p.f_viscous);
        p.lambda_opt = cfg.get_double(key("lambda_opt"), p.lambda_opt);
        p.cp_max = cfg.get_double(key("cp_max"), p.cp_max);
        p.v_rated = cfg.get_double(key("v_rated"), p.v_rated);
        p.p_rated = cfg.get_double(key("p_rated"), p.p_rated);
        p.v_cut_in = cfg.get_double(key("v_cut_in"), p.v_cut_in);
        p.v_cut_out = cfg.get_double(key("v_cut_out"), p.v_cut_out);
        p.pitch_deg = cfg.get_double(key("pitch_deg"), p.pitch_deg);
        p.validate();
        return p;
    }
};

inline double tip_speed_ratio(double omega_t, double v, double radius) {
    if (v <= 0.0) throw DomainError("wind speed must be positive for tip speed ratio");
    return omega_t * radius / v;
}

// Empirical Cp(lambda, beta) surface for a three-bladed MW-class rotor,
// clamped at zero where the bracket goes negative.
inline double power_coefficient(double lambda, double beta_deg,
                                const std::array<double, 6>& c) {
    double denom = lambda + 0.08 * beta_deg;
    if (denom == 0.0) throw DomainError("singular lambda_i denominator");
    if (lambda <= 0.0) throw DomainError("lambda must be positive");
    double beta3 = beta_deg * beta_deg * beta_deg + 1.0;
    if (beta3 == 0.0) throw DomainError("singular pitch term");
    double inv_li = 1.0 / denom - 0.035 / beta3;
    double cp = c[0] * (c[1] * inv_li - c[2] * beta_deg - c[3]) * std::exp(-c[4] * inv_li) +
                c[5] * lambda;
    return cp > 0.0 ? cp : 0.0;
}

inline double aero_power(double v, double cp, const TurbineParams& params) {
    if (v < 0.0) throw DomainError("wind speed must be >= 0");
    if (cp < 0.0 || cp > 0.593) throw DomainError("cp outside [0, 0.593]");
    return 0.5 * params.rho * cp * kPi * params.radius * params.radius * v * v * v;
}

// One integration step of the lumped rotational dynamics, generator side.
// t_em is the braking (generator) torque.
inline double drivetrain_step(double t_turbine, double t_em, double omega_m, double dt,
                              const TurbineParams& params, Integrator method = Integrator::Rk4) {
    if (dt <= 0.0) throw DomainError("dt must be positive");
    double j = params.inertia_generator_side();
    auto f = [&](const std::vector<double>& x) {
        return std::vector<double>{(t_turbine - t_em - params.f_viscous * x[0]) / j};
    };
    return integrate_step({omega_m}, f, dt, method)[0];
}

// Quadratic optimal-torque law referred to the generator shaft.
inline double mppt_reference_torque(double omega_m, const TurbineParams& params) {
    if (omega_m < 0.0) throw DomainError("speed must be >= 0");
    double g3 = std::pow(params.gearbox_ratio, 3);
    double l3 = std::pow(params.lambda_opt, 3);
    double k_opt = 0.5 * params.rho * kPi * std::pow(params.radius, 5) * params.cp_max / (l3 * g3);
    return k_opt * omega_m * omega_m;
}

// Steady-state hourly envelope: zero outside the operating band, aero power
// at the rating coefficient capped at nameplate inside it.
inline double turbine_quasi_static_power(double v_hub, const TurbineParams& params) {
    if (v_hub < 0.0) throw DomainError("wind speed must be >= 0");
    if (v_hub < params.v_cut_in || v_hub > params.v_cut_out) return 0.0;
    return std::min(aero_power(v_hub, params.cp_max, params), params.p_rated);
}

// ---------------------------------------------------------------------------
// Doubly-fed machine
// ---------------------------------------------------------------------------

// Rotor-voltage speed coupling: standard derivation alternates sign across
// the d/q rows; the reference text prints a minus in both. Both are kept.
enum class RotorCoupling { SignConsistent, AsPrinted };

struct DfigParams {
    double r_s = 2.97e-3;   // stator resistance, ohm
    double r_r = 3.82e-3;   // rotor resistance, ohm
    double l_fs = 121e-6;   // stator leakage, H
    double l_fr = 57.3e-6;  // rotor leakage, H
    double l_m = 12.12e-3;  // magnetizing inductance, H
    double m_ratio = 1.0;   // rotor/stator turns ratio
    int pole_pairs = 2;
    double omega_s = kGridOmega;        // synchronous electrical speed, rad/s
    double u_line_rms = 690.0;          // stator line-to-line voltage, V
    RotorCoupling coupling = RotorCoupling::SignConsistent;

    double l_s() const { return l_fs + l_m; }
    double l_r() const { return l_fr + m_ratio * m_ratio * l_m; }
    double mutual() const { return m_ratio * l_m; }
    double sigma() const {
        double m = mutual();
        return 1.0 - m * m / (l_s() * l_r());
    }
    // stator phase-voltage amplitude in the rotating frame
    double v_phase() const { return u_line_rms * std::sqrt(2.0) / std::sqrt(3.0); }

    void validate() const {
        if (r_s <= 0 || r_r <= 0 || l_fs <= 0 || l_fr <= 0 || l_m <= 0)
            throw ValidationError("machine parameters must be positive");
        double s = sigma();
        if (!(s > 0.0 && s < 1.0)) throw ConfigError("leakage coefficient outside (0,1)");
    }

    static DfigParams from_config(const Config& cfg, const std::string& section = "dfig") {
        DfigParams p;
        auto key = [&](const char* k) { return section + "." + k; };
        p.r_s = cfg.get_double(key("r_s"), p.r_s);
        p.r_r = cfg.get_double(key("r_r"), p.r_r);
        p.l_fs = cfg.get_double(key("l_fs"), p.l_fs);
        p.l_fr = cfg.get_double(key("l_fr"), p.l_fr);
        p.l_m = cfg.get_double(key("l_m"), p.l_m);
        p.m_ratio = cfg.get_double(key("m_ratio"), p.m_ratio);
        p.pole_pairs = static_cast<int>(cfg.get_int(key("pole_pairs"), p.pole_pairs));
        p.u_line_rms = cfg.get_double(key("u_line_rms"), p.u_line_rms);
        if (cfg.get_string(section + ".coupling", "consistent") == "as_printed")
            p.coupling = RotorCoupling::AsPrinted;
        p.validate();
        return p;
    }
};

// Currents are the state; fluxes are linear functions of them.
struct DfigState {
    double i_sd = 0.0, i_sq = 0.0;  // stator currents, A
    double i_rd = 0.0, i_rq = 0.0;  // rotor currents, A
    double omega_m = 0.0;           // mechanical speed, rad/s
    double theta_s = 0.0, theta_r = 0.0;  // frame angles, rad

    double phi_sd(const DfigParams& p) const { return p.l_s() * i_sd + p.mutual() * i_rd; }
    double phi_sq(const DfigParams& p) const { return p.l_s() * i_sq + p.mutual() * i_rq; }
    double phi_rd(const DfigParams& p) const { return p.l_r() * i_rd + p.mutual() * i_sd; }
    double phi_rq(const DfigParams& p) const { return p.l_r() * i_rq + p.mutual() * i_sq; }
};

// Current derivatives of the two-winding machine in the synchronous frame.
// Stator and rotor windings are both in motor convention; the rotor rows
// rotate at slip frequency.
inline std::array<double, 4> dfig_derivatives(const DfigState& s, const DqPair& v_s,
                                              const DqPair& v_r, const DfigParams& p) {
    double ls = p.l_s(), lr = p.l_r(), m = p.mutual();
    double det = ls * lr - m * m;
    if (det <= 0.0) throw ConfigError("singular inductance matrix");
    double w_r = p.omega_s - p.pole_pairs * s.omega_m;
    double psd = s.phi_sd(p), psq = s.phi_sq(p);
    double prd = s.phi_rd(p), prq = s.phi_rq(p);
    double dpsd = v_s.d - p.r_s * s.i_sd + p.omega_s * psq;
    double dpsq = v_s.q - p.r_s * s.i_sq - p.omega_s * psd;
    double dprd = v_r.d - p.r_r * s.i_rd + w_r * prq;
    double dprq = p.coupling == RotorCoupling::SignConsistent
                      ? v_r.q - p.r_r * s.i_rq - w_r * prd
                      : v_r.q - p.r_r * s.i_rq + w_r * prd;
    return {(lr * dpsd - m * dprd) / det, (lr * dpsq - m * dprq) / det,
            (ls * dprd - m * dpsd) / det, (ls * dprq - m * dpsq) / det};
}

// One electrical step at frozen mechanical speed; advances the four currents
// and both frame angles.
inline DfigState dfig_electrical_step(const DfigState& state, const DqPair& v_s,
                                      const DqPair& v_r, double dt, const DfigParams& params) {
    if (dt <= 0.0) throw DomainError("dt must be positive");
    std::array<double, 4> x{state.i_sd, state.i_sq, state.i_rd, state.i_rq};
    auto f = [&](const std::array<double, 4>& cur) {
        DfigState tmp = state;
        tmp.i_sd = cur[0];
        tmp.i_sq = cur[1];
        tmp.i_rd = cur[2];
        tmp.i_rq = cur[3];
        return dfig_derivatives(tmp, v_s, v_r, params);
    };
    x = rk4_step<4>(x, f, dt);
    DfigState next = state;
    next.i_sd = x[0];
    next.i_sq = x[1];
    next.i_rd = x[2];
    next.i_rq = x[3];
    next.theta_s = wrap_angle(state.theta_s + params.omega_s * dt);
    next.theta_r = wrap_angle(state.theta_r +
                              (params.omega_s - params.pole_pairs * state.omega_m) * dt);
    return next;
}

struct MachinePowers {
    double p_s = 0.0, q_s = 0.0;  // stator
    double p_r = 0.0, q_r = 0.0;  // rotor
};

inline MachinePowers dfig_powers(const DqPair& v_s, const DqPair& v_r, const DqPair& i_s,
                                 const DqPair& i_r, PowerConvention convention) {
    PqPair st = measure_pq(v_s, i_s, convention);
    PqPair rt = measure_pq(v_r, i_r, convention);
    return {st.p, st.q, rt.p, rt.q};
}

// Rotor-current form of the airgap torque. Positive accelerates the shaft
// (motor convention); generating operation yields negative values.
inline double electromagnetic_torque(const DfigState& s, const DfigParams& p,
                                     PowerConvention convention = PowerConvention::Physical) {
    double scale = convention == PowerConvention::Physical ? 1.5 : 1.0;
    return scale * p.pole_pairs * (p.mutual() / p.l_s()) *
           (s.phi_sq(p) * s.i_rd - s.phi_sd(p) * s.i_rq);
}

// Stator-flux form; agrees with the rotor form on any state.
inline double electromagnetic_torque_stator(const DfigState& s, const DfigParams& p,
                                            PowerConvention convention = PowerConvention::Physical) {
    double scale = convention == PowerConvention::Physical ? 1.5 : 1.0;
    return scale * p.pole_pairs * (s.phi_sd(p) * s.i_sq - s.phi_sq(p) * s.i_sd);
}

// ---------------------------------------------------------------------------
// Rotor-side converter control
// ---------------------------------------------------------------------------

// Pole-placement current-loop gains from the machine constants and the
// requested response time.
inline PiGains rotor_current_gains(const DfigParams& p, double t_response = 0.05) {
    return {3.0 * p.sigma() * p.l_r() / t_response, 3.0 * p.r_r / t_response};
}

inline PiGains filter_current_gains(const RlFilterParams& f, double t_response = 0.01) {
    return {3.0 * f.l_f / t_response, 3.0 * f.r_f / t_response};
}

struct RscState {
    PiState pi_ird;
    PiState pi_irq;
};

struct RscCommand {
    DqPair v_rotor;       // rotor voltage reference
    double i_rd_ref = 0.0;
    double i_rq_ref = 0.0;
};

// Torque/reactive decoupling on the stator-flux-aligned frame: the braking
// torque reference maps to the rotor q current, the stator reactive
// reference to the rotor d current, and the cross-coupling plus back-emf
// terms are fed forward.
inline RscCommand rsc_control_step(double t_brake_ref, double q_s_ref, const DfigState& s,
                                   RscState& pis, const PiGains& gains, double ts,
                                   const DfigParams& p,
                                   PowerConvention convention = PowerConvention::Physical) {
    double scale = convention == PowerConvention::Physical ? 1.5 : 1.0;
    double m = p.mutual();
    double phi_est = s.phi_sd(p);
    if (phi_est == 0.0) throw DomainError("stator flux estimate is zero");
    double v_sq = p.v_phase();
    RscCommand cmd;
    cmd.i_rq_ref = t_brake_ref * p.l_s() / (scale * p.pole_pairs * m * phi_est);
    cmd.i_rd_ref = phi_est / m - p.l_s() * (q_s_ref / scale) / (m * v_sq);
    double w_r = p.omega_s - p.pole_pairs * s.omega_m;
    double sig_lr = p.sigma() * p.l_r();
    double e_rd = -sig_lr * w_r * s.i_rq;
    double e_rq = sig_lr * w_r * s.i_rd;
    double e_phi = w_r * (m / p.l_s()) * phi_est;
    cmd.v_rotor.d = pi_step(pis.pi_ird, gains, cmd.i_rd_ref - s.i_rd, ts) + e_rd;
    cmd.v_rotor.q = pi_step(pis.pi_irq, gains, cmd.i_rq_ref - s.i_rq, ts) + e_rq + e_phi;
    return cmd;
}

// ---------------------------------------------------------------------------
// DC bus and grid-side converter
// ---------------------------------------------------------------------------

struct DcBusState {
    double v_dc = 1200.0;     // V
    double capacitance = 38e-3;  // F
};

// Lossless bus bookkeeping: p_rsc flows into the bus, p_gsc out of it.
inline double dc_bus_step(DcBusState& bus, double p_rsc, double p_gsc, double dt) {
    if (dt <= 0.0) throw DomainError("dt must be positive");
    if (bus.v_dc <= 0.0) throw SimulationFault("dc bus voltage reached zero");
    std::array<double, 1> x{bus.v_dc};
    auto f = [&](const std::array<double, 1>& s) {
        return std::array<double, 1>{(p_rsc - p_gsc) / (bus.capacitance * s[0])};
    };
    x = rk4_step<1>(x, f, dt);
    if (!(x[0] > 0.0) || !std::isfinite(x[0]))
        throw SimulationFault("dc bus voltage collapsed");
    bus.v_dc = x[0];
    return bus.v_dc;
}

struct GscState {
    DqPair i_f;  // filter current, grid->converter positive
    RlFilterParams filter;
    PiState pi_vdc;
    PiState pi_ifd;
    PiState pi_ifq;
};

struct GscCommand {
    DqPair v_filter;      // converter-side voltage reference
    double i_fd_ref = 0.0;
    double i_fq_ref = 0.0;
};

// Outer bus-voltage loop commands the q (active) filter current; the d
// current carries the reactive reference. Inner loops are decoupled by the
// grid-voltage and cross-coupling feed-forwards.
inline GscCommand gsc_control_step(double v_dc_ref, const DcBusState& bus, GscState& gsc,
                                   double q_ref, double ts, const PiGains& vdc_gains,
                                   const PiGains& current_gains, double v_sq,
                                   PowerConvention convention = PowerConvention::Physical) {
    if (v_sq == 0.0) throw DomainError("grid voltage measurement is zero");
    double scale = convention == PowerConvention::Physical ? 1.5 : 1.0;
    GscCommand cmd;
    cmd.i_fq_ref = pi_step(gsc.pi_vdc, vdc_gains, v_dc_ref - bus.v_dc, ts);
    cmd.i_fd_ref = (q_ref / scale) / v_sq;
    double u_d = pi_step(gsc.pi_ifd, current_gains, cmd.i_fd_ref - gsc.i_f.d, ts);
    double u_q = pi_step(gsc.pi_ifq, current_gains, cmd.i_fq_ref - gsc.i_f.q, ts);
    double w = gsc.filter.omega;
    cmd.v_filter.d = 0.0 + gsc.filter.l_f * w * gsc.i_f.q - u_d;
    cmd.v_filter.q = v_sq - gsc.filter.l_f * w * gsc.i_f.d - u_q;
    return cmd;
}

// ---------------------------------------------------------------------------
// One turbine + machine + back-to-back converter, closed loop.
// ---------------------------------------------------------------------------

struct WindTurbineConfig {
    TurbineParams turbine;
    DfigParams dfig;
    // Scenario-grade grid-side filter: the machine-scale resistance (mOhm,
    // like the winding resistances) instead of the 0.75 ohm type default,
    // which cannot carry megawatt-class slip power.
    RlFilterParams gsc_filter{0.75e-3, 0.75e-3, kGridOmega};
    PiGains speed_gains{3.4074, 9.4171};  // per-unit speed loop
    PiGains vdc_gains{7.6999, 5.019};     // V error -> A reference
    double rotor_loop_response_s = 0.05;
    double filter_loop_response_s = 0.01;
    double v_dc_ref = 1200.0;
    double v_dc0 = 1200.0;
    double capacitance = 38e-3;
    double q_s_ref = 0.0;  // stator reactive setpoint, var
    double q_f_ref = 0.0;  // grid-side filter reactive setpoint, var
    std::function<double(double)> wind = [](double) { return 10.0; };  // m/s at hub
};

struct WindSample {
    double t = 0.0;
    double lambda = 0.0;
    double omega_m = 0.0;
    double omega_ref = 0.0;
    double v_dc = 0.0;
    double p_stator = 0.0, q_stator = 0.0;
    double p_filter = 0.0, q_filter = 0.0;
    double p_grid = 0.0;   // positive = delivered to the grid
    double t_em_brake = 0.0;
    double t_ref = 0.0;
    double energy_imbalance = 0.0;  // integral of (p_rsc - p_gsc), J
};

class WindTurbineSim {
public:
    explicit WindTurbineSim(const WindTurbineConfig& cfg)
        : cfg_(cfg),
          rotor_gains_(rotor_current_gains(cfg.dfig, cfg.rotor_loop_response_s)),
          filter_gains_(filter_current_gains(cfg.gsc_filter, cfg.filter_loop_response_s)) {
        cfg_.turbine.validate();
        cfg_.dfig.validate();
        omega_base_ = cfg_.dfig.omega_s / cfg_.dfig.pole_pairs;
        t_base_ = cfg_.turbine.p_rated / omega_base_;
        bus_.v_dc = cfg_.v_dc0;
        bus_.capacitance = cfg_.capacitance;
        gsc_.filter = cfg_.gsc_filter;
        init_steady();
    }

    // Advance one control period of the whole chain.
    void control_step(double dt_control, double dt_electrical) {
        const auto& p = cfg_.dfig;
        double v_hat = p.v_phase();
        double vw = cfg_.wind(t_);
        // speed reference from the tip-speed-ratio law, torque from the
        // per-unit speed regulator
        omega_ref_ = cfg_.turbine.lambda_opt * vw * cfg_.turbine.gearbox_ratio / cfg_.turbine.radius;
        double t_pu = pi_step(pi_speed_, cfg_.speed_gains,
                              (state_.omega_m - omega_ref_) / omega_base_, dt_control);
        double t_ref = t_pu * t_base_;
        double t_cap = std::min(1.2 * t_base_, cfg_.turbine.p_rated / std::max(state_.omega_m, 1.0));
        t_ref_ = std::min(std::max(t_ref, -0.2 * t_base_), t_cap);
        RscCommand rsc = rsc_control_step(t_ref_, cfg_.q_s_ref, state_, rsc_pis_, rotor_gains_,
                                          dt_control, p);
        v_r_ = clamp_vector(rsc.v_rotor, 0.49 * bus_.v_dc);
        GscCommand gsc = gsc_control_step(cfg_.v_dc_ref, bus_, gsc_, cfg_.q_f_ref, dt_control,
                                          cfg_.vdc_gains, filter_gains_, v_hat);
        v_f_ = clamp_vector(gsc.v_filter, 0.49 * bus_.v_dc);

        int n = std::max(1, static_cast<int>(std::lround(dt_control / dt_electrical)));
        double dt = dt_control / n;
        for (int k = 0; k < n; ++k) electrical_step(dt);
        t_ += dt_control;
    }

    WindSample sample() const {
        const auto& p = cfg_.dfig;
        double v_hat = p.v_phase();
        WindSample s;
        s.t = t_;
        double vw = cfg_.wind(t_);
        s.lambda = vw > 0.0 ? (state_.omega_m / cfg_.turbine.gearbox_ratio) * cfg_.turbine.radius / vw
                            : 0.0;
        s.omega_m = state_.omega_m;
        s.omega_ref = omega_ref_;
        s.v_dc = bus_.v_dc;
        MachinePowers mp = dfig_powers({0.0, v_hat}, v_r_, {state_.i_sd, state_.i_sq},
                                       {state_.i_rd, state_.i_rq}, PowerConvention::Physical);
        PqPair fp = measure_pq({0.0, v_hat}, gsc_.i_f, PowerConvention::Physical);
        s.p_stator = mp.p_s;
        s.q_stator = mp.q_s;
        s.p_filter = fp.p;
        s.q_filter = fp.q;
        s.p_grid = -(mp.p_s + fp.p);
        s.t_em_brake = -electromagnetic_torque(state_, p);
        s.t_ref = t_ref_;
        s.energy_imbalance = energy_integral_;
        return s;
    }

    const DfigState& machine() const { return state_; }
    const DcBusState& bus() const { return bus_; }
    const GscState& gsc() const { return gsc_; }
    double time() const { return t_; }
    double initial_bus_energy() const { return 0.5 * bus_.capacitance * cfg_.v_dc0 * cfg_.v_dc0; }

private:
    static DqPair clamp_vector(const DqPair& v, double limit) {
        double mag = std::hypot(v.d, v.q);
        if (mag <= limit || mag == 0.0) return v;
        double s = limit / mag;
        return {v.d * s, v.q * s};
    }

    void init_steady() {
        const auto& p = cfg_.dfig;
        double v_hat = p.v_phase();
        double vw = cfg_.wind(0.0);
        double om = cfg_.turbine.lambda_opt * vw * cfg_.turbine.gearbox_ratio / cfg_.turbine.radius;
        double lam = cfg_.turbine.lambda_opt;
        double cp = power_coefficient(lam, cfg_.turbine.pitch_deg, cfg_.turbine.cp_coeffs);
        double p_aero = aero_power(vw, std::min(cp, 0.593), cfg_.turbine);
        double t_aero = p_aero / om;

        double phi = v_hat / p.omega_s;
        state_.omega_m = om;
        state_.i_rd = phi / p.mutual();
        state_.i_rq = t_aero * p.l_s() / (1.5 * p.pole_pairs * p.mutual() * phi);
        state_.i_sd = (phi - p.mutual() * state_.i_rd) / p.l_s();
        state_.i_sq = -(p.mutual() / p.l_s()) * state_.i_rq;

        omega_ref_ = om;
        t_ref_ = t_aero;
        // pre-load the regulators so a matched start is an equilibrium
        pi_speed_.u_min = -1.5;
        pi_speed_.u_max = 1.5;
        if (cfg_.speed_gains.ki > 0.0)
            pi_speed_.integral_accum = (t_aero / t_base_) / cfg_.speed_gains.ki;
        rsc_pis_.pi_ird.u_min = rsc_pis_.pi_irq.u_min = -600.0;
        rsc_pis_.pi_ird.u_max = rsc_pis_.pi_irq.u_max = 600.0;
        if (rotor_gains_.ki > 0.0) {
            rsc_pis_.pi_ird.integral_accum = p.r_r * state_.i_rd / rotor_gains_.ki;
            rsc_pis_.pi_irq.integral_accum = p.r_r * state_.i_rq / rotor_gains_.ki;
        }
        double w_r = p.omega_s - p.pole_pairs * om;
        v_r_ = {p.r_r * state_.i_rd - p.sigma() * p.l_r() * w_r * state_.i_rq,
                p.r_r * state_.i_rq + p.sigma() * p.l_r() * w_r * state_.i_rd +
                    w_r * (p.mutual() / p.l_s()) * phi};
        double p_rotor_in = 1.5 * (v_r_.d * state_.i_rd + v_r_.q * state_.i_rq);
        double ifq0 = p_rotor_in / (1.5 * v_hat);  // import covers what the rotor draws
        gsc_.i_f = {0.0, ifq0};
        gsc_.pi_vdc.u_min = -4000.0;
        gsc_.pi_vdc.u_max = 4000.0;
        if (cfg_.vdc_gains.ki > 0.0) gsc_.pi_vdc.integral_accum = ifq0 / cfg_.vdc_gains.ki;
        // fixed inner-loop authority; the assembled vector is clamped against
        // the live bus voltage when applied
        gsc_.pi_ifd.u_min = -140.0;
        gsc_.pi_ifd.u_max = 140.0;
        gsc_.pi_ifq.u_min = -60.0;
        gsc_.pi_ifq.u_max = 60.0;
        if (filter_gains_.ki > 0.0)
            gsc_.pi_ifq.integral_accum = cfg_.gsc_filter.r_f * ifq0 / filter_gains_.ki;
        v_f_ = {cfg_.gsc_filter.l_f * cfg_.gsc_filter.omega * ifq0,
                v_hat - cfg_.gsc_filter.r_f * ifq0};
    }

    // Full electrical substep: machine + filter + bus + shaft advance
    // together so the energy bookkeeping sees one consistent state.
    void electrical_step(double dt) {
        const auto& p = cfg_.dfig;
        double v_hat = p.v_phase();
        double vw = cfg_.wind(t_);
        std::array<double, 9> x{state_.i_sd, state_.i_sq, state_.i_rd,  state_.i_rq, gsc_.i_f.d,
                                gsc_.i_f.q,  bus_.v_dc,   state_.omega_m, energy_integral_};
        auto f = [&](const std::array<double, 9>& s) -> std::array<double, 9> {
            DfigState ms = state_;
            ms.i_sd = s[0];
            ms.i_sq = s[1];
            ms.i_rd = s[2];
            ms.i_rq = s[3];
            ms.omega_m = s[7];
            auto dm = dfig_derivatives(ms, {0.0, v_hat}, v_r_, p);
            auto df = rl_filter_dq_derivatives({s[4], s[5]}, v_f_, {0.0, v_hat}, cfg_.gsc_filter);
            double p_rsc = -1.5 * (v_r_.d * s[2] + v_r_.q * s[3]);
            double p_gsc = -1.5 * (v_f_.d * s[4] + v_f_.q * s[5]);
            double dvdc = (p_rsc - p_gsc) / (bus_.capacitance * s[6]);
            double lam = (s[7] / cfg_.turbine.gearbox_ratio) * cfg_.turbine.radius / std::max(vw, 1e-6);
            double cp = lam > 0.0 ? power_coefficient(lam, cfg_.turbine.pitch_deg, cfg_.turbine.cp_coeffs)
                                  : 0.0;
            double p_aero = aero_power(vw, std::min(cp, 0.593), cfg_.turbine);
            double t_turb = s[7] > 1.0 ? p_aero / s[7] : 0.0;
            double t_em = electromagnetic_torque(ms, p);
            double dom = (t_turb + t_em - cfg_.turbine.f_viscous * s[7]) /
                         cfg_.turbine.inertia_generator_side();
            return {dm[0], dm[1], dm[2], dm[3], df[0], df[1], dvdc, dom, p_rsc - p_gsc};
        };
        x = rk4_step<9>(x, f, dt);
        for (double v : x)
            if (!std::isfinite(v)) throw SimulationFault("wind chain state diverged at t = " +
                                                         format_double(t_));
        if (x[6] <= 0.0) throw SimulationFault("dc bus voltage collapsed at t = " + format_double(t_));
        state_.i_sd = x[0];
        state_.i_sq = x[1];
        state_.i_rd = x[2];
        state_.i_rq = x[3];
        gsc_.i_f = {x[4], x[5]};
        bus_.v_dc = x[6];
        state_.omega_m = x[7];
        energy_integral_ = x[8];
        state_.theta_s = wrap_angle(state_.theta_s + p.omega_s * dt);
        state_.theta_r = wrap_angle(state_.theta_r +
                                    (p.omega_s - p.pole_pairs * state_.omega_m) * dt);
    }

    WindTurbineConfig cfg_;
    PiGains rotor_gains_;
    PiGains filter_gains_;
    DfigState state_;
    DcBusState bus_;
    GscState gsc_;
    RscState rsc_pis_;
    PiState pi_speed_;
    DqPair v_r_{}, v_f_{};
    double omega_base_ = 157.08;
    double t_base_ = 19099.0;
    double omega_ref_ = 0.0;
    double t_ref_ = 0.0;
    double energy_integral_ = 0.0;
    double t_ = 0.0;
};

} // namespace hybridplant

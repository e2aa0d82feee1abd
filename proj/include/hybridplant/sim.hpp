#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybridplant/config.hpp"
#include "hybridplant/csv.hpp"
#include "hybridplant/econ.hpp"
#include "hybridplant/errors.hpp"
#include "hybridplant/integrate.hpp"
#include "hybridplant/pso.hpp"
#include "hybridplant/pv_chain.hpp"
#include "hybridplant/pv_model.hpp"
#include "hybridplant/weather.hpp"
#include "hybridplant/wind_chain.hpp"

namespace hybridplant {

struct SimClock {
    double dt_electrical = 1e-4;  // s
    double dt_control = 1e-3;     // s
    double t_end = 10.0;          // s

    void validate() const {
        if (dt_electrical <= 0 || dt_control <= 0 || t_end <= 0)
            throw ConfigError("clock values must be positive");
        double ratio = dt_control / dt_electrical;
        if (std::abs(ratio - std::lround(ratio)) > 1e-9)
            throw ConfigError("dt_control must be an integer multiple of dt_electrical");
    }
};

enum class ScenarioMode { Dynamic, QuasiStatic };
enum class ChainSelect { Pv, Wind, Both };

struct Scenario {
    ScenarioMode mode = ScenarioMode::Dynamic;
    ChainSelect chain = ChainSelect::Both;
    SimClock clock;
    std::uint64_t seed = 1;
    double output_decimation_s = 1e-2;  // dynamic channel sampling period

    PvStringConfig pv;
    WindTurbineConfig wind;
    int turbine_count = 10;
    double alpha_shear = 0.2;
    double poa_gain = 1.0;   // plane-of-array irradiance = poa_gain * GHI
    double noct_c = 45.0;
    bool clip_pv_at_rating = true;

    // dynamic wind profile: speeds[i] applies from times[i]
    std::vector<double> wind_times{0.0};
    std::vector<double> wind_speeds{10.0};

    // quasi-static weather: load a CSV or synthesize
    std::string weather_csv;
    int synth_days = 31;
    ClearSkyProfile synth_sky;
    WeibullParams synth_weibull;

    std::function<double(double)> wind_profile() const {
        auto times = wind_times;
        auto speeds = wind_speeds;
        return [times, speeds](double t) {
            double v = speeds.front();
            for (std::size_t i = 0; i < times.size(); ++i)
                if (t >= times[i]) v = speeds[i];
            return v;
        };
    }

    static Scenario from_config(const Config& cfg);
};

struct SimOutput {
    std::vector<std::string> time_labels;           // quasi-static: ISO hours
    std::vector<double> time;                       // dynamic: s; hourly: serial hours
    std::vector<std::pair<std::string, std::vector<double>>> channels;

    std::vector<double>& channel(const std::string& name) {
        for (auto& [n, v] : channels)
            if (n == name) return v;
        channels.emplace_back(name, std::vector<double>{});
        return channels.back().second;
    }
    const std::vector<double>* find(const std::string& name) const {
        for (auto& [n, v] : channels)
            if (n == name) return &v;
        return nullptr;
    }
    std::size_t rows() const { return time.size(); }
    void check_consistent() const {
        for (auto& [n, v] : channels)
            if (v.size() != time.size())
                throw SimulationFault("channel " + n + " length mismatch");
    }
};

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

inline SimOutput run_dynamic(const Scenario& sc) {
    if (sc.mode != ScenarioMode::Dynamic) throw ConfigError("scenario is not dynamic");
    sc.clock.validate();
    SimOutput out;
    bool with_pv = sc.chain != ChainSelect::Wind;
    bool with_wind = sc.chain != ChainSelect::Pv;

    std::optional<PvStringSim> pv;
    if (with_pv) pv.emplace(sc.pv);
    std::optional<WindTurbineSim> wind;
    if (with_wind) {
        WindTurbineConfig wc = sc.wind;
        wc.wind = sc.wind_profile();
        wind.emplace(wc);
    }

    long steps = static_cast<long>(std::llround(sc.clock.t_end / sc.clock.dt_control));
    long sample_every = std::max<long>(1, std::llround(sc.output_decimation_s / sc.clock.dt_control));
    for (long k = 0; k < steps; ++k) {
        if (with_pv) pv->control_step(sc.clock.dt_control, sc.clock.dt_electrical);
        if (with_wind) wind->control_step(sc.clock.dt_control, sc.clock.dt_electrical);
        if (k % sample_every != 0 && k != steps - 1) continue;
        double t = (k + 1) * sc.clock.dt_control;
        out.time.push_back(t);
        double pv_mw = 0.0, wind_mw = 0.0, q_mvar = 0.0;
        if (with_pv) {
            PqPair pq = pv->grid_power();
            double plant = -pq.p * sc.pv.layout.string_count / 1e6;
            pv_mw = plant;
            q_mvar += -pq.q * sc.pv.layout.string_count / 1e6;
            out.channel("pv_p_string_w").push_back(pq.p);
            out.channel("pv_p_ref_w").push_back(pv->p_ref());
            out.channel("pv_p_err_w").push_back(pq.p - pv->p_ref());
            out.channel("pv_q_string_var").push_back(pq.q);
            out.channel("pv_v_mppt").push_back(pv->tracker().v_ref);
        }
        if (with_wind) {
            WindSample ws = wind->sample();
            wind_mw = ws.p_grid * sc.turbine_count / 1e6;
            q_mvar += -(ws.q_stator + ws.q_filter) * sc.turbine_count / 1e6;
            out.channel("lambda").push_back(ws.lambda);
            out.channel("omega_m").push_back(ws.omega_m);
            out.channel("omega_ref").push_back(ws.omega_ref);
            out.channel("omega_err").push_back(ws.omega_m - ws.omega_ref);
            out.channel("v_dc").push_back(ws.v_dc);
            out.channel("wind_p_stator_w").push_back(ws.p_stator);
            out.channel("wind_p_filter_w").push_back(ws.p_filter);
            out.channel("wind_q_total_var").push_back(ws.q_stator + ws.q_filter);
            out.channel("wind_t_ref_nm").push_back(ws.t_ref);
            out.channel("wind_energy_imbalance_j").push_back(ws.energy_imbalance);
        }
        out.channel("pv_power_mw").push_back(pv_mw);
        out.channel("wind_power_mw").push_back(wind_mw);
        out.channel("total_mw").push_back(pv_mw + wind_mw);
        out.channel("q_total_mvar").push_back(q_mvar);
    }
    out.check_consistent();
    return out;
}

inline SimOutput run_quasi_static(const Scenario& sc) {
    if (sc.mode != ScenarioMode::QuasiStatic) throw ConfigError("scenario is not quasi-static");
    WeatherSeries weather;
    if (!sc.weather_csv.empty())
        weather = load_weather_csv(sc.weather_csv);
    else
        weather = synth_weather(sc.synth_days, sc.synth_sky, sc.synth_weibull, sc.seed);

    SimOutput out;
    for (const auto& rec : weather.records) {
        double g = sc.poa_gain * rec.ghi;
        double t_cell = cell_temperature(rec.t_ambient, g, sc.noct_c);
        double module_w = 0.0;
        if (g > 0.0) {
            PvOperatingConditions cond{g, celsius_to_kelvin(t_cell)};
            module_w = std::max(mpp_golden(cond, sc.pv.module).p, 0.0);
            if (sc.clip_pv_at_rating) module_w = std::min(module_w, sc.pv.module.p_max);
        }
        double pv_mw = array_power(module_w, sc.pv.layout).plant_w / 1e6;
        double v_hub = shear_to_hub(rec.wind_10m, weather.site.measurement_height_m,
                                    weather.site.hub_height_m, sc.alpha_shear);
        double wind_mw = sc.turbine_count * turbine_quasi_static_power(v_hub, sc.wind.turbine) / 1e6;
        out.time_labels.push_back(rec.timestamp.to_string());
        out.time.push_back(static_cast<double>(rec.timestamp.serial_hours()));
        out.channel("ghi_wm2").push_back(rec.ghi);
        out.channel("t_cell_c").push_back(t_cell);
        out.channel("wind_hub_ms").push_back(v_hub);
        out.channel("pv_power_mw").push_back(pv_mw);
        out.channel("wind_power_mw").push_back(wind_mw);
        out.channel("total_mw").push_back(pv_mw + wind_mw);
    }
    out.check_consistent();
    return out;
}

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

struct CoverageRow {
    long long serial_hour = 0;
    std::string label;
    double hybrid_mw = 0.0;
    double reference_mw = 0.0;
    double coverage_pct = 0.0;
    bool defined = false;
};

struct CoverageReport {
    std::vector<CoverageRow> rows;
    double mean_pct = 0.0;  // over defined hours
    double min_pct = 0.0;
    double max_pct = 0.0;
    std::size_t undefined_hours = 0;
};

// Hour-by-hour share of the reference plant's output covered by the hybrid
// plant. Hours with a zero reference are flagged, never invented.
inline CoverageReport coverage_analysis(const SimOutput& hybrid, const LoadSeries& reference) {
    const auto* total = hybrid.find("total_mw");
    if (!total) throw ConfigError("run output lacks a total_mw channel");
    if (hybrid.rows() != reference.records.size())
        throw ValidationError("hybrid run and load series have different lengths");
    CoverageReport rep;
    double acc = 0.0;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < reference.records.size(); ++i) {
        long long lh = reference.records[i].timestamp.serial_hours();
        if (static_cast<long long>(hybrid.time[i]) != lh)
            throw ValidationError("timestamp mismatch at row " + std::to_string(i));
        CoverageRow row;
        row.serial_hour = lh;
        row.label = reference.records[i].timestamp.to_string();
        row.hybrid_mw = (*total)[i];
        row.reference_mw = reference.records[i].demand_mw;
        if (row.reference_mw > 0.0) {
            row.coverage_pct = 100.0 * row.hybrid_mw / row.reference_mw;
            row.defined = true;
            acc += row.coverage_pct;
            if (defined == 0) {
                rep.min_pct = rep.max_pct = row.coverage_pct;
            } else {
                rep.min_pct = std::min(rep.min_pct, row.coverage_pct);
                rep.max_pct = std::max(rep.max_pct, row.coverage_pct);
            }
            ++defined;
        } else {
            ++rep.undefined_hours;
        }
        rep.rows.push_back(row);
    }
    rep.mean_pct = defined ? acc / static_cast<double>(defined) : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

enum class EmitFormat { Csv, Json };

inline std::filesystem::path emit_outputs(const SimOutput& out, EmitFormat format,
                                          const std::filesystem::path& path) {
    out.check_consistent();
    if (format == EmitFormat::Csv) {
        CsvWriter w(path);
        std::vector<std::string> header;
        header.push_back(out.time_labels.empty() ? "time_s" : "timestamp");
        for (auto& [n, v] : out.channels) header.push_back(n);
        w.raw_row(header);
        for (std::size_t i = 0; i < out.rows(); ++i) {
            std::vector<std::string> cells;
            cells.push_back(out.time_labels.empty() ? format_double(out.time[i]) : out.time_labels[i]);
            for (auto& [n, v] : out.channels) cells.push_back(format_double(v[i]));
            w.raw_row(cells);
        }
        return path;
    }
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    if (out.time_labels.empty())
        j["time_s"] = out.time;
    else
        j["timestamp"] = out.time_labels;
    for (auto& [n, v] : out.channels) j[n] = v;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << j.dump(2) << '\n';
    return path;
}

inline std::filesystem::path emit_outputs(const CoverageReport& rep, EmitFormat format,
                                          const std::filesystem::path& path) {
    if (format == EmitFormat::Csv) {
        CsvWriter w(path);
        w.raw_row({"timestamp", "hybrid_mw", "reference_mw", "coverage_pct", "defined"});
        for (const auto& r : rep.rows)
            w.raw_row({r.label, format_double(r.hybrid_mw), format_double(r.reference_mw),
                       r.defined ? format_double(r.coverage_pct) : std::string{},
                       r.defined ? "1" : "0"});
        return path;
    }
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["mean_pct"] = rep.mean_pct;
    j["min_pct"] = rep.min_pct;
    j["max_pct"] = rep.max_pct;
    j["undefined_hours"] = rep.undefined_hours;
    auto& rows = j["rows"];
    for (const auto& r : rep.rows) {
        nlohmann::ordered_json o;
        o["timestamp"] = r.label;
        o["hybrid_mw"] = r.hybrid_mw;
        o["reference_mw"] = r.reference_mw;
        if (r.defined)
            o["coverage_pct"] = r.coverage_pct;
        else
            o["coverage_pct"] = nullptr;
        rows.push_back(o);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << j.dump(2) << '\n';
    return path;
}

// Reload an emitted hourly CSV (timestamp + channels) as a SimOutput.
inline SimOutput load_sim_csv(const std::filesystem::path& path) {
    CsvTable t = read_csv(path);
    if (t.header.empty()) throw SchemaError(path.string() + ": no header");
    SimOutput out;
    bool stamped = t.header.front() == "timestamp";
    for (std::size_t c = 1; c < t.header.size(); ++c) out.channel(t.header[c]);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& cells = t.rows[i];
        if (cells.size() != t.header.size())
            throw SchemaError(path.string() + ": ragged row " + std::to_string(i));
        std::string where = "row " + std::to_string(i);
        if (stamped) {
            HourStamp h = HourStamp::parse(cells[0], where);
            out.time_labels.push_back(h.to_string());
            out.time.push_back(static_cast<double>(h.serial_hours()));
        } else {
            out.time.push_back(parse_double(cells[0], where));
        }
        for (std::size_t c = 1; c < t.header.size(); ++c)
            out.channels[c - 1].second.push_back(parse_double(cells[c], where));
    }
    out.check_consistent();
    return out;
}

// ---------------------------------------------------------------------------
// Scenario loading
// ---------------------------------------------------------------------------

inline Scenario Scenario::from_config(const Config& cfg) {
    Scenario sc;
    std::string mode = cfg.get_string("scenario.mode", "dynamic");
    if (mode == "dynamic")
        sc.mode = ScenarioMode::Dynamic;
    else if (mode == "quasi_static" || mode == "hourly")
        sc.mode = ScenarioMode::QuasiStatic;
    else
        throw ConfigError("unknown scenario.mode '" + mode + "'");
    std::string chain = cfg.get_string("scenario.chain", "both");
    if (chain == "pv")
        sc.chain = ChainSelect::Pv;
    else if (chain == "wind")
        sc.chain = ChainSelect::Wind;
    else if (chain == "both")
        sc.chain = ChainSelect::Both;
    else
        throw ConfigError("unknown scenario.chain '" + chain + "'");
    sc.clock.dt_electrical = cfg.get_double("scenario.dt_electrical", sc.clock.dt_electrical);
    sc.clock.dt_control = cfg.get_double("scenario.dt_control", sc.clock.dt_control);
    sc.clock.t_end = cfg.get_double("scenario.t_end", sc.clock.t_end);
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("scenario.seed", static_cast<long>(sc.seed)));
    sc.output_decimation_s = cfg.get_double("scenario.output_decimation", sc.output_decimation_s);
    sc.turbine_count = static_cast<int>(cfg.get_int("scenario.turbine_count", sc.turbine_count));
    if (sc.turbine_count < 1) throw ConfigError("turbine_count must be >= 1");
    sc.alpha_shear = cfg.get_double("scenario.alpha_shear", sc.alpha_shear);
    sc.poa_gain = cfg.get_double("scenario.poa_gain", sc.poa_gain);
    sc.noct_c = cfg.get_double("scenario.noct_c", sc.noct_c);
    sc.clip_pv_at_rating = cfg.get_bool("scenario.clip_pv_at_rating", sc.clip_pv_at_rating);

    sc.pv.module = PvModuleParams::from_config(cfg);
    if (cfg.get_bool("pv.calibrate_rs_rp", false)) sc.pv.module = calibrate_series_shunt(sc.pv.module);
    sc.pv.layout.modules_series_per_set =
        static_cast<int>(cfg.get_int("pv.modules_series_per_set", sc.pv.layout.modules_series_per_set));
    sc.pv.layout.sets_parallel_per_string =
        static_cast<int>(cfg.get_int("pv.sets_parallel_per_string", sc.pv.layout.sets_parallel_per_string));
    sc.pv.layout.string_count = static_cast<int>(cfg.get_int("pv.string_count", sc.pv.layout.string_count));
    sc.pv.layout.validate();
    sc.pv.g = cfg.get_double("pv.g", sc.pv.g);
    sc.pv.t_cell_c = cfg.get_double("pv.t_cell_c", sc.pv.t_cell_c);
    sc.pv.mppt_enabled = cfg.get_bool("pv.mppt", sc.pv.mppt_enabled);
    sc.pv.mppt_dv = cfg.get_double("pv.mppt_dv", sc.pv.mppt_dv);
    sc.pv.mppt_decimation = static_cast<int>(cfg.get_int("pv.mppt_decimation", sc.pv.mppt_decimation));
    sc.pv.v_ref0 = cfg.get_double("pv.v_ref0", sc.pv.v_ref0);
    sc.pv.fixed_p_ref = cfg.get_double("pv.p_ref", sc.pv.fixed_p_ref);
    sc.pv.vdc = cfg.get_double("pv.vdc", sc.pv.vdc);
    sc.pv.power_gains.kp = cfg.get_double("gains.pv_power.kp", sc.pv.power_gains.kp);
    sc.pv.power_gains.ki = cfg.get_double("gains.pv_power.ki", sc.pv.power_gains.ki);
    sc.pv.filter.r_f = cfg.get_double("pv.filter_r", sc.pv.filter.r_f);
    sc.pv.filter.l_f = cfg.get_double("pv.filter_l", sc.pv.filter.l_f);

    sc.wind.turbine = TurbineParams::from_config(cfg);
    sc.wind.dfig = DfigParams::from_config(cfg);
    sc.wind.gsc_filter.r_f = cfg.get_double("wind.gsc_filter_r", sc.wind.gsc_filter.r_f);
    sc.wind.gsc_filter.l_f = cfg.get_double("wind.gsc_filter_l", sc.wind.gsc_filter.l_f);
    sc.wind.speed_gains.kp = cfg.get_double("gains.wind_speed.kp", sc.wind.speed_gains.kp);
    sc.wind.speed_gains.ki = cfg.get_double("gains.wind_speed.ki", sc.wind.speed_gains.ki);
    sc.wind.vdc_gains.kp = cfg.get_double("gains.gsc_vdc.kp", sc.wind.vdc_gains.kp);
    sc.wind.vdc_gains.ki = cfg.get_double("gains.gsc_vdc.ki", sc.wind.vdc_gains.ki);
    sc.wind.v_dc_ref = cfg.get_double("wind.v_dc_ref", sc.wind.v_dc_ref);
    sc.wind.v_dc0 = cfg.get_double("wind.v_dc0", sc.wind.v_dc0);
    sc.wind.capacitance = cfg.get_double("wind.capacitance", sc.wind.capacitance);
    sc.wind_times = cfg.get_doubles("wind.times", sc.wind_times);
    sc.wind_speeds = cfg.get_doubles("wind.speeds", sc.wind_speeds);
    if (sc.wind_times.size() != sc.wind_speeds.size() || sc.wind_times.empty())
        throw ConfigError("wind.times and wind.speeds must be equal-length, non-empty");

    sc.weather_csv = cfg.get_string("weather.csv", sc.weather_csv);
    sc.synth_days = static_cast<int>(cfg.get_int("weather.synth_days", sc.synth_days));
    sc.synth_sky.peak_ghi = cfg.get_double("weather.peak_ghi", sc.synth_sky.peak_ghi);
    sc.synth_sky.temp_mean_c = cfg.get_double("weather.temp_mean_c", sc.synth_sky.temp_mean_c);
    sc.synth_sky.temp_amplitude_c =
        cfg.get_double("weather.temp_amplitude_c", sc.synth_sky.temp_amplitude_c);
    sc.synth_weibull.k = cfg.get_double("weather.weibull_k", sc.synth_weibull.k);
    sc.synth_weibull.c = cfg.get_double("weather.weibull_c", sc.synth_weibull.c);
    return sc;
}

// ---------------------------------------------------------------------------
// Tuning scenarios: closed-loop recipes the optimizer scores candidate gains
// against. All are deterministic in the candidate.
// ---------------------------------------------------------------------------

// Grid-power step tracking on one PV string; the candidate is (kp, ki) of
// the power loop.
inline FitnessSpec make_pv_power_fitness(double horizon_s = 2.0, double p_step_w = -14005.0,
                                         double step_time_s = 0.1) {
    FitnessSpec spec;
    spec.scenario = "pv_power_loop";
    spec.horizon_s = horizon_s;
    spec.run_mse = [horizon_s, p_step_w, step_time_s](const std::vector<double>& gains) {
        if (gains.size() != 2) throw ConfigError("pv power scenario expects 2 gains");
        PvStringConfig cfg;
        cfg.mppt_enabled = false;
        cfg.fixed_p_ref = 0.0;
        cfg.power_gains = {gains[0], gains[1]};
        PvStringSim sim(cfg);
        const double dt_c = 1e-3, dt_e = 2e-4;
        long steps = static_cast<long>(std::llround(horizon_s / dt_c));
        double acc = 0.0;
        for (long k = 0; k < steps; ++k) {
            double t = k * dt_c;
            double ref = t >= step_time_s ? p_step_w : 0.0;
            sim.set_p_ref(ref);
            sim.control_step(dt_c, dt_e);
            double e = sim.grid_power().p - ref;
            acc += e * e;
        }
        return acc / static_cast<double>(steps);
    };
    return spec;
}

// Turbine speed tracking through a wind step; candidate is the per-unit
// speed-loop (kp, ki).
inline FitnessSpec make_wind_speed_fitness(double horizon_s = 8.0) {
    FitnessSpec spec;
    spec.scenario = "wind_speed_loop";
    spec.horizon_s = horizon_s;
    spec.run_mse = [horizon_s](const std::vector<double>& gains) {
        if (gains.size() != 2) throw ConfigError("wind speed scenario expects 2 gains");
        WindTurbineConfig cfg;
        cfg.speed_gains = {gains[0], gains[1]};
        cfg.wind = [](double t) { return t < 2.0 ? 8.0 : 9.5; };
        WindTurbineSim sim(cfg);
        const double dt_c = 1e-3, dt_e = 2e-4;
        long steps = static_cast<long>(std::llround(horizon_s / dt_c));
        double acc = 0.0;
        double w_base = cfg.dfig.omega_s / cfg.dfig.pole_pairs;
        for (long k = 0; k < steps; ++k) {
            sim.control_step(dt_c, dt_e);
            WindSample s = sim.sample();
            double e = (s.omega_m - s.omega_ref) / w_base;
            acc += e * e;
        }
        return acc / static_cast<double>(steps);
    };
    return spec;
}

// DC-bus recovery from a low start; candidate is the bus-voltage (kp, ki).
inline FitnessSpec make_gsc_vdc_fitness(double horizon_s = 4.0) {
    FitnessSpec spec;
    spec.scenario = "gsc_vdc_loop";
    spec.horizon_s = horizon_s;
    spec.run_mse = [horizon_s](const std::vector<double>& gains) {
        if (gains.size() != 2) throw ConfigError("gsc scenario expects 2 gains");
        WindTurbineConfig cfg;
        cfg.vdc_gains = {gains[0], gains[1]};
        cfg.v_dc0 = 1150.0;
        cfg.wind = [](double) { return 9.0; };
        WindTurbineSim sim(cfg);
        const double dt_c = 1e-3, dt_e = 2e-4;
        long steps = static_cast<long>(std::llround(horizon_s / dt_c));
        double acc = 0.0;
        for (long k = 0; k < steps; ++k) {
            sim.control_step(dt_c, dt_e);
            double e = (sim.bus().v_dc - cfg.v_dc_ref) / cfg.v_dc_ref;
            acc += e * e;
        }
        return acc / static_cast<double>(steps);
    };
    return spec;
}

inline FitnessSpec make_fitness(const std::string& scenario_id) {
    if (scenario_id == "pv_power_loop") return make_pv_power_fitness();
    if (scenario_id == "wind_speed_loop") return make_wind_speed_fitness();
    if (scenario_id == "gsc_vdc_loop") return make_gsc_vdc_fitness();
    throw ConfigError("unknown tuning scenario '" + scenario_id + "'");
}

} // namespace hybridplant

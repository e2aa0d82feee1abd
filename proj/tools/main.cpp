// Command-line front end: dynamic and hourly plant simulation, PI tuning,
// techno-economic reports, and grid-coverage analysis.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hybridplant/econ.hpp"
#include "hybridplant/sim.hpp"

namespace fs = std::filesystem;
using namespace hybridplant;

namespace {

struct GlobalOptions {
    std::string out_dir = ".";
    std::string format = "csv";
    long seed = -1;  // -1: keep the config's seed

    EmitFormat emit_format() const {
        if (format == "csv") return EmitFormat::Csv;
        if (format == "json") return EmitFormat::Json;
        throw ConfigError("unknown format '" + format + "'");
    }
    std::string ext() const { return format; }
    fs::path out_path(const std::string& stem) const {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec || !fs::is_directory(out_dir))
            throw IoError("cannot create output directory " + out_dir);
        return fs::path(out_dir) / (stem + "." + ext());
    }
};

Scenario load_scenario(const std::string& config_path, const GlobalOptions& g) {
    Scenario sc = Scenario::from_config(Config::from_file(config_path));
    if (g.seed >= 0) sc.seed = static_cast<std::uint64_t>(g.seed);
    return sc;
}

std::string output_stem(const std::string& config_path, const std::string& fallback) {
    std::string name = Config::from_file(config_path).get_string("scenario.name", "");
    return name.empty() ? fallback : name;
}

int run_simulate_dynamic(const std::string& config_path, const GlobalOptions& g) {
    Scenario sc = load_scenario(config_path, g);
    sc.mode = ScenarioMode::Dynamic;
    SimOutput out = run_dynamic(sc);
    fs::path p = emit_outputs(out, g.emit_format(),
                              g.out_path(output_stem(config_path, "dynamic_run")));
    std::cout << "wrote " << p.string() << " (" << out.rows() << " samples)\n";
    return 0;
}

int run_simulate_hourly(const std::string& config_path, const GlobalOptions& g) {
    Scenario sc = load_scenario(config_path, g);
    sc.mode = ScenarioMode::QuasiStatic;
    SimOutput out = run_quasi_static(sc);
    fs::path p = emit_outputs(out, g.emit_format(),
                              g.out_path(output_stem(config_path, "hourly_run")));
    std::cout << "wrote " << p.string() << " (" << out.rows() << " hours)\n";

    if (!sc.weather_csv.empty() || sc.synth_days > 0) {
        WeatherSeries weather = sc.weather_csv.empty()
                                    ? synth_weather(sc.synth_days, sc.synth_sky, sc.synth_weibull, sc.seed)
                                    : load_weather_csv(sc.weather_csv);
        auto months = monthly_aggregate(weather);
        CsvWriter w(g.out_path("monthly_weather").replace_extension(".csv"));
        w.raw_row({"year", "month", "ghi_mean", "ghi_max", "dni_mean", "dni_max", "dhi_mean",
                   "dhi_max", "temp_mean", "temp_max", "wind_mean", "wind_max", "hours"});
        for (const auto& m : months)
            w.raw_row({std::to_string(m.year), std::to_string(m.month), format_double(m.ghi_mean),
                       format_double(m.ghi_max), format_double(m.dni_mean), format_double(m.dni_max),
                       format_double(m.dhi_mean), format_double(m.dhi_max), format_double(m.temp_mean),
                       format_double(m.temp_max), format_double(m.wind_mean), format_double(m.wind_max),
                       std::to_string(m.hours)});
    }
    return 0;
}

int run_tune(const std::string& config_path, const GlobalOptions& g) {
    Config cfg = Config::from_file(config_path);
    std::string scenario_id = cfg.get_string("tune.scenario", "pv_power_loop");
    FitnessSpec spec = make_fitness(scenario_id);

    PsoSchedule sched;
    sched.omega_min = cfg.get_double("pso.omega_min", sched.omega_min);
    sched.omega_max = cfg.get_double("pso.omega_max", sched.omega_max);
    sched.lambda1 = cfg.get_double("pso.lambda1", sched.lambda1);
    sched.lambda2 = cfg.get_double("pso.lambda2", std::exp(sched.omega_max) /
                                                      (sched.omega_max - sched.omega_min));
    sched.c1_init = cfg.get_double("pso.c1_init", sched.c1_init);
    sched.c2_init = cfg.get_double("pso.c2_init", sched.c2_init);

    Bounds bounds;
    bounds.lo = cfg.get_doubles("tune.lower_bounds", {0.0, 0.0});
    bounds.hi = cfg.get_doubles("tune.upper_bounds", {50.0, 100.0});
    std::size_t population = static_cast<std::size_t>(cfg.get_int("tune.population", 20));
    long generations = cfg.get_int("tune.generations", 100);
    std::uint64_t seed = static_cast<std::uint64_t>(
        g.seed >= 0 ? g.seed : cfg.get_int("tune.seed", 1));
    unsigned threads = static_cast<unsigned>(cfg.get_int("tune.threads", 1));
    std::vector<std::vector<double>> warm;
    auto warm_values = cfg.get_doubles("tune.warm_start", {});
    if (!warm_values.empty()) warm.push_back(warm_values);

    TuneResult result = tune(spec, sched, bounds, population, generations, seed, threads, warm);

    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["scenario"] = result.scenario;
    j["seed"] = result.seed;
    j["population"] = population;
    j["generations"] = generations;
    j["best_gains"] = result.best_position;
    j["best_fitness"] = result.best_fitness;
    j["fitness_trace"] = result.fitness_trace;
    fs::path p = g.out_path("tune_result");
    p.replace_extension(".json");
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    f << j.dump(2) << '\n';
    std::cout << "wrote " << p.string() << "  best kp=" << result.best_position[0]
              << " ki=" << result.best_position[1] << " mse=" << result.best_fitness << "\n";
    return 0;
}

double energy_from_run(const std::string& run_csv) {
    SimOutput run = load_sim_csv(run_csv);
    const auto* total = run.find("total_mw");
    if (!total) throw ConfigError(run_csv + " lacks a total_mw channel");
    double mwh = 0.0;
    for (double mw : *total) mwh += mw;  // hourly rows: MW * 1 h
    double hours = static_cast<double>(total->size());
    if (hours <= 0) throw ValidationError("run has no rows");
    return mwh * 8760.0 / hours;  // scale the covered span to a full year
}

int run_econ(const std::string& config_path, const std::string& energy_arg,
             const GlobalOptions& g) {
    Config cfg = Config::from_file(config_path);
    auto lines = cost_lines_from_config(cfg);
    FinanceParams fin = finance_from_config(cfg);
    EmissionFactors factors = emissions_from_config(cfg);

    double annual_mwh;
    try {
        annual_mwh = parse_double(energy_arg, "--energy");
    } catch (const ValidationError&) {
        annual_mwh = energy_from_run(energy_arg);
    }
    double pv_fraction = cfg.get_double("energy.pv_fraction", 0.145);
    EnergyLedger ledger{annual_mwh * pv_fraction, annual_mwh * (1.0 - pv_fraction)};

    OmBasis basis = cfg.get_string("finance.om_basis", "replacement") == "capital"
                        ? OmBasis::Capital
                        : OmBasis::Replacement;
    CashflowReport report = cashflow_report(lines, fin, ledger, basis);

    CsvWriter w(g.out_path("cashflow").replace_extension(".csv"));
    w.raw_row({"year", "revenue", "cost", "net", "cumulative"});
    for (const auto& r : report.rows)
        w.raw_row({std::to_string(r.year), format_double(r.revenue), format_double(r.cost),
                   format_double(r.net), format_double(r.cumulative)});

    std::vector<double> cost_schedule, energy_schedule, revenue_schedule;
    for (long y = 1; y <= fin.lifetime_years; ++y) {
        cost_schedule.push_back(report.rows[y].cost);
        revenue_schedule.push_back(report.rows[y].revenue);
        energy_schedule.push_back(ledger.annual_energy_mwh());
    }
    double rate = fin.discount_rate() * 100.0;
    double lcoe_value = lcoe(report.capital_total, cost_schedule, energy_schedule, rate);
    std::vector<double> om_only(fin.lifetime_years, report.om_annual);
    double lcoe_om_only = lcoe(report.capital_total, om_only, energy_schedule, rate);
    double npv_value = npv(revenue_schedule, cost_schedule, rate, report.capital_total);
    double inflow = ledger.annual_energy_mwh() * 1000.0 * fin.tariff - report.om_annual;
    GasTotals gas = avoided_emissions(ledger.annual_energy_mwh(), factors);

    double af = 0.0;
    for (long t = 1; t <= fin.lifetime_years; ++t)
        af += 1.0 / std::pow(1.0 + rate / 100.0, static_cast<double>(t));

    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["annual_energy_mwh"] = ledger.annual_energy_mwh();
    j["pv_mwh"] = ledger.pv_mwh;
    j["wind_mwh"] = ledger.wind_mwh;
    j["capital_total"] = report.capital_total;
    j["om_annual"] = report.om_annual;
    j["om_total_nominal"] = report.om_annual * fin.lifetime_years;
    j["om_total_discounted"] = report.om_annual * af;
    j["lcoe_usd_per_kwh"] = lcoe_value;              // full schedule incl. replacements
    j["lcoe_om_only_usd_per_kwh"] = lcoe_om_only;    // flat O&M schedule
    j["npv_usd"] = npv_value;
    j["payback_simple_years"] = payback(report.capital_total, inflow);
    j["payback_from_cumulative_years"] = report.payback_from_cumulative;
    j["emissions_avoided_kg_per_year"] = {
        {"co2", gas.co2_kg}, {"so2", gas.so2_kg}, {"nox", gas.nox_kg}};
    fs::path p = g.out_path("econ_summary");
    p.replace_extension(".json");
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write " + p.string());
    f << j.dump(2) << '\n';
    std::cout << "wrote " << p.string() << "  lcoe=" << lcoe_value
              << " payback=" << payback(report.capital_total, inflow) << "\n";
    return 0;
}

int run_coverage(const std::string& run_csv, const std::string& load_csv,
                 const GlobalOptions& g) {
    SimOutput run = load_sim_csv(run_csv);
    LoadSeries load = load_load_csv(load_csv);
    CoverageReport rep = coverage_analysis(run, load);
    fs::path p = emit_outputs(rep, g.emit_format(), g.out_path("coverage"));
    std::cout << "wrote " << p.string() << "  mean=" << rep.mean_pct << "% max=" << rep.max_pct
              << "%\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid grid-connected PV-wind plant simulator"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--format", g.format, "csv|json")->capture_default_str();
    app.add_option("--seed", g.seed, "override the config seed");

    std::string config_path, energy_arg, run_csv, load_csv;

    auto* dyn = app.add_subcommand("simulate-dynamic", "closed-loop electrical run");
    dyn->add_option("config", config_path, "scenario config")->required();

    auto* hourly = app.add_subcommand("simulate-hourly", "quasi-static hourly run");
    hourly->add_option("config", config_path, "scenario config")->required();

    auto* tune_cmd = app.add_subcommand("tune", "swarm-tune PI gains");
    tune_cmd->add_option("config", config_path, "tuning config")->required();

    auto* econ_cmd = app.add_subcommand("econ", "cost, value and emissions report");
    econ_cmd->add_option("config", config_path, "cost ledger config")->required();
    econ_cmd->add_option("--energy", energy_arg, "annual MWh, or a run CSV to integrate")
        ->required();

    auto* cov = app.add_subcommand("coverage", "share of a reference plant covered");
    cov->add_option("run", run_csv, "hourly run output CSV")->required();
    cov->add_option("load", load_csv, "reference load CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (dyn->parsed()) return run_simulate_dynamic(config_path, g);
        if (hourly->parsed()) return run_simulate_hourly(config_path, g);
        if (tune_cmd->parsed()) return run_tune(config_path, g);
        if (econ_cmd->parsed()) return run_econ(config_path, energy_arg, g);
        if (cov->parsed()) return run_coverage(run_csv, load_csv, g);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const SimulationFault& e) {
        std::cerr << "simulation fault: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

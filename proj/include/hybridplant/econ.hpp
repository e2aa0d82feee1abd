#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hybridplant/config.hpp"
#include "hybridplant/errors.hpp"

namespace hybridplant {

struct ComponentCostLine {
    std::string name;
    double unit_capital = 0.0;      // $/unit
    double unit_replacement = 0.0;  // $/unit
    double om_percent = 0.0;        // % of the basis cost per year
    long count = 1;
    double lifetime_years = 25.0;   // replacement cadence

    void validate() const {
        if (unit_capital < 0 || unit_replacement < 0) throw ValidationError("costs must be >= 0");
        if (count < 1) throw ValidationError("count must be >= 1");
        if (om_percent < 0 || om_percent > 100) throw ValidationError("om percent outside [0,100]");
    }
};

struct FinanceParams {
    double k_overhead = 0.0;       // engineering/logistics fraction of capital
    double interest_rate = 3.75;   // %/yr
    double inflation_rate = 2.42;  // %/yr
    long lifetime_years = 25;
    double tariff = 0.114;         // $/kWh feed-in
    double base_price = 0.04;      // $/kWh market reference
    bool real_rate = false;        // combine interest and inflation when true

    void validate() const {
        if (lifetime_years < 1) throw ValidationError("lifetime must be >= 1 year");
        if (interest_rate < 0 || interest_rate >= 100) throw ValidationError("interest rate outside [0,100)");
        if (inflation_rate < 0 || inflation_rate >= 100) throw ValidationError("inflation rate outside [0,100)");
    }

    double discount_rate() const {
        double i = interest_rate / 100.0;
        if (!real_rate) return i;
        double f = inflation_rate / 100.0;
        return (1.0 + i) / (1.0 + f) - 1.0;
    }
};

struct EnergyLedger {
    double pv_mwh = 0.0;
    double wind_mwh = 0.0;

    double annual_energy_mwh() const { return pv_mwh + wind_mwh; }
    void validate() const {
        if (pv_mwh < 0 || wind_mwh < 0) throw ValidationError("energy must be >= 0");
    }
};

struct EmissionFactors {
    double co2_kg_per_mwh = 400.0;
    double so2_kg_per_mwh = 2.74;
    double nox_kg_per_mwh = 1.34;
};

enum class OmBasis { Capital, Replacement };

inline double capital_cost(const ComponentCostLine& line, double k_overhead) {
    line.validate();
    if (k_overhead < 0) throw DomainError("overhead fraction must be >= 0");
    return (1.0 + k_overhead) * static_cast<double>(line.count) * line.unit_capital;
}

inline double annual_om_cost(const ComponentCostLine& line, OmBasis basis) {
    line.validate();
    double unit = basis == OmBasis::Capital ? line.unit_capital : line.unit_replacement;
    return line.om_percent / 100.0 * static_cast<double>(line.count) * unit;
}

// Discounted lifetime cost per discounted lifetime energy, $/kWh.
inline double lcoe(double i0, const std::vector<double>& annual_cost,
                   const std::vector<double>& annual_energy_mwh, double rate_percent) {
    if (annual_cost.size() != annual_energy_mwh.size())
        throw ConfigError("cost and energy schedules differ in length");
    double i = rate_percent / 100.0;
    double cost = i0, energy_kwh = 0.0;
    for (std::size_t t = 0; t < annual_cost.size(); ++t) {
        double df = std::pow(1.0 + i, static_cast<double>(t + 1));
        cost += annual_cost[t] / df;
        energy_kwh += annual_energy_mwh[t] * 1000.0 / df;
    }
    if (energy_kwh <= 0.0) throw DomainError("discounted energy is zero");
    return cost / energy_kwh;
}

inline double npv(const std::vector<double>& revenues, const std::vector<double>& costs,
                  double rate_percent, double i0) {
    if (revenues.size() != costs.size()) throw ConfigError("schedules differ in length");
    double i = rate_percent / 100.0;
    double acc = -i0;
    for (std::size_t t = 0; t < revenues.size(); ++t)
        acc += (revenues[t] - costs[t]) / std::pow(1.0 + i, static_cast<double>(t + 1));
    return acc;
}

// Simple undiscounted payback. Non-positive inflow never pays back.
inline double payback(double i0, double inflow_per_year) {
    if (inflow_per_year <= 0.0) return std::numeric_limits<double>::infinity();
    return i0 / inflow_per_year;
}

struct GasTotals {
    double co2_kg = 0.0;
    double so2_kg = 0.0;
    double nox_kg = 0.0;
};

inline GasTotals avoided_emissions(double annual_energy_mwh, const EmissionFactors& f) {
    if (annual_energy_mwh < 0.0) throw DomainError("energy must be >= 0");
    return {annual_energy_mwh * f.co2_kg_per_mwh, annual_energy_mwh * f.so2_kg_per_mwh,
            annual_energy_mwh * f.nox_kg_per_mwh};
}

// Replacement falls due after each whole lifetime, rounded up; nothing is
// replaced in the final year.
inline std::vector<long> replacement_years(const ComponentCostLine& line, long horizon_years) {
    std::vector<long> years;
    for (double t = line.lifetime_years; ; t += line.lifetime_years) {
        long y = static_cast<long>(std::ceil(t));
        if (y >= horizon_years) break;
        years.push_back(y);
    }
    return years;
}

struct CashflowRow {
    long year = 0;
    double revenue = 0.0;
    double cost = 0.0;
    double net = 0.0;
    double cumulative = 0.0;
};

struct CashflowReport {
    std::vector<CashflowRow> rows;      // year 0 .. n
    double capital_total = 0.0;
    double om_annual = 0.0;
    double payback_from_cumulative = std::numeric_limits<double>::infinity();
};

// Year 0 carries the capital outlay; years 1..n carry tariff revenue minus
// O&M and scheduled replacements.
inline CashflowReport cashflow_report(const std::vector<ComponentCostLine>& lines,
                                      const FinanceParams& fin, const EnergyLedger& energy,
                                      OmBasis basis = OmBasis::Replacement) {
    fin.validate();
    energy.validate();
    CashflowReport report;
    double capital = 0.0, om = 0.0;
    for (const auto& line : lines) {
        capital += capital_cost(line, fin.k_overhead);
        om += annual_om_cost(line, basis);
    }
    report.capital_total = capital;
    report.om_annual = om;
    double revenue = energy.annual_energy_mwh() * 1000.0 * fin.tariff;

    std::vector<double> replacement_cost(fin.lifetime_years + 1, 0.0);
    for (const auto& line : lines)
        for (long y : replacement_years(line, fin.lifetime_years))
            replacement_cost[y] += static_cast<double>(line.count) * line.unit_replacement;

    double cumulative = -capital;
    report.rows.push_back({0, 0.0, capital, -capital, cumulative});
    for (long y = 1; y <= fin.lifetime_years; ++y) {
        double cost = om + replacement_cost[y];
        double net = revenue - cost;
        double prev = cumulative;
        cumulative += net;
        report.rows.push_back({y, revenue, cost, net, cumulative});
        if (prev < 0.0 && cumulative >= 0.0 && net > 0.0 &&
            !std::isfinite(report.payback_from_cumulative))
            report.payback_from_cumulative = static_cast<double>(y - 1) + (-prev) / net;
    }
    return report;
}

inline std::vector<ComponentCostLine> cost_lines_from_config(const Config& cfg) {
    // sections look like [costs.wind_turbine]
    std::vector<ComponentCostLine> lines;
    std::vector<std::string> names;
    for (const auto& [key, value] : cfg.entries()) {
        if (key.rfind("costs.", 0) != 0) continue;
        auto rest = key.substr(6);
        auto dot = rest.find('.');
        if (dot == std::string::npos) continue;
        std::string name = rest.substr(0, dot);
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }
    for (const auto& name : names) {
        ComponentCostLine line;
        line.name = name;
        auto key = [&](const char* k) { return "costs." + name + "." + k; };
        line.unit_capital = cfg.require_double(key("unit_capital"));
        line.unit_replacement = cfg.get_double(key("unit_replacement"), 0.0);
        line.om_percent = cfg.get_double(key("om_percent"), 0.0);
        line.count = cfg.get_int(key("count"), 1);
        line.lifetime_years = cfg.get_double(key("lifetime_years"), 25.0);
        line.validate();
        lines.push_back(line);
    }
    if (lines.empty()) throw ConfigError("no [costs.*] sections found");
    return lines;
}

inline FinanceParams finance_from_config(const Config& cfg) {
    FinanceParams f;
    f.k_overhead = cfg.get_double("finance.k_overhead", f.k_overhead);
    f.interest_rate = cfg.get_double("finance.interest_rate", f.interest_rate);
    f.inflation_rate = cfg.get_double("finance.inflation_rate", f.inflation_rate);
    f.lifetime_years = cfg.get_int("finance.lifetime_years", f.lifetime_years);
    f.tariff = cfg.get_double("finance.tariff", f.tariff);
    f.base_price = cfg.get_double("finance.base_price", f.base_price);
    f.real_rate = cfg.get_bool("finance.real_rate", f.real_rate);
    f.validate();
    return f;
}

inline EmissionFactors emissions_from_config(const Config& cfg) {
    EmissionFactors e;
    e.co2_kg_per_mwh = cfg.get_double("emissions.co2_kg_per_mwh", e.co2_kg_per_mwh);
    e.so2_kg_per_mwh = cfg.get_double("emissions.so2_kg_per_mwh", e.so2_kg_per_mwh);
    e.nox_kg_per_mwh = cfg.get_double("emissions.nox_kg_per_mwh", e.nox_kg_per_mwh);
    return e;
}

} // namespace hybridplant

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hybridplant/econ.hpp"

using namespace hybridplant;

namespace {

std::vector<ComponentCostLine> plant_lines() {
    return {
        {"pv_panel", 132.0, 105.0, 1.0, 14320, 25.0},
        {"wind_turbine", 3862500.0, 3090000.0, 1.0, 10, 25.0},
        {"converter", 4375.0, 3500.0, 1.0, 358, 12.5},
    };
}

FinanceParams plant_finance() {
    FinanceParams f;
    f.k_overhead = 0.0;
    f.interest_rate = 3.75;
    f.inflation_rate = 2.42;
    f.lifetime_years = 25;
    f.tariff = 0.114;
    return f;
}

constexpr double kAnnualMwh = 70983.355;

} // namespace

TEST_CASE("capital cost") {
    auto lines = plant_lines();
    CHECK(capital_cost(lines[1], 0.0) == Catch::Approx(38625000.0));
    double total = 0.0;
    for (const auto& l : lines) total += capital_cost(l, 0.0);
    CHECK(total == Catch::Approx(42081490.0));
    CHECK(std::abs(total - 42.1e6) / 42.1e6 < 0.0005);
    CHECK(capital_cost(lines[1], 0.25) == Catch::Approx(48281250.0));
}

TEST_CASE("operating cost bases") {
    auto lines = plant_lines();
    SECTION("replacement basis reproduces the reported annual figures exactly") {
        CHECK(annual_om_cost(lines[1], OmBasis::Replacement) == Catch::Approx(309000.0));
        CHECK(annual_om_cost(lines[0], OmBasis::Replacement) == Catch::Approx(15036.0));
        CHECK(annual_om_cost(lines[2], OmBasis::Replacement) == Catch::Approx(12530.0));
    }
    SECTION("capital basis does not") {
        CHECK(annual_om_cost(lines[1], OmBasis::Capital) != Catch::Approx(309000.0));
        CHECK(annual_om_cost(lines[0], OmBasis::Capital) != Catch::Approx(15036.0));
        CHECK(annual_om_cost(lines[2], OmBasis::Capital) != Catch::Approx(12530.0));
        CHECK(annual_om_cost(lines[1], OmBasis::Capital) == Catch::Approx(386250.0));
    }
}

TEST_CASE("levelized cost of energy") {
    SECTION("free plant, free running: zero") {
        CHECK(lcoe(0.0, {0.0, 0.0}, {100.0, 100.0}, 0.0) == 0.0);
    }
    SECTION("hand-checked flat case") {
        std::vector<double> costs(10, 0.0), energy(10, 1000.0);
        CHECK(lcoe(1e6, costs, energy, 0.0) == Catch::Approx(0.1));
    }
    SECTION("plant-scale figure from the cost ledger") {
        std::vector<double> costs(25, 336566.0), energy(25, kAnnualMwh);
        double v = lcoe(42081490.0, costs, energy, 3.75);
        CHECK(v == Catch::Approx(0.041693948502607915).epsilon(1e-9));
        // deliberately far from the external-tool figure, which folds in
        // effects this formula does not model
        CHECK(std::abs(v - 0.084) > 0.03);
    }
    SECTION("homogeneous in costs, inverse in energy") {
        std::vector<double> costs(5, 100.0), energy(5, 10.0);
        double base = lcoe(1000.0, costs, energy, 5.0);
        std::vector<double> costs2(5, 300.0);
        double scaled = lcoe(3000.0, costs2, energy, 5.0);
        CHECK(scaled == Catch::Approx(3.0 * base).epsilon(1e-12));
        std::vector<double> energy2(5, 30.0);
        CHECK(lcoe(1000.0, costs, energy2, 5.0) == Catch::Approx(base / 3.0).epsilon(1e-12));
    }
    SECTION("zero energy is rejected") {
        CHECK_THROWS_AS(lcoe(1.0, {1.0}, {0.0}, 5.0), DomainError);
    }
}

TEST_CASE("net present value") {
    SECTION("undiscounted sum at zero rate") {
        CHECK(npv({100.0, 100.0}, {30.0, 30.0}, 0.0, 50.0) == Catch::Approx(90.0));
    }
    SECTION("single-year hand case") {
        CHECK(npv({110.0}, {10.0}, 10.0, 50.0) == Catch::Approx(40.909090909).epsilon(1e-9));
    }
    SECTION("no revenue is strictly negative") {
        CHECK(npv({0.0, 0.0}, {5.0, 5.0}, 3.0, 100.0) < -100.0);
    }
    SECTION("strictly decreasing in the rate for positive net flows") {
        std::vector<double> r(10, 100.0), c(10, 20.0);
        double prev = 1e18;
        for (double i = 0.0; i <= 15.0; i += 1.5) {
            double v = npv(r, c, i, 200.0);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("payback") {
    CHECK(payback(100.0, 25.0) == Catch::Approx(4.0));
    double inflow = kAnnualMwh * 114.0 - 336566.0;
    CHECK(payback(42081490.0, inflow) == Catch::Approx(5.4259934387).epsilon(1e-9));
    CHECK(payback(100.0, 50.0) == Catch::Approx(0.5 * payback(100.0, 25.0)));
    CHECK(std::isinf(payback(100.0, 0.0)));
    CHECK(std::isinf(payback(100.0, -5.0)));
}

TEST_CASE("avoided emissions") {
    EmissionFactors f;
    GasTotals g = avoided_emissions(kAnnualMwh, f);
    CHECK(g.co2_kg == Catch::Approx(28393342.0).margin(0.5));
    CHECK(g.so2_kg == Catch::Approx(194494.0).margin(2.0));
    CHECK(g.nox_kg == Catch::Approx(95118.0).margin(2.0));
    GasTotals z = avoided_emissions(0.0, f);
    CHECK(z.co2_kg == 0.0);
    // linear in energy
    GasTotals twice = avoided_emissions(2.0 * kAnnualMwh, f);
    CHECK(twice.so2_kg == Catch::Approx(2.0 * g.so2_kg).epsilon(1e-12));
}

TEST_CASE("replacement scheduling") {
    ComponentCostLine conv{"converter", 4375.0, 3500.0, 1.0, 358, 12.5};
    auto years = replacement_years(conv, 25);
    REQUIRE(years.size() == 1);
    CHECK(years[0] == 13);
    ComponentCostLine pv{"pv", 132.0, 105.0, 1.0, 14320, 25.0};
    CHECK(replacement_years(pv, 25).empty());
    ComponentCostLine battery{"battery", 100.0, 90.0, 1.0, 10, 8.0};
    auto by = replacement_years(battery, 25);
    REQUIRE(by.size() == 3);
    CHECK(by[0] == 8);
    CHECK(by[2] == 24);
}

TEST_CASE("cash flow over the project life") {
    auto lines = plant_lines();
    FinanceParams fin = plant_finance();
    EnergyLedger ledger{0.145 * kAnnualMwh, 0.855 * kAnnualMwh};

    SECTION("plant-scale report") {
        CashflowReport rep = cashflow_report(lines, fin, ledger);
        REQUIRE(rep.rows.size() == 26u);
        CHECK(rep.rows[0].cumulative == Catch::Approx(-42081490.0));
        CHECK(rep.om_annual == Catch::Approx(336566.0));
        // the sign change happens where the simple payback predicts
        CHECK(rep.payback_from_cumulative > 5.0);
        CHECK(rep.payback_from_cumulative < 8.0);
        CHECK(rep.payback_from_cumulative == Catch::Approx(5.4259934387).epsilon(1e-6));
        // converter replacement shows up once, in year 13
        CHECK(rep.rows[13].cost == Catch::Approx(336566.0 + 358.0 * 3500.0));
        // quarter-century profit lands in the hundred-million band
        double final_cum = rep.rows.back().cumulative;
        CHECK(final_cum > 1e8);
        CHECK(final_cum < 3e8);
    }

    SECTION("no tariff means strictly decreasing cumulative flow") {
        FinanceParams zero = fin;
        zero.tariff = 0.0;
        CashflowReport rep = cashflow_report(lines, zero, ledger);
        for (std::size_t i = 1; i < rep.rows.size(); ++i)
            CHECK(rep.rows[i].cumulative < rep.rows[i - 1].cumulative);
        CHECK(std::isinf(rep.payback_from_cumulative));
    }
}

TEST_CASE("config loading of the ledger") {
    Config cfg;
    cfg.set("costs.wind_turbine.unit_capital", "3862500");
    cfg.set("costs.wind_turbine.unit_replacement", "3090000");
    cfg.set("costs.wind_turbine.om_percent", "1");
    cfg.set("costs.wind_turbine.count", "10");
    cfg.set("finance.interest_rate", "3.75");
    auto lines = cost_lines_from_config(cfg);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].name == "wind_turbine");
    CHECK(lines[0].count == 10);
    FinanceParams fin = finance_from_config(cfg);
    CHECK(fin.interest_rate == Catch::Approx(3.75));
    CHECK(fin.tariff == Catch::Approx(0.114));
    EmissionFactors ef = emissions_from_config(cfg);
    CHECK(ef.co2_kg_per_mwh == Catch::Approx(400.0));
}

TEST_CASE("real-rate option combines interest and inflation") {
    FinanceParams fin = plant_finance();
    CHECK(fin.discount_rate() == Catch::Approx(0.0375));
    fin.real_rate = true;
    CHECK(fin.discount_rate() == Catch::Approx((1.0375 / 1.0242) - 1.0).epsilon(1e-12));
}

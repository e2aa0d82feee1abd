#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hybridplant/weather.hpp"

using namespace hybridplant;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    auto p = fs::temp_directory_path() / ("hybridplant_test_" + name);
    return p;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    f << content;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string day_csv(int rows, double wind_row7 = 3.5) {
    std::string s = "timestamp,ghi_wm2,dni_wm2,dhi_wm2,temp_c,wind10m_ms\n";
    for (int h = 0; h < rows; ++h) {
        char line[128];
        double wind = h == 7 ? wind_row7 : 4.0 + 0.25 * h;
        std::snprintf(line, sizeof(line), "2021-01-01T%02d:00,%g,%g,%g,%g,%g\n", h,
                      h >= 7 && h <= 17 ? 600.0 + h : 0.0, 100.0, 50.0, 10.0 + h, wind);
        s += line;
    }
    return s;
}

} // namespace

TEST_CASE("well-formed day loads with hourly cadence") {
    auto p = temp_file("day.csv");
    write_file(p, day_csv(24));
    WeatherSeries s = load_weather_csv(p);
    REQUIRE(s.records.size() == 24);
    for (std::size_t i = 1; i < s.records.size(); ++i)
        CHECK(s.records[i].timestamp.serial_hours() ==
              s.records[i - 1].timestamp.serial_hours() + 1);
}

TEST_CASE("missing irradiance column is a schema error naming it") {
    auto p = temp_file("noghi.csv");
    write_file(p, "timestamp,dni_wm2,dhi_wm2,temp_c,wind10m_ms\n2021-01-01T00:00,0,0,5,4\n");
    REQUIRE_THROWS_MATCHES(load_weather_csv(p), SchemaError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("ghi_wm2")));
}

TEST_CASE("negative wind in row 7 is a validation error citing the row") {
    auto p = temp_file("negwind.csv");
    write_file(p, day_csv(24, -1.0));
    REQUIRE_THROWS_MATCHES(load_weather_csv(p), ValidationError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("row 7")));
}

TEST_CASE("non-monotone timestamp is a sequence error with row index") {
    auto p = temp_file("mono.csv");
    std::string csv = "timestamp,ghi_wm2,dni_wm2,dhi_wm2,temp_c,wind10m_ms\n"
                      "2021-01-01T05:00,0,0,0,5,4\n"
                      "2021-01-01T04:00,0,0,0,5,4\n";
    write_file(p, csv);
    REQUIRE_THROWS_MATCHES(load_weather_csv(p), SequenceError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("row 1")));
}

TEST_CASE("gaps in the hourly cadence are rejected") {
    auto p = temp_file("gap.csv");
    std::string csv = "timestamp,ghi_wm2,dni_wm2,dhi_wm2,temp_c,wind10m_ms\n"
                      "2021-01-01T05:00,0,0,0,5,4\n"
                      "2021-01-01T07:00,0,0,0,5,4\n";
    write_file(p, csv);
    REQUIRE_THROWS_AS(load_weather_csv(p), SequenceError);
}

TEST_CASE("ingestion is lossless: emitted file reloads bit-exactly") {
    WeatherSeries s = synth_weather(3, {}, {}, 99);
    // values with many significant digits survive the round trip
    auto p1 = temp_file("round1.csv");
    write_weather_csv(s, p1);
    WeatherSeries s2 = load_weather_csv(p1);
    REQUIRE(s2.records.size() == s.records.size());
    for (std::size_t i = 0; i < s.records.size(); ++i) {
        CHECK(s2.records[i].ghi == s.records[i].ghi);
        CHECK(s2.records[i].dni == s.records[i].dni);
        CHECK(s2.records[i].dhi == s.records[i].dhi);
        CHECK(s2.records[i].t_ambient == s.records[i].t_ambient);
        CHECK(s2.records[i].wind_10m == s.records[i].wind_10m);
        CHECK(s2.records[i].timestamp == s.records[i].timestamp);
    }
    auto p2 = temp_file("round2.csv");
    write_weather_csv(s2, p2);
    CHECK(read_file(p1) == read_file(p2));
}

TEST_CASE("hub-height shear") {
    CHECK(shear_to_hub(5.0, 10.0, 10.0, 0.2) == Catch::Approx(5.0));
    CHECK(shear_to_hub(5.0, 10.0, 80.0, 0.0) == Catch::Approx(5.0));
    CHECK(shear_to_hub(5.0, 10.0, 80.0, 0.2) == Catch::Approx(7.578582832551991).epsilon(1e-12));
    CHECK_THROWS_AS(shear_to_hub(5.0, 0.0, 80.0, 0.2), DomainError);
    CHECK_THROWS_AS(shear_to_hub(5.0, 10.0, 80.0, 1.5), DomainError);

    // monotone increasing in hub height for positive shear
    double prev = 0.0;
    for (double h = 10.0; h <= 120.0; h += 5.0) {
        double v = shear_to_hub(6.0, 10.0, h, 0.2);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("synthetic weather is deterministic and valid") {
    WeatherSeries a = synth_weather(10, {}, {}, 42);
    WeatherSeries b = synth_weather(10, {}, {}, 42);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].ghi == b.records[i].ghi);
        CHECK(a.records[i].wind_10m == b.records[i].wind_10m);
    }

    // invariants hold across seeds
    for (std::uint64_t seed : {1ull, 7ull, 123ull, 99999ull}) {
        WeatherSeries s = synth_weather(5, {}, {}, seed);
        long long prev = s.records.front().timestamp.serial_hours() - 1;
        for (const auto& r : s.records) {
            CHECK(r.ghi >= 0.0);
            CHECK(r.dni >= 0.0);
            CHECK(r.dhi >= 0.0);
            CHECK(r.wind_10m >= 0.0);
            CHECK(r.t_ambient >= -60.0);
            CHECK(r.t_ambient <= 70.0);
            CHECK(r.timestamp.serial_hours() == prev + 1);
            prev = r.timestamp.serial_hours();
        }
    }
}

TEST_CASE("night hours carry no irradiance") {
    WeatherSeries s = synth_weather(2, {}, {}, 5);
    for (const auto& r : s.records) {
        if (r.timestamp.hour == 0 || r.timestamp.hour == 23 || r.timestamp.hour == 3) {
            CHECK(r.ghi == 0.0);
            CHECK(r.dni == 0.0);
            CHECK(r.dhi == 0.0);
        }
    }
}

TEST_CASE("synthetic wind matches the Weibull mean within 2%") {
    // k=2, c=8 -> mean = 8 * Gamma(1.5) = 7.0898
    WeibullParams w{2.0, 8.0};
    WeatherSeries s = synth_weather(417, {}, w, 2024);  // 10008 samples
    double acc = 0.0;
    for (const auto& r : s.records) acc += r.wind_10m;
    double mean = acc / static_cast<double>(s.records.size());
    CHECK(mean == Catch::Approx(7.089815403622064).epsilon(0.02));
}

TEST_CASE("bad synthesis parameters are rejected") {
    CHECK_THROWS_AS(synth_weather(0, {}, {}, 1), DomainError);
    CHECK_THROWS_AS(synth_weather(3, {}, {-1.0, 8.0}, 1), DomainError);
    CHECK_THROWS_AS(synth_weather(3, {}, {2.0, 0.0}, 1), DomainError);
}

TEST_CASE("monthly aggregation") {
    SECTION("constant wind averages to itself") {
        WeatherSeries s;
        HourStamp ts{2021, 3, 1, 0};
        for (int i = 0; i < 31 * 24; ++i) {
            s.records.push_back({ts, 0, 0, 0, 15.0, 6.0});
            ts = ts.plus_hours(1);
        }
        auto months = monthly_aggregate(s);
        REQUIRE(months.size() == 1);
        CHECK(months[0].wind_mean == Catch::Approx(6.0));
        CHECK(months[0].wind_max == Catch::Approx(6.0));
        CHECK(months[0].month == 3);
    }
    SECTION("two calendar months give exactly two rows") {
        WeatherSeries s = synth_weather(40, {}, {}, 11, {2021, 1, 1, 0});
        auto months = monthly_aggregate(s);
        REQUIRE(months.size() == 2);
        CHECK(months[0].month == 1);
        CHECK(months[1].month == 2);
        CHECK(months[0].hours == 31u * 24u);
    }
    SECTION("one synthetic month sits near the Weibull mean") {
        WeatherSeries s = synth_weather(31, {}, {2.0, 8.0}, 77);
        auto months = monthly_aggregate(s);
        REQUIRE(months.size() == 1);
        CHECK(months[0].wind_mean == Catch::Approx(7.0898).epsilon(0.08));
    }
    SECTION("empty series is rejected") {
        CHECK_THROWS_AS(monthly_aggregate(WeatherSeries{}), ValidationError);
    }
}

TEST_CASE("load series loader validates demand and cadence") {
    auto p = temp_file("load.csv");
    write_file(p, "timestamp,demand_mw\n2021-01-01T00:00,55\n2021-01-01T01:00,54.5\n");
    LoadSeries l = load_load_csv(p);
    REQUIRE(l.records.size() == 2);
    CHECK(l.records[1].demand_mw == Catch::Approx(54.5));

    write_file(p, "timestamp,demand_mw\n2021-01-01T00:00,-5\n");
    CHECK_THROWS_AS(load_load_csv(p), ValidationError);
}

TEST_CASE("synthetic load is peak-shaped and deterministic") {
    LoadSeries a = synth_load(7, 30.0, 60.0, 3);
    LoadSeries b = synth_load(7, 30.0, 60.0, 3);
    REQUIRE(a.records.size() == 7 * 24);
    for (std::size_t i = 0; i < a.records.size(); ++i)
        CHECK(a.records[i].demand_mw == b.records[i].demand_mw);
    for (const auto& r : a.records) CHECK(r.demand_mw >= 0.0);
}

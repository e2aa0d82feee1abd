#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hybridplant/csv.hpp"
#include "hybridplant/errors.hpp"
#include "hybridplant/rng.hpp"

namespace hybridplant {

// Calendar hour, local time, no sub-hour resolution. Canonical text form is
// "YYYY-MM-DDTHH:MM".
struct HourStamp {
    int year = 2021;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;   // 0..23

    // Days since 1970-01-01 of the civil date (Howard Hinnant's algorithm),
    // valid for the Gregorian calendar.
    long long serial_days() const {
        int y = year - (month <= 2);
        int era = (y >= 0 ? y : y - 399) / 400;
        unsigned yoe = static_cast<unsigned>(y - era * 400);
        unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
        unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return static_cast<long long>(era) * 146097 + static_cast<long long>(doe) - 719468;
    }

    long long serial_hours() const { return serial_days() * 24 + hour; }

    HourStamp plus_hours(long long n) const {
        long long h = serial_hours() + n;
        long long days = h / 24;
        int hr = static_cast<int>(h % 24);
        if (hr < 0) {
            hr += 24;
            days -= 1;
        }
        // invert serial_days
        long long z = days + 719468;
        long long era = (z >= 0 ? z : z - 146096) / 146097;
        unsigned doe = static_cast<unsigned>(z - era * 146097);
        unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        long long y = static_cast<long long>(yoe) + era * 400;
        unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        unsigned mp = (5 * doy + 2) / 153;
        unsigned d = doy - (153 * mp + 2) / 5 + 1;
        unsigned m = mp + (mp < 10 ? 3 : -9);
        y += (m <= 2);
        return HourStamp{static_cast<int>(y), static_cast<int>(m), static_cast<int>(d), hr};
    }

    std::string to_string() const {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00", year, month, day, hour);
        return buf;
    }

    static HourStamp parse(const std::string& s, const std::string& where) {
        int y, mo, d, h, mi = 0;
        int n = std::sscanf(s.c_str(), "%d-%d-%dT%d:%d", &y, &mo, &d, &h, &mi);
        if (n < 4 || mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi != 0)
            throw SequenceError("bad timestamp at " + where + ": '" + s + "'");
        return HourStamp{y, mo, d, h};
    }

    bool operator==(const HourStamp&) const = default;
};

struct WeatherRecord {
    HourStamp timestamp;
    double ghi = 0.0;        // W/m^2
    double dni = 0.0;        // W/m^2
    double dhi = 0.0;        // W/m^2
    double t_ambient = 0.0;  // degC
    double wind_10m = 0.0;   // m/s at measurement height
};

struct Site {
    double latitude_deg = 27.52;
    double longitude_deg = -0.17;
    double hub_height_m = 80.0;
    double measurement_height_m = 10.0;
};

struct WeatherSeries {
    std::vector<WeatherRecord> records;
    Site site;
};

struct LoadRecord {
    HourStamp timestamp;
    double demand_mw = 0.0;
};

struct LoadSeries {
    std::vector<LoadRecord> records;
};

// Canonical column names; remap when a file uses different headers.
struct WeatherColumns {
    std::string timestamp = "timestamp";
    std::string ghi = "ghi_wm2";
    std::string dni = "dni_wm2";
    std::string dhi = "dhi_wm2";
    std::string temp = "temp_c";
    std::string wind = "wind10m_ms";
};

namespace detail {

inline int require_column(const CsvTable& t, const std::string& name, const std::string& path) {
    int c = t.column(name);
    if (c < 0) throw SchemaError(path + ": missing column '" + name + "'");
    return c;
}

inline void check_record(const WeatherRecord& r, std::size_t row) {
    auto bad = [&](const std::string& what) {
        throw ValidationError("row " + std::to_string(row) + ": " + what);
    };
    if (r.ghi < 0) bad("negative ghi " + format_double(r.ghi));
    if (r.dni < 0) bad("negative dni " + format_double(r.dni));
    if (r.dhi < 0) bad("negative dhi " + format_double(r.dhi));
    if (r.wind_10m < 0) bad("negative wind speed " + format_double(r.wind_10m));
    if (r.t_ambient < -60.0 || r.t_ambient > 70.0)
        bad("ambient temperature out of range " + format_double(r.t_ambient));
}

inline void check_cadence(long long prev, long long cur, std::size_t row) {
    if (cur <= prev)
        throw SequenceError("row " + std::to_string(row) + ": timestamp not increasing");
    if (cur != prev + 1)
        throw SequenceError("row " + std::to_string(row) + ": gap in hourly cadence");
}

} // namespace detail

// Missing-data policy is reject, not interpolate: any schema, ordering or
// value problem aborts the load with the offending row index.
inline WeatherSeries load_weather_csv(const std::filesystem::path& path,
                                      const WeatherColumns& cols = {},
                                      const Site& site = {}) {
    CsvTable t = read_csv(path);
    const std::string p = path.string();
    int c_ts = detail::require_column(t, cols.timestamp, p);
    int c_ghi = detail::require_column(t, cols.ghi, p);
    int c_dni = detail::require_column(t, cols.dni, p);
    int c_dhi = detail::require_column(t, cols.dhi, p);
    int c_temp = detail::require_column(t, cols.temp, p);
    int c_wind = detail::require_column(t, cols.wind, p);

    WeatherSeries series;
    series.site = site;
    series.records.reserve(t.rows.size());
    long long prev = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& cells = t.rows[i];
        if (cells.size() != t.header.size())
            throw SchemaError(p + ": row " + std::to_string(i) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(t.header.size()));
        std::string where = "row " + std::to_string(i);
        WeatherRecord r;
        r.timestamp = HourStamp::parse(cells[c_ts], where);
        r.ghi = parse_double(cells[c_ghi], where + " ghi");
        r.dni = parse_double(cells[c_dni], where + " dni");
        r.dhi = parse_double(cells[c_dhi], where + " dhi");
        r.t_ambient = parse_double(cells[c_temp], where + " temp");
        r.wind_10m = parse_double(cells[c_wind], where + " wind");
        detail::check_record(r, i);
        long long h = r.timestamp.serial_hours();
        if (i > 0) detail::check_cadence(prev, h, i);
        prev = h;
        series.records.push_back(r);
    }
    if (series.records.empty()) throw ValidationError(p + ": no data rows");
    return series;
}

inline LoadSeries load_load_csv(const std::filesystem::path& path) {
    CsvTable t = read_csv(path);
    const std::string p = path.string();
    int c_ts = detail::require_column(t, "timestamp", p);
    int c_mw = detail::require_column(t, "demand_mw", p);
    LoadSeries series;
    long long prev = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        std::string where = "row " + std::to_string(i);
        LoadRecord r;
        r.timestamp = HourStamp::parse(t.rows[i][c_ts], where);
        r.demand_mw = parse_double(t.rows[i][c_mw], where + " demand");
        if (r.demand_mw < 0)
            throw ValidationError(where + ": negative demand " + format_double(r.demand_mw));
        long long h = r.timestamp.serial_hours();
        if (i > 0) detail::check_cadence(prev, h, i);
        prev = h;
        series.records.push_back(r);
    }
    if (series.records.empty()) throw ValidationError(p + ": no data rows");
    return series;
}

inline void write_weather_csv(const WeatherSeries& series, const std::filesystem::path& path) {
    CsvWriter w(path);
    w.raw_row({"timestamp", "ghi_wm2", "dni_wm2", "dhi_wm2", "temp_c", "wind10m_ms"});
    for (const auto& r : series.records)
        w.row({r.ghi, r.dni, r.dhi, r.t_ambient, r.wind_10m}, r.timestamp.to_string());
}

// Power-law vertical extrapolation of the measured wind speed.
inline double shear_to_hub(double wind_10m, double h_meas, double h_hub, double alpha_shear) {
    if (h_meas <= 0.0 || h_hub <= 0.0) throw DomainError("heights must be positive");
    if (alpha_shear < 0.0 || alpha_shear > 1.0) throw DomainError("shear exponent outside [0,1]");
    return wind_10m * std::pow(h_hub / h_meas, alpha_shear);
}

struct ClearSkyProfile {
    double peak_ghi = 950.0;     // W/m^2 at solar noon
    double sunrise_hour = 6.0;
    double sunset_hour = 18.0;
    double diffuse_fraction = 0.2;
    double temp_mean_c = 20.0;
    double temp_amplitude_c = 8.0;
};

struct WeibullParams {
    double k = 2.0;  // shape
    double c = 8.0;  // scale m/s
};

// Deterministic stand-in for a measured weather year: half-sine daytime
// irradiance, sinusoidal daily temperature, i.i.d. Weibull hourly wind.
inline WeatherSeries synth_weather(int days, const ClearSkyProfile& sky,
                                   const WeibullParams& weibull, std::uint64_t seed,
                                   HourStamp start = {2021, 1, 1, 0}, const Site& site = {}) {
    if (days < 1) throw DomainError("days must be >= 1");
    if (weibull.k <= 0.0 || weibull.c <= 0.0) throw DomainError("Weibull parameters must be positive");
    std::mt19937_64 rng(seed);
    WeatherSeries series;
    series.site = site;
    series.records.reserve(static_cast<std::size_t>(days) * 24);
    HourStamp ts = start;
    const double pi = 3.14159265358979323846;
    for (int d = 0; d < days; ++d) {
        for (int h = 0; h < 24; ++h) {
            WeatherRecord r;
            r.timestamp = ts;
            double frac = (h - sky.sunrise_hour) / (sky.sunset_hour - sky.sunrise_hour);
            double sun = (frac > 0.0 && frac < 1.0) ? std::sin(pi * frac) : 0.0;
            r.ghi = sky.peak_ghi * sun;
            r.dhi = sky.diffuse_fraction * r.ghi;
            r.dni = r.ghi - r.dhi;
            r.t_ambient = sky.temp_mean_c + sky.temp_amplitude_c * std::sin(2.0 * pi * (h - 9.0) / 24.0);
            double u = detail::uniform01(rng);
            r.wind_10m = weibull.c * std::pow(-std::log(1.0 - u), 1.0 / weibull.k);
            series.records.push_back(r);
            ts = ts.plus_hours(1);
        }
    }
    return series;
}

// Peak-shaped synthetic demand: base at night, afternoon/evening bulge.
inline LoadSeries synth_load(int days, double base_mw, double peak_mw, std::uint64_t seed,
                             HourStamp start = {2021, 1, 1, 0}) {
    if (days < 1) throw DomainError("days must be >= 1");
    if (base_mw < 0.0 || peak_mw < base_mw) throw DomainError("need 0 <= base <= peak");
    std::mt19937_64 rng(seed);
    LoadSeries series;
    HourStamp ts = start;
    const double pi = 3.14159265358979323846;
    for (int d = 0; d < days; ++d) {
        for (int h = 0; h < 24; ++h) {
            double shape = (h >= 12 && h <= 22) ? std::sin(pi * (h - 12.0) / 10.0) : 0.0;
            double jitter = 1.0 + 0.05 * (2.0 * detail::uniform01(rng) - 1.0);
            series.records.push_back({ts, (base_mw + (peak_mw - base_mw) * shape) * jitter});
            ts = ts.plus_hours(1);
        }
    }
    return series;
}

struct MonthlySummary {
    int year = 0;
    int month = 0;
    double ghi_mean = 0, ghi_max = 0;
    double dni_mean = 0, dni_max = 0;
    double dhi_mean = 0, dhi_max = 0;
    double temp_mean = 0, temp_max = 0;
    double wind_mean = 0, wind_max = 0;
    std::size_t hours = 0;
};

inline std::vector<MonthlySummary> monthly_aggregate(const WeatherSeries& series) {
    if (series.records.empty()) throw ValidationError("empty series");
    std::map<std::pair<int, int>, MonthlySummary> acc;
    for (const auto& r : series.records) {
        auto& m = acc[{r.timestamp.year, r.timestamp.month}];
        m.year = r.timestamp.year;
        m.month = r.timestamp.month;
        m.ghi_mean += r.ghi;
        m.dni_mean += r.dni;
        m.dhi_mean += r.dhi;
        m.temp_mean += r.t_ambient;
        m.wind_mean += r.wind_10m;
        m.ghi_max = std::max(m.ghi_max, r.ghi);
        m.dni_max = std::max(m.dni_max, r.dni);
        m.dhi_max = std::max(m.dhi_max, r.dhi);
        m.temp_max = m.hours == 0 ? r.t_ambient : std::max(m.temp_max, r.t_ambient);
        m.wind_max = std::max(m.wind_max, r.wind_10m);
        m.hours += 1;
    }
    std::vector<MonthlySummary> out;
    for (auto& [key, m] : acc) {
        double n = static_cast<double>(m.hours);
        m.ghi_mean /= n;
        m.dni_mean /= n;
        m.dhi_mean /= n;
        m.temp_mean /= n;
        m.wind_mean /= n;
        out.push_back(m);
    }
    return out;
}

} // namespace hybridplant

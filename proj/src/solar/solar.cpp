#include "shadowacc/solar/solar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shadowacc/error.hpp"

namespace shadowacc::solar {
namespace {

using namespace std::chrono;

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kMaxLatitude = 65.0;

double wrap360(double deg) {
    double r = std::fmod(deg, 360.0);
    return r < 0.0 ? r + 360.0 : r;
}

double julian_day(Instant t) {
    return static_cast<double>(t.time_since_epoch().count()) / 86400.0 + 2440587.5;
}

struct SolarTerms {
    double declination_deg;
    double equation_of_time_min;
};

// NOAA solar calculator (Meeus-based) terms for a Julian century.
SolarTerms solar_terms(double jd) {
    const double t = (jd - 2451545.0) / 36525.0;
    const double mean_long = wrap360(280.46646 + t * (36000.76983 + t * 0.0003032));
    const double mean_anom = 357.52911 + t * (35999.05029 - 0.0001537 * t);
    const double ecc = 0.016708634 - t * (0.000042037 + 0.0000001267 * t);
    const double m = mean_anom * kDeg;
    const double center = std::sin(m) * (1.914602 - t * (0.004817 + 0.000014 * t)) +
                          std::sin(2 * m) * (0.019993 - 0.000101 * t) + std::sin(3 * m) * 0.000289;
    const double true_long = mean_long + center;
    const double omega = (125.04 - 1934.136 * t) * kDeg;
    const double app_long = true_long - 0.00569 - 0.00478 * std::sin(omega);
    const double mean_obliq =
        23.0 + (26.0 + (21.448 - t * (46.815 + t * (0.00059 - t * 0.001813))) / 60.0) / 60.0;
    const double obliq = (mean_obliq + 0.00256 * std::cos(omega)) * kDeg;

    const double decl = std::asin(std::sin(obliq) * std::sin(app_long * kDeg));

    const double y = std::tan(obliq / 2) * std::tan(obliq / 2);
    const double l0 = mean_long * kDeg;
    const double eot = y * std::sin(2 * l0) - 2 * ecc * std::sin(m) + 4 * ecc * y * std::sin(m) * std::cos(2 * l0) -
                       0.5 * y * y * std::sin(4 * l0) - 1.25 * ecc * ecc * std::sin(2 * m);
    return {decl / kDeg, 4.0 * eot / kDeg};
}

}  // namespace

Season season(SeasonKind kind) {
    switch (kind) {
        case SeasonKind::SummerSolstice: return {kind, June / 21, 720};
        case SeasonKind::MarchEquinox: return {kind, March / 20, 540};
        case SeasonKind::WinterSolstice: return {kind, December / 21, 360};
    }
    throw InvalidArgument("unknown season");
}

std::string_view season_slug(SeasonKind kind) {
    switch (kind) {
        case SeasonKind::SummerSolstice: return "summer";
        case SeasonKind::MarchEquinox: return "equinox";
        case SeasonKind::WinterSolstice: return "winter";
    }
    return "unknown";
}

std::optional<SeasonKind> parse_season(std::string_view text) {
    for (auto k : kAllSeasons) {
        if (season_slug(k) == text) return k;
    }
    if (text == "spring" || text == "march") return SeasonKind::MarchEquinox;
    return std::nullopt;
}

year_month_day effective_date(SeasonKind kind, double latitude_deg, int year) {
    if (latitude_deg < 0.0) {
        if (kind == SeasonKind::SummerSolstice) kind = SeasonKind::WinterSolstice;
        else if (kind == SeasonKind::WinterSolstice) kind = SeasonKind::SummerSolstice;
    }
    const auto md = season(kind).canonical_date;
    return std::chrono::year{year} / md;
}

double solar_declination(year_month_day date) {
    const Instant noon_utc = sys_days{date} + hours{12};
    return solar_terms(julian_day(noon_utc)).declination_deg;
}

SunPosition sun_position(double latitude_deg, double longitude_deg, Instant utc) {
    const SolarTerms terms = solar_terms(julian_day(utc));
    const auto day = floor<days>(utc);
    const double minutes_utc = static_cast<double>((utc - day).count()) / 60.0;
    const double true_solar_min = minutes_utc + terms.equation_of_time_min + 4.0 * longitude_deg;
    double hour_angle = true_solar_min / 4.0 - 180.0;
    hour_angle = std::remainder(hour_angle, 360.0);

    const double lat = latitude_deg * kDeg;
    const double decl = terms.declination_deg * kDeg;
    const double h = hour_angle * kDeg;

    // Local east/north/up components of the unit vector toward the sun.
    const double east = -std::cos(decl) * std::sin(h);
    const double north = std::sin(decl) * std::cos(lat) - std::cos(decl) * std::sin(lat) * std::cos(h);
    const double up = std::sin(decl) * std::sin(lat) + std::cos(decl) * std::cos(lat) * std::cos(h);

    SunPosition pos;
    pos.elevation_deg = std::asin(std::clamp(up, -1.0, 1.0)) / kDeg;
    pos.azimuth_deg = wrap360(std::atan2(east, north) / kDeg);
    if (pos.azimuth_deg >= 360.0) pos.azimuth_deg = 0.0;
    return pos;
}

Instant solar_noon(year_month_day date, double longitude_deg) {
    const sys_days day{date};
    double noon_min = 720.0 - 4.0 * longitude_deg;
    for (int iter = 0; iter < 3; ++iter) {
        const double jd = julian_day(day) + noon_min / 1440.0;
        noon_min = 720.0 - 4.0 * longitude_deg - solar_terms(jd).equation_of_time_min;
    }
    return day + seconds{std::llround(noon_min * 60.0)};
}

AccumulationWindow accumulation_window(SeasonKind kind, double latitude_deg, double longitude_deg, int year) {
    if (!(std::abs(latitude_deg) <= kMaxLatitude)) {
        throw PolarWindowError("latitude " + std::to_string(latitude_deg) + " outside supported range [-65, 65]");
    }
    AccumulationWindow w;
    w.season = season(kind);
    w.latitude_deg = latitude_deg;
    w.longitude_deg = longitude_deg;

    const int n = w.season.window_minutes;
    const Instant noon = solar_noon(effective_date(kind, latitude_deg, year), longitude_deg);
    // Offsets of (k - (n-1)/2) minutes; n is even so every offset is a whole
    // multiple of 30 s.
    const Instant start = noon - seconds{(n - 1) * 30};
    w.instants.reserve(n);
    w.positions.reserve(n);
    for (int k = 0; k < n; ++k) {
        const Instant t = start + minutes{k};
        const SunPosition p = sun_position(latitude_deg, longitude_deg, t);
        if (!(p.elevation_deg > 0.0)) {
            throw PolarWindowError(std::string(season_slug(kind)) + " window at latitude " +
                                   std::to_string(latitude_deg) + " reaches sun elevation " +
                                   std::to_string(p.elevation_deg) + " deg");
        }
        w.instants.push_back(t);
        w.positions.push_back(p);
    }
    return w;
}

}  // namespace shadowacc::solar

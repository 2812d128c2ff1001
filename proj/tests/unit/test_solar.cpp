#include <doctest.h>

#include <cmath>

#include "shadowacc/error.hpp"
#include "shadowacc/solar/solar.hpp"

using namespace shadowacc;
using namespace shadowacc::solar;
using namespace std::chrono;

namespace {
constexpr double kDeg = 3.14159265358979323846 / 180.0;

// Elevation from declination and hour angle, spherical astronomy textbook form.
double textbook_elevation(double lat, double decl, double hour_angle_deg) {
    const double s = std::sin(lat * kDeg) * std::sin(decl * kDeg) +
                     std::cos(lat * kDeg) * std::cos(decl * kDeg) * std::cos(hour_angle_deg * kDeg);
    return std::asin(s) / kDeg;
}
}  // namespace

TEST_SUITE("solar") {

TEST_CASE("declination at the canonical dates") {
    CHECK(std::abs(solar_declination(2024y / June / 21) - 23.44) < 0.05);
    CHECK(std::abs(solar_declination(2024y / December / 21) + 23.44) < 0.05);
    CHECK(std::abs(solar_declination(2024y / March / 20)) < 0.5);
}

TEST_CASE("noon elevation in New York at the winter solstice") {
    const auto date = effective_date(SeasonKind::WinterSolstice, 40.7128);
    const auto noon = solar_noon(date, -74.006);
    const auto sun = sun_position(40.7128, -74.006, noon);
    CHECK(std::abs(sun.elevation_deg - 25.9) < 0.5);
    // Sun due south at noon in the northern hemisphere.
    CHECK(std::abs(sun.azimuth_deg - 180.0) < 0.5);
}

TEST_CASE("noon elevation matches 90 - |lat - decl|") {
    for (double lat : {-40.0, -10.0, 0.0, 25.0, 52.0}) {
        for (auto kind : kAllSeasons) {
            const auto date = effective_date(kind, lat);
            const double decl = solar_declination(date);
            const auto sun = sun_position(lat, 13.4, solar_noon(date, 13.4));
            CHECK(std::abs(sun.elevation_deg - (90.0 - std::abs(lat - decl))) < 0.1);
        }
    }
}

TEST_CASE("elevation away from noon agrees with the hour-angle formula") {
    const double lat = 48.85, lon = 2.35;
    const auto date = effective_date(SeasonKind::MarchEquinox, lat);
    const auto noon = solar_noon(date, lon);
    const double decl = solar_declination(date);
    for (int minutes : {-240, -90, 60, 200}) {
        const auto sun = sun_position(lat, lon, noon + std::chrono::minutes(minutes));
        // Declination drifts about 0.4 degrees per day near the equinox.
        CHECK(std::abs(sun.elevation_deg - textbook_elevation(lat, decl, minutes * 0.25)) < 0.3);
    }
}

TEST_CASE("morning sun is east, afternoon sun is west") {
    const auto date = effective_date(SeasonKind::MarchEquinox, 40.0);
    const auto noon = solar_noon(date, -74.0);
    const auto am = sun_position(40.0, -74.0, noon - hours(3));
    const auto pm = sun_position(40.0, -74.0, noon + hours(3));
    CHECK(am.azimuth_deg > 90.0);
    CHECK(am.azimuth_deg < 180.0);
    CHECK(pm.azimuth_deg > 180.0);
    CHECK(pm.azimuth_deg < 270.0);
}

TEST_CASE("window has one instant per minute, symmetric about noon") {
    for (auto kind : kAllSeasons) {
        const auto w = accumulation_window(kind, 40.71, -74.0);
        REQUIRE(static_cast<int>(w.instants.size()) == season(kind).window_minutes);
        REQUIRE(w.positions.size() == w.instants.size());
        for (std::size_t i = 1; i < w.instants.size(); ++i) CHECK(w.instants[i] - w.instants[i - 1] == seconds(60));
        const auto noon = solar_noon(effective_date(kind, 40.71), -74.0);
        CHECK(noon - w.instants.front() == w.instants.back() - noon);
        for (const auto& p : w.positions) CHECK(p.elevation_deg > 0.0);
    }
    CHECK(season(SeasonKind::SummerSolstice).window_minutes == 720);
    CHECK(season(SeasonKind::MarchEquinox).window_minutes == 540);
    CHECK(season(SeasonKind::WinterSolstice).window_minutes == 360);
}

TEST_CASE("southern hemisphere swaps the solstice dates") {
    CHECK(effective_date(SeasonKind::SummerSolstice, -33.9) == 2024y / December / 21);
    CHECK(effective_date(SeasonKind::WinterSolstice, -33.9) == 2024y / June / 21);
    CHECK(effective_date(SeasonKind::SummerSolstice, 33.9) == 2024y / June / 21);
    CHECK_NOTHROW(accumulation_window(SeasonKind::SummerSolstice, -33.0, 151.2));
    CHECK_NOTHROW(accumulation_window(SeasonKind::WinterSolstice, 0.0, 0.0));
}

TEST_CASE("polar windows are rejected") {
    CHECK_THROWS_AS(accumulation_window(SeasonKind::SummerSolstice, 66.0, 0.0), PolarWindowError);
    CHECK_THROWS_AS(accumulation_window(SeasonKind::WinterSolstice, 60.0, 0.0), PolarWindowError);
    CHECK_THROWS_AS(accumulation_window(SeasonKind::SummerSolstice, -70.0, 0.0), PolarWindowError);
    CHECK_NOTHROW(accumulation_window(SeasonKind::WinterSolstice, 55.0, 0.0));
}

TEST_CASE("sun_position is pure") {
    const Instant t = sys_days{2024y / July / 4} + hours(15);
    CHECK(sun_position(10.0, 20.0, t) == sun_position(10.0, 20.0, t));
}

TEST_CASE("season slugs round-trip") {
    for (auto k : kAllSeasons) CHECK(parse_season(season_slug(k)) == k);
    CHECK(parse_season("spring") == SeasonKind::MarchEquinox);
    CHECK_FALSE(parse_season("autumn").has_value());
}

}

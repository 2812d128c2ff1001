#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shadowacc::solar {

using Instant = std::chrono::sys_seconds;

struct SunPosition {
    double azimuth_deg = 0.0;    ///< clockwise from true north, [0, 360)
    double elevation_deg = 0.0;  ///< above the horizontal plane, [-90, 90]

    friend bool operator==(const SunPosition&, const SunPosition&) = default;
};

enum class SeasonKind { SummerSolstice, MarchEquinox, WinterSolstice };

inline constexpr std::array<SeasonKind, 3> kAllSeasons = {
    SeasonKind::SummerSolstice, SeasonKind::MarchEquinox, SeasonKind::WinterSolstice};

/// Year used for every seasonal window unless a caller asks otherwise.
inline constexpr int kReferenceYear = 2024;

struct Season {
    SeasonKind kind;
    std::chrono::month_day canonical_date;  ///< Northern-Hemisphere calendar date
    int window_minutes;
};

Season season(SeasonKind kind);

/// Short path/CLI slug: "summer", "equinox", "winter".
std::string_view season_slug(SeasonKind kind);
std::optional<SeasonKind> parse_season(std::string_view text);

/// Calendar date the window is evaluated on at `latitude_deg`. South of the
/// equator the solstice dates swap so that "summer" is always the local
/// long-day solstice.
std::chrono::year_month_day effective_date(SeasonKind kind, double latitude_deg, int year = kReferenceYear);

/// Solar declination at 12:00 UTC on `date`, degrees.
double solar_declination(std::chrono::year_month_day date);

/// Apparent sun position (no refraction) using the NOAA solar calculator
/// formulation. Pure and deterministic.
SunPosition sun_position(double latitude_deg, double longitude_deg, Instant utc);

/// UTC instant of local solar noon on `date` at `longitude_deg`.
Instant solar_noon(std::chrono::year_month_day date, double longitude_deg);

struct AccumulationWindow {
    Season season;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    std::vector<Instant> instants;
    std::vector<SunPosition> positions;

    int minutes() const noexcept { return season.window_minutes; }
};

/// Fixed-duration per-minute window centered on local solar noon. The
/// instants sit at half-minute offsets from noon so the schedule is exactly
/// symmetric. Throws PolarWindowError when any instant would have the sun at
/// or below the horizon, or when |latitude| > 65.
AccumulationWindow accumulation_window(SeasonKind kind, double latitude_deg, double longitude_deg,
                                       int year = kReferenceYear);

}  // namespace shadowacc::solar

#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shadowacc/tiles/web_mercator.hpp"

namespace shadowacc::tiles {

inline constexpr double kMaxBuildingHeight = 500.0;
inline constexpr double kMetersPerLevel = 3.0;

using Ring = std::vector<LonLat>;

/// Extruded building prism. rings[0] is the outer boundary, the rest are
/// holes; every ring is closed (first == last).
struct BuildingFootprint {
    std::vector<Ring> rings;
    double height_m = 0.0;
    std::string source_id;
};

GeoBox footprint_bounds(const BuildingFootprint& f);

/// Returns a description of the first geometric defect, or nullopt when the
/// rings are closed, finite, have at least three distinct vertices and no
/// ring crosses itself.
std::optional<std::string> geometry_defect(const std::vector<Ring>& rings);

/// Height resolution: an explicit height tag wins, else levels x 3 m.
/// Accepts numbers or strings such as "12", "12.5 m".
std::optional<double> parse_height_tag(const nlohmann::json& value);
std::optional<double> parse_levels_tag(const nlohmann::json& value);

/// Clips every ring to `box` (Sutherland-Hodgman). Returns nullopt when the
/// outer ring vanishes.
std::optional<BuildingFootprint> clip_to_box(const BuildingFootprint& f, const GeoBox& box);

struct FootprintSource {
    enum class Kind { LocalFile, Http };
    Kind kind = Kind::LocalFile;
    std::string location;  ///< file path, or an Overpass-style endpoint URL
    double max_requests_per_second = 1.0;
    std::chrono::seconds timeout{60};

    /// "http://..." / "https://..." selects Http, anything else is a path.
    static FootprintSource parse(std::string_view descriptor);
};

struct FetchResult {
    std::vector<BuildingFootprint> footprints;
    int dropped_without_height = 0;
    int dropped_invalid = 0;
    int clamped = 0;
    std::vector<std::string> warnings;
};

/// Loads footprints intersecting `bbox`, clipped to it. Heights > 500 m are
/// clamped with a warning; records with neither height nor levels are
/// dropped and counted. Throws SourceUnavailable or ParseError (the message
/// names the offending record id).
FetchResult fetch_footprints(const GeoBox& bbox, const FootprintSource& source);

/// Parses one GeoJSON Polygon feature (as used by the local NDJSON source
/// and the what-if API). Height resolution follows parse_height_tag /
/// parse_levels_tag, also honouring a `height_m` property. Throws ParseError
/// on structural problems; the returned footprint's height is 0 when no
/// height could be derived.
BuildingFootprint footprint_from_feature(const nlohmann::json& feature, const std::string& fallback_id);

/// Parses an Overpass `out geom` JSON response.
FetchResult parse_overpass_response(std::string_view body, const GeoBox& bbox);

nlohmann::json footprint_to_feature(const BuildingFootprint& f);
void write_footprints_ndjson(const std::filesystem::path& path, const std::vector<BuildingFootprint>& footprints);
std::vector<BuildingFootprint> read_footprints_ndjson(const std::filesystem::path& path);

}  // namespace shadowacc::tiles

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shadowacc/raster.hpp"
#include "shadowacc/solar/solar.hpp"
#include "shadowacc/tiles/footprint.hpp"

namespace shadowacc::analysis {

enum class SunlightCategory { HighAccess, ModerateAccess, PartiallyShadowed, Overshadowed };
inline constexpr int kCategoryCount = 4;

std::string_view category_name(SunlightCategory c);

/// [0, 0.25) High, [0.25, 0.50] Moderate, (0.50, 0.75] Partially, (0.75, 1]
/// Overshadowed. Throws OutOfRange outside [0, 1].
SunlightCategory classify(double mean_fraction);

/// A polygon (with holes) or a polyline, possibly multi-part.
struct Geometry {
    enum class Kind { Polygon, Line };
    std::string id;
    Kind kind = Kind::Polygon;
    std::vector<std::vector<tiles::Ring>> polygons;  ///< each: outer ring then holes
    std::vector<std::vector<tiles::LonLat>> lines;
    std::optional<std::string> group;  ///< e.g. the `landuse` property
};

/// Polygon, MultiPolygon, LineString and MultiLineString features. The id
/// comes from the feature id, then properties.id, then `fallback_id`.
Geometry geometry_from_feature(const nlohmann::json& feature, const std::string& fallback_id);
std::vector<Geometry> geometries_from_collection(const nlohmann::json& collection);

/// 8-bit shadow tile for a coordinate, or nullopt when not computed.
using ShadowLookup = std::function<std::optional<Raster<std::uint8_t>>(const tiles::TileCoord&)>;

struct GeometryAggregate {
    std::string geometry_id;
    solar::SeasonKind season = solar::SeasonKind::SummerSolstice;
    double mean_fraction = 0.0;
    std::size_t pixel_count = 0;
    SunlightCategory category = SunlightCategory::HighAccess;
    std::optional<std::string> group;
};

/// Mean dequantized fraction over the zoom-level pixels whose centres fall
/// inside the polygon, or within `buffer_m` of the line (measured at the
/// geometry's centroid latitude). Polygons ignore the buffer. Pixels are
/// visited in global row-major order. Throws NoCoverage when a needed tile
/// is missing and EmptyIntersection when no pixel centre qualifies.
GeometryAggregate aggregate_over_geometry(const ShadowLookup& lookup, const Geometry& geometry,
                                          solar::SeasonKind season, double buffer_m,
                                          int zoom = tiles::kDefaultZoom);

struct CategoryShare {
    std::string group;
    std::size_t total = 0;
    std::array<std::size_t, kCategoryCount> counts{};
    std::array<double, kCategoryCount> percent{};
};

/// Per-group category percentages, groups sorted by name. Aggregates
/// without a group go under "".
std::vector<CategoryShare> summarize(const std::vector<GeometryAggregate>& aggregates);

/// after.mean - before.mean. Throws MismatchedGeometry when the two do not
/// describe the same geometry and season.
double whatif_delta(const GeometryAggregate& before, const GeometryAggregate& after);

/// Columns: geometry_id,season,mean,category,group
void write_aggregates_csv(std::ostream& out, const std::vector<GeometryAggregate>& rows);
/// Columns: group,total,high,moderate,partially,overshadowed (percentages)
void write_summary_csv(std::ostream& out, const std::vector<CategoryShare>& rows);

}  // namespace shadowacc::analysis

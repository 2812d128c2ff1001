#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace shadowacc::tiles {

inline constexpr int kTileSize = 256;
inline constexpr int kPaddedSize = 512;
inline constexpr int kPad = (kPaddedSize - kTileSize) / 2;
inline constexpr int kDefaultZoom = 16;
inline constexpr double kEarthCircumference = 40075016.686;  // WGS84 equator, meters
inline constexpr double kMaxMercatorLat = 85.0511287798066;

struct TileCoord {
    int zoom = kDefaultZoom;
    int x = 0;
    int y = 0;

    bool valid() const noexcept;
    TileCoord offset(int dx, int dy) const noexcept { return {zoom, x + dx, y + dy}; }
    std::string to_string() const;

    friend auto operator<=>(const TileCoord&, const TileCoord&) = default;
};

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;
    friend bool operator==(const LonLat&, const LonLat&) = default;
};

/// WGS84 bounding box in degrees.
struct GeoBox {
    double west = 0.0;
    double south = 0.0;
    double east = 0.0;
    double north = 0.0;

    bool degenerate() const noexcept { return !(east > west && north > south); }
    bool contains(LonLat p) const noexcept {
        return p.lon >= west && p.lon <= east && p.lat >= south && p.lat <= north;
    }
    LonLat center() const noexcept { return {(west + east) / 2, (south + north) / 2}; }
};

/// Position in global Web-Mercator pixel space at a zoom level: x grows east,
/// y grows south, one unit per pixel.
struct PixelPoint {
    double x = 0.0;
    double y = 0.0;
};

PixelPoint lonlat_to_pixel(LonLat p, int zoom);
LonLat pixel_to_lonlat(PixelPoint p, int zoom);

/// Tile containing `p` at `zoom`.
TileCoord tile_for(LonLat p, int zoom = kDefaultZoom);
GeoBox tile_bounds(const TileCoord& c);
LonLat tile_center(const TileCoord& c);

/// Ground meters per pixel at `latitude_deg` for `zoom`.
double meters_per_pixel(double latitude_deg, int zoom = kDefaultZoom);
/// Meters per pixel at the tile's center latitude.
double meters_per_pixel(const TileCoord& c);

}  // namespace shadowacc::tiles

template <>
struct std::hash<shadowacc::tiles::TileCoord> {
    std::size_t operator()(const shadowacc::tiles::TileCoord& c) const noexcept {
        std::uint64_t h = static_cast<std::uint32_t>(c.x);
        h = (h << 32) ^ static_cast<std::uint32_t>(c.y);
        h ^= static_cast<std::uint64_t>(c.zoom) * 0x9e3779b97f4a7c15ULL;
        return std::hash<std::uint64_t>{}(h);
    }
};

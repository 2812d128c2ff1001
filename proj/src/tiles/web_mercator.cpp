#include "shadowacc/tiles/web_mercator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shadowacc::tiles {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double world_pixels(int zoom) { return std::ldexp(static_cast<double>(kTileSize), zoom); }

}  // namespace

bool TileCoord::valid() const noexcept {
    if (zoom < 0 || zoom > 30) return false;
    const long long n = 1LL << zoom;
    return x >= 0 && y >= 0 && x < n && y < n;
}

std::string TileCoord::to_string() const {
    return std::to_string(zoom) + "/" + std::to_string(x) + "/" + std::to_string(y);
}

PixelPoint lonlat_to_pixel(LonLat p, int zoom) {
    const double size = world_pixels(zoom);
    const double lat = std::clamp(p.lat, -kMaxMercatorLat, kMaxMercatorLat) * kDeg;
    const double x = (p.lon + 180.0) / 360.0 * size;
    const double y = (1.0 - std::asinh(std::tan(lat)) / std::numbers::pi) / 2.0 * size;
    return {x, y};
}

LonLat pixel_to_lonlat(PixelPoint p, int zoom) {
    const double size = world_pixels(zoom);
    const double lon = p.x / size * 360.0 - 180.0;
    const double lat = std::atan(std::sinh(std::numbers::pi * (1.0 - 2.0 * p.y / size))) / kDeg;
    return {lon, lat};
}

TileCoord tile_for(LonLat p, int zoom) {
    const PixelPoint px = lonlat_to_pixel(p, zoom);
    const int n = 1 << zoom;
    const int x = std::clamp(static_cast<int>(std::floor(px.x / kTileSize)), 0, n - 1);
    const int y = std::clamp(static_cast<int>(std::floor(px.y / kTileSize)), 0, n - 1);
    return {zoom, x, y};
}

GeoBox tile_bounds(const TileCoord& c) {
    const LonLat nw = pixel_to_lonlat({double(c.x) * kTileSize, double(c.y) * kTileSize}, c.zoom);
    const LonLat se = pixel_to_lonlat({double(c.x + 1) * kTileSize, double(c.y + 1) * kTileSize}, c.zoom);
    return {nw.lon, se.lat, se.lon, nw.lat};
}

LonLat tile_center(const TileCoord& c) {
    return pixel_to_lonlat({(c.x + 0.5) * kTileSize, (c.y + 0.5) * kTileSize}, c.zoom);
}

double meters_per_pixel(double latitude_deg, int zoom) {
    return kEarthCircumference * std::cos(latitude_deg * kDeg) / world_pixels(zoom);
}

double meters_per_pixel(const TileCoord& c) { return meters_per_pixel(tile_center(c).lat, c.zoom); }

}  // namespace shadowacc::tiles

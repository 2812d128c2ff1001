#pragma once

#include <cstdint>
#include <span>

#include "shadowacc/raster.hpp"
#include "shadowacc/tiles/footprint.hpp"
#include "shadowacc/tiles/height_tile.hpp"

namespace shadowacc::tiles {

/// Supersampling factor per pixel axis (4 x 4 = 16 samples).
inline constexpr int kSamplesPerAxis = 4;

/// Rasterizes footprints onto an arbitrary window of global pixel space at
/// `zoom`, whose north-west corner is global pixel (origin_x, origin_y).
/// Each pixel is the mean over its 16 sample points of the covering
/// building's height (0 where uncovered; the tallest wins where footprints
/// overlap).
Raster<float> rasterize_window(std::span<const BuildingFootprint> footprints, int zoom, std::int64_t origin_x,
                               std::int64_t origin_y, int rows, int cols);

HeightTile rasterize(std::span<const BuildingFootprint> footprints, const TileCoord& coord);

}  // namespace shadowacc::tiles

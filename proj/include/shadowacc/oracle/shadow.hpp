#pragma once

#include <cstdint>
#include <optional>

#include "shadowacc/oracle/march.hpp"
#include "shadowacc/raster.hpp"
#include "shadowacc/solar/solar.hpp"
#include "shadowacc/tiles/height_tile.hpp"

namespace shadowacc::oracle {

/// Accumulated shadow for one tile and season. The per-pixel count of
/// shadowed minutes is kept exactly; the fraction is count / window_minutes.
struct ShadowTile {
    tiles::TileCoord coord;
    solar::SeasonKind season = solar::SeasonKind::SummerSolstice;
    int window_minutes = 0;
    Raster<std::uint16_t> counts;

    double fraction(int row, int col) const { return double(counts(row, col)) / window_minutes; }
    Raster<double> fractions() const;
};

/// 8-bit storage code: round(255 * count / minutes), exact integer rounding.
std::uint8_t quantize_fraction(std::uint16_t count, int window_minutes) noexcept;
Raster<std::uint8_t> quantize(const ShadowTile& tile);
Raster<std::uint8_t> quantize_counts(const Raster<std::uint16_t>& counts, int window_minutes);

/// Shadow test for pixel (row, col) of the central 256x256 block: does the
/// ray from the pixel centre at ground level toward `sun` pass below the top
/// of some other column before leaving the 512x512 extent?
bool is_shadowed(const tiles::PaddedHeightTile& field, int row, int col, const solar::SunPosition& sun);

/// Same test on an arbitrary raster at a given ground resolution; (row, col)
/// index the raster directly.
bool is_shadowed(const Raster<float>& heights, double meters_per_pixel, int row, int col,
                 const solar::SunPosition& sun);

struct AccumulateOptions {
    std::optional<KernelKind> kernel;  ///< default_kernel() when empty
};

/// Per-pixel count of window instants in shadow, for the central block.
/// Ground resolution is taken at the tile's centre latitude.
ShadowTile accumulate(const tiles::PaddedHeightTile& field, const solar::AccumulationWindow& window,
                      const AccumulateOptions& options = {});

struct RegionShadow {
    tiles::TileCoord anchor;
    int window_minutes = 0;
    Raster<std::uint16_t> counts;  ///< (H-256) x (W-256)
};

/// Accumulation over a monolithic H x W raster (H, W >= 512). Rays run until
/// they leave the whole raster. The 128-pixel margin only supplies context;
/// output pixel (r, c) is raster pixel (r+128, c+128). `anchor` is the tile
/// whose north-west pixel sits at raster (128, 128); each 256-block of the
/// output uses its own tile's ground resolution, as accumulate() does, and
/// the same `window` throughout.
RegionShadow accumulate_region(const Raster<float>& heights, const tiles::TileCoord& anchor,
                               const solar::AccumulationWindow& window, const AccumulateOptions& options = {});

struct PaddingReport {
    double min_elevation_deg = 0.0;
    double max_shadow_px = 0.0;
    bool sufficient = true;  ///< longest shadow fits inside the 128-pixel pad
};

/// Longest shadow any column in the field can cast during the window,
/// compared against the padding width.
PaddingReport padding_report(const solar::AccumulationWindow& window, double meters_per_pixel, float max_height);

/// Accumulation window for a tile: the season's window at the tile centre.
solar::AccumulationWindow window_for_tile(const tiles::TileCoord& coord, solar::SeasonKind season);

}  // namespace shadowacc::oracle

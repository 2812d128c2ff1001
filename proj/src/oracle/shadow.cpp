#include "shadowacc/oracle/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "shadowacc/error.hpp"

namespace shadowacc::oracle {

using tiles::kPad;
using tiles::kPaddedSize;
using tiles::kTileSize;

Raster<double> ShadowTile::fractions() const {
    Raster<double> out(counts.rows(), counts.cols());
    for (std::size_t i = 0; i < counts.size(); ++i) out.values()[i] = double(counts.values()[i]) / window_minutes;
    return out;
}

std::uint8_t quantize_fraction(std::uint16_t count, int window_minutes) noexcept {
    const long num = 2L * 255 * count + window_minutes;
    return static_cast<std::uint8_t>(std::min(255L, num / (2L * window_minutes)));
}

Raster<std::uint8_t> quantize_counts(const Raster<std::uint16_t>& counts, int window_minutes) {
    if (window_minutes <= 0) throw InvalidArgument("window_minutes must be positive");
    Raster<std::uint8_t> out(counts.rows(), counts.cols());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out.values()[i] = quantize_fraction(counts.values()[i], window_minutes);
    }
    return out;
}

Raster<std::uint8_t> quantize(const ShadowTile& tile) { return quantize_counts(tile.counts, tile.window_minutes); }

bool is_shadowed(const Raster<float>& heights, double meters_per_pixel, int row, int col,
                 const solar::SunPosition& sun) {
    const MarchField field(heights);
    const auto tpl = build_march_template(sun, meters_per_pixel, std::max(field.rows(), field.cols()), field.max_height());
    return shadowed(field, tpl, row, col);
}

bool is_shadowed(const tiles::PaddedHeightTile& field, int row, int col, const solar::SunPosition& sun) {
    if (field.grid.rows() != kPaddedSize || field.grid.cols() != kPaddedSize) {
        throw DimensionError("is_shadowed expects a 512x512 padded tile");
    }
    if (row < 0 || col < 0 || row >= kTileSize || col >= kTileSize) {
        throw DimensionError("is_shadowed: pixel outside the central block");
    }
    return is_shadowed(field.grid, tiles::meters_per_pixel(field.center), row + kPad, col + kPad, sun);
}

ShadowTile accumulate(const tiles::PaddedHeightTile& field, const solar::AccumulationWindow& window,
                      const AccumulateOptions& options) {
    if (field.grid.rows() != kPaddedSize || field.grid.cols() != kPaddedSize) {
        throw DimensionError("accumulate expects a 512x512 padded tile");
    }
    if (static_cast<int>(window.positions.size()) != window.minutes()) {
        throw InvalidArgument("accumulation window is incomplete");
    }
    const KernelKind kernel = options.kernel.value_or(default_kernel());
    const MarchField mf(field.grid);
    const double mpp = tiles::meters_per_pixel(field.center);

    ShadowTile out{field.center, window.season.kind, window.minutes(), Raster<std::uint16_t>(kTileSize, kTileSize, 0)};
    const CountTarget target{kPad, kPad + kTileSize, kPad, kPad + kTileSize, &out.counts, 0, 0};
    for (const auto& sun : window.positions) {
        const auto tpl = build_march_template(sun, mpp, kPaddedSize, mf.max_height());
        accumulate_counts(kernel, mf, tpl, target);
    }
    return out;
}

RegionShadow accumulate_region(const Raster<float>& heights, const tiles::TileCoord& anchor,
                               const solar::AccumulationWindow& window, const AccumulateOptions& options) {
    if (heights.rows() < kPaddedSize || heights.cols() < kPaddedSize) {
        throw DimensionError("accumulate_region needs at least 512x512, got " + std::to_string(heights.rows()) + "x" +
                             std::to_string(heights.cols()));
    }
    if (static_cast<int>(window.positions.size()) != window.minutes()) {
        throw InvalidArgument("accumulation window is incomplete");
    }
    const KernelKind kernel = options.kernel.value_or(default_kernel());
    const MarchField mf(heights);
    const int out_rows = heights.rows() - 2 * kPad;
    const int out_cols = heights.cols() - 2 * kPad;
    RegionShadow out{anchor, window.minutes(), Raster<std::uint16_t>(out_rows, out_cols, 0)};

    const int block_rows = (out_rows + kTileSize - 1) / kTileSize;
    const int block_cols = (out_cols + kTileSize - 1) / kTileSize;
    const int reach = std::max(mf.rows(), mf.cols());

    for (const auto& sun : window.positions) {
        // Ground resolution varies only with tile row.
        for (int br = 0; br < block_rows; ++br) {
            const double mpp = tiles::meters_per_pixel(anchor.offset(0, br));
            const auto tpl = build_march_template(sun, mpp, reach, mf.max_height());
            const int r0 = br * kTileSize;
            const int r1 = std::min(out_rows, r0 + kTileSize);
            for (int bc = 0; bc < block_cols; ++bc) {
                const int c0 = bc * kTileSize;
                const int c1 = std::min(out_cols, c0 + kTileSize);
                accumulate_counts(kernel, mf, tpl, {r0 + kPad, r1 + kPad, c0 + kPad, c1 + kPad, &out.counts, r0, c0});
            }
        }
    }
    return out;
}

PaddingReport padding_report(const solar::AccumulationWindow& window, double meters_per_pixel, float max_height) {
    PaddingReport rep;
    if (window.positions.empty()) return rep;
    rep.min_elevation_deg = std::min_element(window.positions.begin(), window.positions.end(), [](auto& a, auto& b) {
                                return a.elevation_deg < b.elevation_deg;
                            })->elevation_deg;
    const double t = std::tan(rep.min_elevation_deg * std::numbers::pi / 180.0);
    rep.max_shadow_px = max_height > 0.0f ? max_height / (t * meters_per_pixel) : 0.0;
    rep.sufficient = rep.max_shadow_px <= kPad;
    return rep;
}

solar::AccumulationWindow window_for_tile(const tiles::TileCoord& coord, solar::SeasonKind season) {
    const auto c = tiles::tile_center(coord);
    return solar::accumulation_window(season, c.lat, c.lon);
}

}  // namespace shadowacc::oracle

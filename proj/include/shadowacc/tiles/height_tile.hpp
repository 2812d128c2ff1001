#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "shadowacc/raster.hpp"
#include "shadowacc/tiles/web_mercator.hpp"

namespace shadowacc::tiles {

/// 256x256 mean building height per pixel, meters, in [0, 500].
struct HeightTile {
    TileCoord coord;
    Raster<float> grid;

    double mean_height() const;
};

/// 512x512 neighbourhood: the centre tile plus a 128-pixel border taken from
/// the eight adjacent tiles.
struct PaddedHeightTile {
    TileCoord center;
    Raster<float> grid;
};

/// Returns the tile at a coordinate, or nullopt when none exists.
using HeightTileProvider = std::function<std::optional<HeightTile>(const TileCoord&)>;

/// Assembles the padded neighbourhood of `center`. Missing neighbours are
/// all-zero; a missing centre raises MissingCenterTile. Columns wrap at the
/// antimeridian, rows beyond the poles count as missing.
PaddedHeightTile pad(const TileCoord& center, const HeightTileProvider& provider);

/// Rows/cols [128, 384) of a 512x512 raster.
template <typename T>
Raster<T> crop_to_center(const Raster<T>& grid512) {
    if (grid512.rows() != kPaddedSize || grid512.cols() != kPaddedSize) {
        throw DimensionError("crop_to_center expects 512x512, got " + std::to_string(grid512.rows()) + "x" +
                             std::to_string(grid512.cols()));
    }
    return extract(grid512, kPad, kPad, kTileSize, kTileSize);
}

/// 16-bit storage code: round(65535 * h / 500).
std::uint16_t quantize_height(float meters) noexcept;
float dequantize_height(std::uint16_t code) noexcept;
Raster<std::uint16_t> quantize_heights(const Raster<float>& heights);
Raster<float> dequantize_heights(const Raster<std::uint16_t>& codes);

/// The tile as it reads back from storage.
HeightTile storage_roundtrip(const HeightTile& tile);

}  // namespace shadowacc::tiles

#include "shadowacc/tiles/height_tile.hpp"

#include <algorithm>
#include <cmath>

#include "shadowacc/tiles/footprint.hpp"

namespace shadowacc::tiles {

double HeightTile::mean_height() const {
    double sum = 0.0;
    for (float h : grid.values()) sum += h;
    return grid.empty() ? 0.0 : sum / static_cast<double>(grid.size());
}

PaddedHeightTile pad(const TileCoord& center, const HeightTileProvider& provider) {
    auto middle = provider(center);
    if (!middle) throw MissingCenterTile("no height tile at " + center.to_string());
    if (middle->grid.rows() != kTileSize || middle->grid.cols() != kTileSize) {
        throw DimensionError("height tile " + center.to_string() + " is not 256x256");
    }

    PaddedHeightTile out{center, Raster<float>(kPaddedSize, kPaddedSize, 0.0f)};
    const int n = 1 << center.zoom;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            std::optional<HeightTile> tile;
            if (dx == 0 && dy == 0) {
                tile = std::move(middle);
            } else {
                TileCoord nb = center.offset(dx, dy);
                if (nb.y < 0 || nb.y >= n) continue;
                nb.x = ((nb.x % n) + n) % n;
                tile = provider(nb);
                if (!tile) continue;
                if (tile->grid.rows() != kTileSize || tile->grid.cols() != kTileSize) {
                    throw DimensionError("height tile " + nb.to_string() + " is not 256x256");
                }
            }
            // Source window inside the neighbour and destination inside the padded grid.
            const int src_row = dy < 0 ? kTileSize - kPad : 0;
            const int src_col = dx < 0 ? kTileSize - kPad : 0;
            const int rows = dy == 0 ? kTileSize : kPad;
            const int cols = dx == 0 ? kTileSize : kPad;
            const int dst_row = dy < 0 ? 0 : (dy == 0 ? kPad : kPad + kTileSize);
            const int dst_col = dx < 0 ? 0 : (dx == 0 ? kPad : kPad + kTileSize);
            paste(out.grid, extract(tile->grid, src_row, src_col, rows, cols), dst_row, dst_col);
        }
    }
    return out;
}

std::uint16_t quantize_height(float meters) noexcept {
    if (!(meters > 0.0f)) return 0;
    const double h = std::min<double>(meters, kMaxBuildingHeight);
    return static_cast<std::uint16_t>(std::lround(65535.0 * h / kMaxBuildingHeight));
}

float dequantize_height(std::uint16_t code) noexcept {
    return static_cast<float>(static_cast<double>(code) * kMaxBuildingHeight / 65535.0);
}

Raster<std::uint16_t> quantize_heights(const Raster<float>& heights) {
    Raster<std::uint16_t> out(heights.rows(), heights.cols());
    std::transform(heights.values().begin(), heights.values().end(), out.values().begin(), quantize_height);
    return out;
}

Raster<float> dequantize_heights(const Raster<std::uint16_t>& codes) {
    Raster<float> out(codes.rows(), codes.cols());
    std::transform(codes.values().begin(), codes.values().end(), out.values().begin(), dequantize_height);
    return out;
}

HeightTile storage_roundtrip(const HeightTile& tile) {
    return {tile.coord, dequantize_heights(quantize_heights(tile.grid))};
}

}  // namespace shadowacc::tiles

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "shadowacc/raster.hpp"
#include "shadowacc/solar/solar.hpp"
#include "shadowacc/tiles/height_tile.hpp"

namespace shadowacc::tiles {

/// On-disk layout for one city:
///   {root}/footprints.ndjson
///   {root}/heights/{z}/{x}/{y}.png            16-bit heights
///   {root}/padded/{z}/{x}/{y}.png             16-bit 512x512 model inputs
///   {root}/shadows/{season}/{z}/{x}/{y}.png   8-bit shadow fractions
///   {root}/manifest.ndjson
class TileStore {
public:
    explicit TileStore(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const noexcept { return root_; }

    std::filesystem::path footprints_path() const { return root_ / "footprints.ndjson"; }
    std::filesystem::path manifest_path() const { return root_ / "manifest.ndjson"; }

    static std::filesystem::path tile_relpath(const TileCoord& c);
    std::filesystem::path height_path(const TileCoord& c) const;
    std::filesystem::path padded_path(const TileCoord& c) const;
    std::filesystem::path shadow_path(solar::SeasonKind season, const TileCoord& c) const;
    std::filesystem::path shadow_dir(solar::SeasonKind season) const;

    void write_height(const HeightTile& tile) const;
    std::optional<HeightTile> read_height(const TileCoord& c) const;
    std::vector<TileCoord> list_height_tiles(int zoom = kDefaultZoom) const;
    HeightTileProvider height_provider() const;

    void write_padded(const PaddedHeightTile& tile) const;

    void write_shadow(solar::SeasonKind season, const TileCoord& c, const Raster<std::uint8_t>& quantized) const;
    std::optional<Raster<std::uint8_t>> read_shadow(solar::SeasonKind season, const TileCoord& c) const;
    std::vector<TileCoord> list_shadow_tiles(solar::SeasonKind season, int zoom = kDefaultZoom) const;
    std::vector<solar::SeasonKind> available_seasons() const;

private:
    std::filesystem::path root_;
};

/// Enumerates {dir}/{z}/{x}/{y}.png below `dir`, sorted.
std::vector<TileCoord> list_tile_pngs(const std::filesystem::path& dir, int zoom);

}  // namespace shadowacc::tiles

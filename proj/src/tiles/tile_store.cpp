#include "shadowacc/tiles/tile_store.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "shadowacc/tiles/png_io.hpp"

namespace shadowacc::tiles {
namespace fs = std::filesystem;

namespace {

std::optional<int> to_int(const std::string& s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

std::vector<TileCoord> list_tile_pngs(const fs::path& dir, int zoom) {
    std::vector<TileCoord> out;
    const fs::path zdir = dir / std::to_string(zoom);
    std::error_code ec;
    if (!fs::is_directory(zdir, ec)) return out;
    for (const auto& xent : fs::directory_iterator(zdir)) {
        if (!xent.is_directory()) continue;
        auto x = to_int(xent.path().filename().string());
        if (!x) continue;
        for (const auto& yent : fs::directory_iterator(xent.path())) {
            if (yent.path().extension() != ".png") continue;
            auto y = to_int(yent.path().stem().string());
            if (!y) continue;
            out.push_back({zoom, *x, *y});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

fs::path TileStore::tile_relpath(const TileCoord& c) {
    return fs::path(std::to_string(c.zoom)) / std::to_string(c.x) / (std::to_string(c.y) + ".png");
}

fs::path TileStore::height_path(const TileCoord& c) const { return root_ / "heights" / tile_relpath(c); }
fs::path TileStore::padded_path(const TileCoord& c) const { return root_ / "padded" / tile_relpath(c); }
fs::path TileStore::shadow_dir(solar::SeasonKind season) const {
    return root_ / "shadows" / std::string(solar::season_slug(season));
}
fs::path TileStore::shadow_path(solar::SeasonKind season, const TileCoord& c) const {
    return shadow_dir(season) / tile_relpath(c);
}

void TileStore::write_height(const HeightTile& tile) const {
    write_png(height_path(tile.coord), quantize_heights(tile.grid));
}

std::optional<HeightTile> TileStore::read_height(const TileCoord& c) const {
    const fs::path p = height_path(c);
    std::error_code ec;
    if (!fs::exists(p, ec)) return std::nullopt;
    return HeightTile{c, dequantize_heights(read_png16(p))};
}

std::vector<TileCoord> TileStore::list_height_tiles(int zoom) const { return list_tile_pngs(root_ / "heights", zoom); }

HeightTileProvider TileStore::height_provider() const {
    return [store = *this](const TileCoord& c) { return store.read_height(c); };
}

void TileStore::write_padded(const PaddedHeightTile& tile) const {
    write_png(padded_path(tile.center), quantize_heights(tile.grid));
}

void TileStore::write_shadow(solar::SeasonKind season, const TileCoord& c, const Raster<std::uint8_t>& quantized) const {
    write_png(shadow_path(season, c), quantized);
}

std::optional<Raster<std::uint8_t>> TileStore::read_shadow(solar::SeasonKind season, const TileCoord& c) const {
    const fs::path p = shadow_path(season, c);
    std::error_code ec;
    if (!fs::exists(p, ec)) return std::nullopt;
    return read_png8(p);
}

std::vector<TileCoord> TileStore::list_shadow_tiles(solar::SeasonKind season, int zoom) const {
    return list_tile_pngs(shadow_dir(season), zoom);
}

std::vector<solar::SeasonKind> TileStore::available_seasons() const {
    std::vector<solar::SeasonKind> out;
    std::error_code ec;
    for (auto s : solar::kAllSeasons) {
        if (fs::is_directory(shadow_dir(s), ec)) out.push_back(s);
    }
    return out;
}

}  // namespace shadowacc::tiles

#include "shadowacc/service/whatif.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "shadowacc/error.hpp"
#include "shadowacc/parallel.hpp"
#include "shadowacc/tiles/rasterize.hpp"

namespace shadowacc::service {
using nlohmann::json;
using tiles::TileCoord;

Scenario scenario_from_json(const json& body) {
    if (!body.is_object()) throw InvalidArgument("scenario must be a JSON object");
    Scenario s;
    if (body.contains("id") && body["id"].is_string()) s.id = body["id"];
    if (body.contains("removed_ids")) {
        if (!body["removed_ids"].is_array()) throw InvalidArgument("removed_ids must be an array");
        for (const auto& v : body["removed_ids"]) s.removed_ids.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
    if (body.contains("added")) {
        if (!body["added"].is_array()) throw InvalidArgument("added must be an array");
        int i = 0;
        for (const auto& feature : body["added"]) {
            const std::string fallback = "added-" + std::to_string(i++);
            tiles::BuildingFootprint f;
            try {
                f = tiles::footprint_from_feature(feature, fallback);
            } catch (const ParseError& e) {
                throw InvalidFootprint(e.what());
            }
            if (!(f.height_m > 0.0) || !std::isfinite(f.height_m)) {
                throw InvalidFootprint("footprint " + f.source_id + ": height must be positive");
            }
            if (auto defect = tiles::geometry_defect(f.rings)) {
                throw InvalidFootprint("footprint " + f.source_id + ": " + *defect);
            }
            f.height_m = std::min(f.height_m, tiles::kMaxBuildingHeight);
            s.added.push_back(std::move(f));
        }
    }
    return s;
}

std::vector<TileCoord> tiles_touched(const tiles::BuildingFootprint& f, int zoom) {
    const tiles::GeoBox b = tiles::footprint_bounds(f);
    const tiles::PixelPoint nw = tiles::lonlat_to_pixel({b.west, b.north}, zoom);
    const tiles::PixelPoint se = tiles::lonlat_to_pixel({b.east, b.south}, zoom);
    const int n = 1 << zoom;
    const int x0 = std::clamp(static_cast<int>(std::floor(nw.x / tiles::kTileSize)), 0, n - 1);
    const int x1 = std::clamp(static_cast<int>(std::floor(se.x / tiles::kTileSize)), 0, n - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(nw.y / tiles::kTileSize)), 0, n - 1);
    const int y1 = std::clamp(static_cast<int>(std::floor(se.y / tiles::kTileSize)), 0, n - 1);
    std::vector<TileCoord> out;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) out.push_back({zoom, x, y});
    }
    return out;
}

CityModel::CityModel(tiles::TileStore store) : store_(std::move(store)) {
    std::error_code ec;
    if (std::filesystem::exists(store_.footprints_path(), ec)) {
        footprints_ = tiles::read_footprints_ndjson(store_.footprints_path());
    }
    for (std::size_t i = 0; i < footprints_.size(); ++i) by_id_.emplace(footprints_[i].source_id, i);
}

std::vector<TileCoord> CityModel::edited_tiles(const Scenario& scenario) const {
    std::set<TileCoord> edited;
    for (const auto& id : scenario.removed_ids) {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) throw InvalidFootprint("unknown footprint id '" + id + "'");
        for (const auto& t : tiles_touched(footprints_[it->second], zoom_)) edited.insert(t);
    }
    for (const auto& f : scenario.added) {
        for (const auto& t : tiles_touched(f, zoom_)) edited.insert(t);
    }
    return {edited.begin(), edited.end()};
}

std::vector<TileCoord> CityModel::dirty_tiles(const Scenario& scenario) const {
    std::set<TileCoord> dirty;
    for (const auto& t : edited_tiles(scenario)) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                TileCoord n = t.offset(dx, dy);
                const int size = 1 << n.zoom;
                n.x = ((n.x % size) + size) % size;
                if (n.valid()) dirty.insert(n);
            }
        }
    }
    return {dirty.begin(), dirty.end()};
}

WhatIfResult CityModel::run(const Scenario& scenario, solar::SeasonKind season, const WhatIfOptions& options) const {
    WhatIfResult result;
    const auto edited_list = edited_tiles(scenario);
    result.dirty = dirty_tiles(scenario);
    if (static_cast<int>(result.dirty.size()) > options.scenario_cap) {
        throw ScenarioTooLarge("scenario touches " + std::to_string(result.dirty.size()) + " tiles, cap is " +
                               std::to_string(options.scenario_cap));
    }

    // Edited tiles are rebuilt from the footprint set with the edits applied.
    std::set<std::string> removed(scenario.removed_ids.begin(), scenario.removed_ids.end());
    std::vector<tiles::BuildingFootprint> scene;
    for (const auto& f : footprints_) {
        if (!removed.count(f.source_id)) scene.push_back(f);
    }
    scene.insert(scene.end(), scenario.added.begin(), scenario.added.end());

    std::unordered_map<TileCoord, tiles::HeightTile> edited;
    for (const auto& t : edited_list) {
        std::vector<tiles::BuildingFootprint> local;
        for (const auto& f : scene) {
            const auto touched = tiles_touched(f, zoom_);
            if (std::find(touched.begin(), touched.end(), t) != touched.end()) local.push_back(f);
        }
        edited.emplace(t, tiles::storage_roundtrip(tiles::rasterize(local, t)));
    }

    const tiles::HeightTileProvider provider = [&](const TileCoord& c) -> std::optional<tiles::HeightTile> {
        if (auto it = edited.find(c); it != edited.end()) return it->second;
        return store_.read_height(c);
    };

    std::vector<TileCoord> computable;
    for (const auto& t : result.dirty) {
        if (edited.count(t)) {
            computable.push_back(t);
            continue;
        }
        std::error_code ec;
        if (std::filesystem::exists(store_.height_path(t), ec)) computable.push_back(t);
    }

    result.tiles.resize(computable.size());
    const unsigned threads = options.threads ? options.threads : default_thread_count();
    parallel_for(computable.size(), threads, [&](std::size_t i) {
        const auto padded = tiles::pad(computable[i], provider);
        result.tiles[i] = oracle::accumulate(padded, oracle::window_for_tile(computable[i], season), options.accumulate);
    });

    if (!options.geometries.empty()) {
        std::unordered_map<TileCoord, Raster<std::uint8_t>> after;
        for (const auto& t : result.tiles) after.emplace(t.coord, oracle::quantize(t));
        const analysis::ShadowLookup base = [&](const TileCoord& c) { return store_.read_shadow(season, c); };
        const analysis::ShadowLookup edited_lookup = [&](const TileCoord& c) -> std::optional<Raster<std::uint8_t>> {
            if (auto it = after.find(c); it != after.end()) return it->second;
            return store_.read_shadow(season, c);
        };
        for (const auto& g : options.geometries) {
            const double buffer = g.kind == analysis::Geometry::Kind::Line ? options.line_buffer_m : 0.0;
            const auto before = analysis::aggregate_over_geometry(base, g, season, buffer, zoom_);
            const auto after_agg = analysis::aggregate_over_geometry(edited_lookup, g, season, buffer, zoom_);
            analysis::whatif_delta(before, after_agg);
            result.deltas.push_back({g.id, before.mean_fraction, after_agg.mean_fraction});
        }
    }
    return result;
}

}  // namespace shadowacc::service

#include "shadowacc/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "shadowacc/error.hpp"
#include "shadowacc/io_util.hpp"
#include "shadowacc/parallel.hpp"
#include "shadowacc/tiles/png_io.hpp"
#include "shadowacc/tiles/rasterize.hpp"

namespace shadowacc::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

void write_city_meta(const tiles::TileStore& store, const CityMeta& meta) {
    json j = {{"city", meta.name},
              {"zoom", meta.zoom},
              {"bbox", {meta.bbox.west, meta.bbox.south, meta.bbox.east, meta.bbox.north}}};
    write_file_atomic(store.root() / "city.json", j.dump(2) + "\n");
}

CityMeta read_city_meta(const tiles::TileStore& store) {
    const fs::path p = store.root() / "city.json";
    std::error_code ec;
    if (!fs::exists(p, ec)) throw SourceUnavailable("no city.json under " + store.root().string() + "; run ingest");
    const json j = json::parse(read_file(p), nullptr, false);
    try {
        if (j.is_discarded()) throw ParseError(p.string() + ": invalid JSON");
        CityMeta m;
        m.name = j.at("city");
        m.zoom = j.at("zoom");
        const auto& b = j.at("bbox");
        m.bbox = {b.at(0), b.at(1), b.at(2), b.at(3)};
        return m;
    } catch (const json::exception& e) {
        throw ParseError(p.string() + ": " + e.what());
    }
}

std::vector<tiles::TileCoord> tiles_covering(const tiles::GeoBox& box, int zoom) {
    if (box.degenerate()) throw InvalidArgument("degenerate bounding box");
    const auto nw = tiles::lonlat_to_pixel({box.west, box.north}, zoom);
    const auto se = tiles::lonlat_to_pixel({box.east, box.south}, zoom);
    const int n = 1 << zoom;
    const int x0 = std::clamp(static_cast<int>(std::floor(nw.x / tiles::kTileSize)), 0, n - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(nw.y / tiles::kTileSize)), 0, n - 1);
    // An edge lying exactly on a tile boundary does not pull in the next tile.
    const int x1 = std::clamp(static_cast<int>(std::ceil(se.x / tiles::kTileSize)) - 1, x0, n - 1);
    const int y1 = std::clamp(static_cast<int>(std::ceil(se.y / tiles::kTileSize)) - 1, y0, n - 1);
    std::vector<tiles::TileCoord> out;
    for (int x = x0; x <= x1; ++x) {
        for (int y = y0; y <= y1; ++y) out.push_back({zoom, x, y});
    }
    return out;
}

IngestSummary ingest(const tiles::TileStore& store, const std::string& city, const tiles::GeoBox& bbox,
                     const tiles::FootprintSource& source) {
    const tiles::FetchResult r = tiles::fetch_footprints(bbox, source);
    tiles::write_footprints_ndjson(store.footprints_path(), r.footprints);
    write_city_meta(store, {city, bbox, tiles::kDefaultZoom});
    return {r.footprints.size(), r.dropped_without_height, r.dropped_invalid, r.clamped, r.warnings};
}

std::size_t rasterize_city(const tiles::TileStore& store, unsigned threads) {
    const CityMeta meta = read_city_meta(store);
    const auto footprints = tiles::read_footprints_ndjson(store.footprints_path());
    const auto coords = tiles_covering(meta.bbox, meta.zoom);
    parallel_for(coords.size(), threads ? threads : default_thread_count(), [&](std::size_t i) {
        store.write_height(tiles::rasterize(footprints, coords[i]));
    });
    return coords.size();
}

std::size_t accumulate_city(const tiles::TileStore& store, solar::SeasonKind season, unsigned threads,
                            const oracle::AccumulateOptions& options) {
    const auto coords = store.list_height_tiles();
    if (coords.empty()) throw SourceUnavailable("no height tiles under " + store.root().string() + "; run rasterize");
    const auto provider = store.height_provider();
    parallel_for(coords.size(), threads ? threads : default_thread_count(), [&](std::size_t i) {
        const auto padded = tiles::pad(coords[i], provider);
        const auto shadow = oracle::accumulate(padded, oracle::window_for_tile(coords[i], season), options);
        store.write_shadow(season, coords[i], oracle::quantize(shadow));
    });
    return coords.size();
}

std::vector<metrics::EvaluationRow> evaluate_dirs(const fs::path& pred_dir, const fs::path& truth_dir,
                                                  const std::string& city, solar::SeasonKind season,
                                                  const std::optional<fs::path>& mask_dir, int zoom) {
    const auto truth = tiles::list_tile_pngs(truth_dir, zoom);
    std::vector<metrics::EvaluationRow> rows;
    for (const auto& c : truth) {
        const fs::path rel = tiles::TileStore::tile_relpath(c);
        std::error_code ec;
        if (!fs::exists(pred_dir / rel, ec)) continue;
        const auto t = metrics::dequantize(tiles::read_png8(truth_dir / rel));
        const auto p = metrics::dequantize(tiles::read_png8(pred_dir / rel));
        metrics::EvaluationRow row;
        row.city = city;
        row.season = season;
        row.tile = c;
        if (mask_dir) {
            if (!fs::exists(*mask_dir / rel, ec)) continue;
            row.report = metrics::street_masked_report(t, p, tiles::read_png8(*mask_dir / rel));
            row.masked = true;
        } else {
            row.report = metrics::report(t, p);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw NoCoverage("no tiles present in both " + pred_dir.string() + " and " + truth_dir.string());
    return rows;
}

}  // namespace shadowacc::pipeline

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shadowacc/metrics/metrics.hpp"
#include "shadowacc/oracle/shadow.hpp"
#include "shadowacc/tiles/footprint.hpp"
#include "shadowacc/tiles/tile_store.hpp"

namespace shadowacc::pipeline {

/// {root}/city.json: the ingest extent.
struct CityMeta {
    std::string name;
    tiles::GeoBox bbox;
    int zoom = tiles::kDefaultZoom;
};

void write_city_meta(const tiles::TileStore& store, const CityMeta& meta);
CityMeta read_city_meta(const tiles::TileStore& store);

/// Every tile at `zoom` intersecting the box, sorted.
std::vector<tiles::TileCoord> tiles_covering(const tiles::GeoBox& box, int zoom = tiles::kDefaultZoom);

struct IngestSummary {
    std::size_t kept = 0;
    int dropped_without_height = 0;
    int dropped_invalid = 0;
    int clamped = 0;
    std::vector<std::string> warnings;
};

IngestSummary ingest(const tiles::TileStore& store, const std::string& city, const tiles::GeoBox& bbox,
                     const tiles::FootprintSource& source);

/// Rasterizes every tile covering the ingest extent. Returns the tile count.
std::size_t rasterize_city(const tiles::TileStore& store, unsigned threads = 0);

/// Accumulates every stored height tile for one season. Returns the count.
std::size_t accumulate_city(const tiles::TileStore& store, solar::SeasonKind season, unsigned threads = 0,
                            const oracle::AccumulateOptions& options = {});

/// Pairs {dir}/{z}/{x}/{y}.png tiles present in both directories and scores
/// the prediction against the truth. With `mask_dir`, tiles without a mask
/// are skipped and the street-masked report is used.
std::vector<metrics::EvaluationRow> evaluate_dirs(const std::filesystem::path& pred_dir,
                                                  const std::filesystem::path& truth_dir, const std::string& city,
                                                  solar::SeasonKind season,
                                                  const std::optional<std::filesystem::path>& mask_dir = {},
                                                  int zoom = tiles::kDefaultZoom);

}  // namespace shadowacc::pipeline

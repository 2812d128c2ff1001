#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "shadowacc/analysis/analysis.hpp"
#include "shadowacc/oracle/shadow.hpp"
#include "shadowacc/tiles/footprint.hpp"
#include "shadowacc/tiles/tile_store.hpp"

namespace shadowacc::service {

inline constexpr int kDefaultScenarioCap = 64;
/// Buffer applied to line geometries in what-if deltas, meters.
inline constexpr double kDefaultLineBuffer = 5.0;

struct Scenario {
    std::string id;
    std::vector<std::string> removed_ids;
    std::vector<tiles::BuildingFootprint> added;
};

/// {id?, removed_ids?: [..], added?: [GeoJSON Polygon features]}. Added
/// heights must be positive (height_m, height or levels); heights above the
/// cap are clamped. Throws InvalidFootprint.
Scenario scenario_from_json(const nlohmann::json& body);

struct WhatIfOptions {
    int scenario_cap = kDefaultScenarioCap;
    unsigned threads = 0;
    oracle::AccumulateOptions accumulate;
    std::vector<analysis::Geometry> geometries;
    double line_buffer_m = kDefaultLineBuffer;
};

struct GeometryDelta {
    std::string geometry_id;
    double before = 0.0;
    double after = 0.0;
};

struct WhatIfResult {
    std::vector<tiles::TileCoord> dirty;   ///< edited tiles plus 8-neighbours, sorted
    std::vector<oracle::ShadowTile> tiles; ///< recomputed dirty tiles that have data
    std::vector<GeometryDelta> deltas;
};

/// Read-only view of one city's base data. Scenarios are evaluated in
/// private memory; the store is never written.
class CityModel {
public:
    explicit CityModel(tiles::TileStore store);

    const tiles::TileStore& store() const noexcept { return store_; }
    const std::vector<tiles::BuildingFootprint>& footprints() const noexcept { return footprints_; }

    /// Tiles whose pixels overlap an edited footprint's bounding box.
    /// Throws InvalidFootprint for unknown removed ids.
    std::vector<tiles::TileCoord> edited_tiles(const Scenario& scenario) const;
    std::vector<tiles::TileCoord> dirty_tiles(const Scenario& scenario) const;

    /// Re-rasterizes edited tiles, re-accumulates the dirty set with the
    /// oracle. Throws ScenarioTooLarge when the dirty set exceeds the cap.
    WhatIfResult run(const Scenario& scenario, solar::SeasonKind season, const WhatIfOptions& options = {}) const;

private:
    tiles::TileStore store_;
    int zoom_ = tiles::kDefaultZoom;
    std::vector<tiles::BuildingFootprint> footprints_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Tiles at `zoom` touched by the footprint's bounding box.
std::vector<tiles::TileCoord> tiles_touched(const tiles::BuildingFootprint& f, int zoom);

}  // namespace shadowacc::service

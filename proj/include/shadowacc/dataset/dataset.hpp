#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shadowacc/oracle/shadow.hpp"
#include "shadowacc/solar/solar.hpp"
#include "shadowacc/tiles/height_tile.hpp"
#include "shadowacc/tiles/tile_store.hpp"

namespace shadowacc::dataset {

/// Mean building height above which a tile counts as "tall" in manifest stats.
inline constexpr double kTallTileThreshold = 14.0;

struct TileSummary {
    tiles::TileCoord coord;
    double mean_height = 0.0;
};

TileSummary summarize_tile(const tiles::HeightTile& tile);

struct SampleResult {
    std::vector<TileSummary> selected;  ///< sorted by coordinate
    double median = 0.0;                ///< median of the pool's mean heights
    int low_count = 0;                  ///< selected with mean <= median
    int high_count = 0;
    bool degenerate = false;            ///< fell back to uniform sampling
    int tall_tile_count = 0;            ///< pool tiles with mean >= kTallTileThreshold
    std::vector<std::string> warnings;
};

/// Draws ceil(n/2) tiles with mean height <= the pool median and floor(n/2)
/// above it. When either stratum is empty the sampler falls back to a
/// uniform draw with a warning. Throws InsufficientTiles.
SampleResult stratified_sample(std::span<const TileSummary> pool, int n, std::uint64_t seed);
SampleResult stratified_sample(std::span<const tiles::HeightTile> tiles, int n, std::uint64_t seed);

struct ManifestEntry {
    std::string city;
    solar::SeasonKind season = solar::SeasonKind::SummerSolstice;
    tiles::TileCoord coord;
    double latitude_deg = 0.0;
    std::string height_path;  ///< relative to the city root
    std::string input_path;   ///< padded 512x512 heights
    std::string target_path;  ///< 8-bit shadow tile
    int fold = -1;            ///< -1 until kfold_split
};

struct ManifestStats {
    std::optional<double> median_mean_height;
    int tall_tile_count = 0;
    int pool_size = 0;
    bool degenerate = false;
};

struct DatasetManifest {
    std::uint64_t seed = 0;
    int k = 0;  ///< 0 when no split was made
    ManifestStats stats;
    std::vector<ManifestEntry> entries;
};

struct BuildOptions {
    unsigned threads = 0;  ///< 0: hardware concurrency
    oracle::AccumulateOptions accumulate;
};

/// For every (coord, season): pad, accumulate, and persist the padded input
/// and the shadow target under the store. Coordinates are deduplicated.
/// The manifest file is written only when every pair succeeded; a failure
/// leaves no manifest behind.
DatasetManifest build_pairs(const tiles::TileStore& store, const std::string& city,
                            std::span<const tiles::TileCoord> coords, std::span<const solar::SeasonKind> seasons,
                            const BuildOptions& options = {});

/// Assigns fold ids so that each (city, season) stratum is balanced within
/// one entry. Throws InvalidArgument for k < 2 and KTooLarge for k > entries.
DatasetManifest kfold_split(DatasetManifest manifest, int k, std::uint64_t seed);

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace shadowacc::dataset

#include "shadowacc/dataset/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shadowacc/error.hpp"
#include "shadowacc/io_util.hpp"
#include "shadowacc/parallel.hpp"

namespace shadowacc::dataset {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
void shuffle_with(std::vector<T>& v, std::mt19937_64& rng) {
    std::shuffle(v.begin(), v.end(), rng);
}

std::vector<TileSummary> take_sorted(std::vector<TileSummary> v, std::size_t n) {
    v.resize(n);
    std::sort(v.begin(), v.end(), [](const TileSummary& a, const TileSummary& b) { return a.coord < b.coord; });
    return v;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

}  // namespace

TileSummary summarize_tile(const tiles::HeightTile& tile) { return {tile.coord, tile.mean_height()}; }

SampleResult stratified_sample(std::span<const TileSummary> pool, int n, std::uint64_t seed) {
    if (pool.empty()) throw InsufficientTiles("empty tile pool");
    if (n < 0) throw InvalidArgument("negative sample size");

    SampleResult out;
    std::vector<double> means;
    means.reserve(pool.size());
    for (const auto& t : pool) {
        means.push_back(t.mean_height);
        if (t.mean_height >= kTallTileThreshold) ++out.tall_tile_count;
    }
    out.median = median_of(means);

    // Pool order must not matter.
    std::vector<TileSummary> low, high;
    for (const auto& t : pool) (t.mean_height <= out.median ? low : high).push_back(t);
    auto by_coord = [](const TileSummary& a, const TileSummary& b) { return a.coord < b.coord; };
    std::sort(low.begin(), low.end(), by_coord);
    std::sort(high.begin(), high.end(), by_coord);

    std::mt19937_64 rng(seed);
    const auto un = static_cast<std::size_t>(n);
    if (low.empty() || high.empty()) {
        out.degenerate = true;
        out.warnings.push_back("degenerate strata: all tiles share one side of the median; sampling uniformly");
        std::vector<TileSummary> all = low.empty() ? high : low;
        if (un > all.size()) {
            throw InsufficientTiles("requested " + std::to_string(n) + " tiles, pool has " +
                                    std::to_string(all.size()));
        }
        shuffle_with(all, rng);
        out.selected = take_sorted(std::move(all), un);
        for (const auto& t : out.selected) (t.mean_height <= out.median ? out.low_count : out.high_count)++;
        return out;
    }

    const std::size_t want_low = (un + 1) / 2;
    const std::size_t want_high = un / 2;
    if (want_low > low.size()) {
        throw InsufficientTiles("stratum mean<=median has " + std::to_string(low.size()) + " tiles, need " +
                                std::to_string(want_low));
    }
    if (want_high > high.size()) {
        throw InsufficientTiles("stratum mean>median has " + std::to_string(high.size()) + " tiles, need " +
                                std::to_string(want_high));
    }
    shuffle_with(low, rng);
    shuffle_with(high, rng);
    low.resize(want_low);
    high.resize(want_high);
    out.low_count = static_cast<int>(want_low);
    out.high_count = static_cast<int>(want_high);
    low.insert(low.end(), high.begin(), high.end());
    out.selected = take_sorted(std::move(low), un);
    return out;
}

SampleResult stratified_sample(std::span<const tiles::HeightTile> tiles, int n, std::uint64_t seed) {
    std::vector<TileSummary> pool;
    pool.reserve(tiles.size());
    for (const auto& t : tiles) pool.push_back(summarize_tile(t));
    return stratified_sample(pool, n, seed);
}

DatasetManifest build_pairs(const tiles::TileStore& store, const std::string& city,
                            std::span<const tiles::TileCoord> coords, std::span<const solar::SeasonKind> seasons,
                            const BuildOptions& options) {
    std::error_code ec;
    fs::remove(store.manifest_path(), ec);

    std::vector<tiles::TileCoord> unique(coords.begin(), coords.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    std::vector<solar::SeasonKind> season_list(seasons.begin(), seasons.end());
    std::sort(season_list.begin(), season_list.end());
    season_list.erase(std::unique(season_list.begin(), season_list.end()), season_list.end());

    DatasetManifest manifest;
    manifest.entries.resize(unique.size() * season_list.size());
    const auto provider = store.height_provider();
    const unsigned threads = options.threads ? options.threads : default_thread_count();

    parallel_for(unique.size(), threads, [&](std::size_t i) {
        const auto& coord = unique[i];
        const tiles::PaddedHeightTile padded = tiles::pad(coord, provider);
        store.write_padded(padded);
        const double lat = tiles::tile_center(coord).lat;
        for (std::size_t s = 0; s < season_list.size(); ++s) {
            const auto season = season_list[s];
            const auto shadow = oracle::accumulate(padded, oracle::window_for_tile(coord, season), options.accumulate);
            store.write_shadow(season, coord, oracle::quantize(shadow));
            ManifestEntry& e = manifest.entries[i * season_list.size() + s];
            e.city = city;
            e.season = season;
            e.coord = coord;
            e.latitude_deg = lat;
            e.height_path = ("heights" / tiles::TileStore::tile_relpath(coord)).generic_string();
            e.input_path = ("padded" / tiles::TileStore::tile_relpath(coord)).generic_string();
            e.target_path = (fs::path("shadows") / std::string(solar::season_slug(season)) /
                             tiles::TileStore::tile_relpath(coord))
                                .generic_string();
        }
    });

    write_manifest(store.manifest_path(), manifest);
    return manifest;
}

DatasetManifest kfold_split(DatasetManifest manifest, int k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("k must be at least 2, got " + std::to_string(k));
    if (static_cast<std::size_t>(k) > manifest.entries.size()) {
        throw KTooLarge("k=" + std::to_string(k) + " exceeds " + std::to_string(manifest.entries.size()) +
                        " entries");
    }
    std::map<std::pair<std::string, solar::SeasonKind>, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& e = manifest.entries[i];
        strata[{e.city, e.season}].push_back(i);
    }
    std::mt19937_64 rng(seed);
    std::size_t offset = 0;
    for (auto& [key, idx] : strata) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return manifest.entries[a].coord < manifest.entries[b].coord;
        });
        std::shuffle(idx.begin(), idx.end(), rng);
        // Rotating the start keeps folds balanced overall as well.
        for (std::size_t j = 0; j < idx.size(); ++j) {
            manifest.entries[idx[j]].fold = static_cast<int>((offset + j) % k);
        }
        offset += idx.size();
    }
    manifest.k = k;
    manifest.seed = seed;
    return manifest;
}

void write_manifest(const fs::path& path, const DatasetManifest& m) {
    std::ostringstream out;
    json header = {{"record", "header"},
                   {"version", 1},
                   {"seed", m.seed},
                   {"k", m.k},
                   {"pool_size", m.stats.pool_size},
                   {"tall_tile_threshold_m", kTallTileThreshold},
                   {"tall_tile_count", m.stats.tall_tile_count},
                   {"degenerate_strata", m.stats.degenerate},
                   {"entries", m.entries.size()}};
    header["median_mean_height_m"] = m.stats.median_mean_height ? json(*m.stats.median_mean_height) : json(nullptr);
    out << header.dump() << '\n';
    for (const auto& e : m.entries) {
        json rec = {{"record", "pair"},
                    {"city", e.city},
                    {"season", solar::season_slug(e.season)},
                    {"z", e.coord.zoom},
                    {"x", e.coord.x},
                    {"y", e.coord.y},
                    {"latitude_deg", e.latitude_deg},
                    {"height", e.height_path},
                    {"input", e.input_path},
                    {"target", e.target_path},
                    {"fold", e.fold}};
        out << rec.dump() << '\n';
    }
    write_file_atomic(path, out.str());
}

DatasetManifest read_manifest(const fs::path& path) {
    std::istringstream in(read_file(path));
    DatasetManifest m;
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json rec = json::parse(line);
            const std::string kind = rec.at("record");
            if (kind == "header") {
                saw_header = true;
                m.seed = rec.at("seed").get<std::uint64_t>();
                m.k = rec.at("k").get<int>();
                m.stats.pool_size = rec.value("pool_size", 0);
                m.stats.tall_tile_count = rec.value("tall_tile_count", 0);
                m.stats.degenerate = rec.value("degenerate_strata", false);
                if (rec.contains("median_mean_height_m") && !rec["median_mean_height_m"].is_null()) {
                    m.stats.median_mean_height = rec["median_mean_height_m"].get<double>();
                }
            } else if (kind == "pair") {
                ManifestEntry e;
                e.city = rec.at("city");
                const std::string season = rec.at("season");
                const auto sk = solar::parse_season(season);
                if (!sk) throw ParseError("unknown season '" + season + "'");
                e.season = *sk;
                e.coord = {rec.at("z").get<int>(), rec.at("x").get<int>(), rec.at("y").get<int>()};
                e.latitude_deg = rec.at("latitude_deg");
                e.height_path = rec.at("height");
                e.input_path = rec.at("input");
                e.target_path = rec.at("target");
                e.fold = rec.at("fold");
                m.entries.push_back(std::move(e));
            } else {
                throw ParseError("unknown record type '" + kind + "'");
            }
        } catch (const json::exception& ex) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    if (!saw_header) throw ParseError(path.string() + ": missing header record");
    return m;
}

}  // namespace shadowacc::dataset

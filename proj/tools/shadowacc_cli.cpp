// Command-line front end: ingest, rasterize, accumulate, build-dataset,
// evaluate, analyze, serve.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shadowacc/analysis/analysis.hpp"
#include "shadowacc/dataset/dataset.hpp"
#include "shadowacc/error.hpp"
#include "shadowacc/io_util.hpp"
#include "shadowacc/metrics/metrics.hpp"
#include "shadowacc/pipeline.hpp"
#include "shadowacc/service/server.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shadowacc;

namespace {

service::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

solar::SeasonKind season_or_throw(const std::string& text) {
    auto s = solar::parse_season(text);
    if (!s) throw InvalidArgument("unknown season '" + text + "' (summer, equinox, winter)");
    return *s;
}

std::vector<solar::SeasonKind> seasons_or_throw(const std::vector<std::string>& texts) {
    std::vector<solar::SeasonKind> out;
    for (const auto& t : texts) {
        if (t == "all") return {solar::kAllSeasons.begin(), solar::kAllSeasons.end()};
        out.push_back(season_or_throw(t));
    }
    return out;
}

std::optional<oracle::KernelKind> kernel_or_throw(const std::string& name) {
    if (name.empty() || name == "auto") return std::nullopt;
    for (auto k : oracle::available_kernels()) {
        if (oracle::kernel_name(k) == name) return k;
    }
    throw InvalidArgument("kernel '" + name + "' is not available on this machine");
}

tiles::GeoBox parse_bbox(const std::vector<double>& v) {
    if (v.size() != 4) throw InvalidArgument("--bbox takes west south east north");
    tiles::GeoBox b{v[0], v[1], v[2], v[3]};
    if (b.degenerate()) throw InvalidArgument("degenerate --bbox");
    return b;
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        write_file_atomic(out_path, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shadow accumulation pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string root = "data";
    app.add_option("--root", root, "Data root; one directory per city")->envname("SHADOWACC_ROOT");
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0: all cores)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Fetch building footprints for a bounding box");
    std::string city, source;
    std::vector<double> bbox;
    ingest->add_option("--city", city)->required();
    ingest->add_option("--source", source, "NDJSON file or Overpass-style URL")->required();
    ingest->add_option("--bbox", bbox, "west south east north")->required()->expected(4)->delimiter(',');

    // rasterize
    auto* rasterize = app.add_subcommand("rasterize", "Rasterize footprints into zoom-16 height tiles");
    rasterize->add_option("--city", city)->required();

    // accumulate
    auto* accumulate = app.add_subcommand("accumulate", "Compute shadow accumulation tiles");
    std::vector<std::string> season_names;
    std::string kernel;
    accumulate->add_option("--city", city)->required();
    accumulate->add_option("--season", season_names, "summer, equinox, winter or all")->required()->delimiter(',');
    accumulate->add_option("--kernel", kernel, "scalar, avx2, neon or auto")->envname("SHADOWACC_KERNEL");

    // build-dataset
    auto* build = app.add_subcommand("build-dataset", "Sample tiles and build (input, target) pairs");
    int sample_n = 0, folds = 5;
    std::uint64_t seed = 0;
    build->add_option("--city", city)->required();
    build->add_option("--season", season_names)->required()->delimiter(',');
    build->add_option("--n", sample_n, "Tiles per city (0: all tiles, no stratification)");
    build->add_option("--seed", seed);
    build->add_option("--k", folds, "Cross-validation folds (0: no split)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score predicted shadow tiles against ground truth");
    std::string pred_dir, truth_dir, mask_dir, out_path, season_name;
    evaluate->add_option("--pred", pred_dir, "Directory of {z}/{x}/{y}.png predictions")->required();
    evaluate->add_option("--truth", truth_dir, "Directory of {z}/{x}/{y}.png ground truth")->required();
    evaluate->add_option("--mask", mask_dir, "Directory of street masks");
    evaluate->add_option("--season", season_name, "Defaults to the truth directory name");
    evaluate->add_option("--city", city);
    evaluate->add_option("--out", out_path, "CSV path ('-' for stdout)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Mean shadow and sunlight category per geometry");
    std::string geometries_path, summary_path;
    double buffer_m = service::kDefaultLineBuffer;
    analyze->add_option("--city", city)->required();
    analyze->add_option("--season", season_name)->required();
    analyze->add_option("--geometries", geometries_path, "GeoJSON FeatureCollection")->required();
    analyze->add_option("--buffer", buffer_m, "Line buffer in meters");
    analyze->add_option("--out", out_path, "CSV path ('-' for stdout)");
    analyze->add_option("--summary", summary_path, "Per-group category percentages CSV");

    // serve
    auto* serve = app.add_subcommand("serve", "Serve tiles and what-if requests over HTTP");
    service::ServerConfig config;
    serve->add_option("--host", config.host)->envname("SHADOWACC_HOST");
    serve->add_option("--port", config.port, "0 picks a free port")->envname("SHADOWACC_PORT");
    serve->add_option("--scenario-cap", config.scenario_cap, "Max dirty tiles per what-if")
        ->envname("SHADOWACC_SCENARIO_CAP");

    CLI11_PARSE(app, argc, argv);

    try {
        const tiles::TileStore store(fs::path(root) / city);
        if (*ingest) {
            const auto s = pipeline::ingest(store, city, parse_bbox(bbox), tiles::FootprintSource::parse(source));
            for (const auto& w : s.warnings) std::cerr << json{{"warning", w}}.dump() << '\n';
            std::cout << json{{"footprints", s.kept},
                              {"dropped_without_height", s.dropped_without_height},
                              {"dropped_invalid", s.dropped_invalid},
                              {"clamped", s.clamped}}
                             .dump()
                      << '\n';
        } else if (*rasterize) {
            std::cout << "rasterized " << pipeline::rasterize_city(store, threads) << " tiles\n";
        } else if (*accumulate) {
            oracle::AccumulateOptions opts;
            opts.kernel = kernel_or_throw(kernel);
            for (auto s : seasons_or_throw(season_names)) {
                const auto n = pipeline::accumulate_city(store, s, threads, opts);
                std::cout << "accumulated " << n << " tiles (" << solar::season_slug(s) << ")\n";
            }
        } else if (*build) {
            const auto seasons = seasons_or_throw(season_names);
            std::vector<tiles::HeightTile> pool;
            for (const auto& c : store.list_height_tiles()) pool.push_back(*store.read_height(c));
            if (pool.empty()) throw SourceUnavailable("no height tiles for " + city + "; run rasterize");
            std::vector<tiles::TileCoord> coords;
            dataset::ManifestStats stats;
            const auto sample =
                dataset::stratified_sample(pool, sample_n > 0 ? sample_n : static_cast<int>(pool.size()), seed);
            for (const auto& w : sample.warnings) std::cerr << json{{"warning", w}}.dump() << '\n';
            for (const auto& t : sample.selected) coords.push_back(t.coord);
            stats.median_mean_height = sample.median;
            stats.tall_tile_count = sample.tall_tile_count;
            stats.pool_size = static_cast<int>(pool.size());
            stats.degenerate = sample.degenerate;
            pool.clear();

            dataset::BuildOptions opts;
            opts.threads = threads;
            auto manifest = dataset::build_pairs(store, city, coords, seasons, opts);
            if (folds > 0) manifest = dataset::kfold_split(std::move(manifest), folds, seed);
            manifest.seed = seed;
            manifest.stats = stats;
            dataset::write_manifest(store.manifest_path(), manifest);
            std::cout << "wrote " << manifest.entries.size() << " pairs to " << store.manifest_path().string() << '\n';
        } else if (*evaluate) {
            const fs::path truth(truth_dir);
            if (season_name.empty()) season_name = truth.filename().empty() ? truth.parent_path().filename().string()
                                                                            : truth.filename().string();
            const auto season = season_or_throw(season_name);
            std::optional<fs::path> mask;
            if (!mask_dir.empty()) mask = mask_dir;
            const auto rows = pipeline::evaluate_dirs(pred_dir, truth, city, season, mask);
            std::ostringstream csv;
            metrics::write_evaluation_csv(csv, rows);
            write_text(out_path, csv.str());
            if (!out_path.empty() && out_path != "-") std::cout << "evaluated " << rows.size() << " tiles\n";
        } else if (*analyze) {
            const auto season = season_or_throw(season_name);
            const json doc = json::parse(read_file(geometries_path), nullptr, false);
            if (doc.is_discarded()) throw ParseError(geometries_path + ": invalid JSON");
            const auto geometries = analysis::geometries_from_collection(doc);
            const analysis::ShadowLookup lookup = [&](const tiles::TileCoord& c) { return store.read_shadow(season, c); };
            std::vector<analysis::GeometryAggregate> rows;
            for (const auto& g : geometries) {
                const double b = g.kind == analysis::Geometry::Kind::Line ? buffer_m : 0.0;
                rows.push_back(analysis::aggregate_over_geometry(lookup, g, season, b));
            }
            std::ostringstream csv;
            analysis::write_aggregates_csv(csv, rows);
            write_text(out_path, csv.str());
            if (!summary_path.empty()) {
                std::ostringstream sum;
                analysis::write_summary_csv(sum, analysis::summarize(rows));
                write_text(summary_path, sum.str());
            }
        } else if (*serve) {
            config.data_root = root;
            config.threads = threads;
            service::Server server(config);
            const int port = server.bind();
            std::cout << "listening on http://" << config.host << ':' << port << std::endl;
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.listen();
            g_server = nullptr;
        }
    } catch (const Error& e) {
        std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
    return 0;
}

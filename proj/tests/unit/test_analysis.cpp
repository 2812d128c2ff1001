#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "city_fixture.hpp"
#include "shadowacc/analysis/analysis.hpp"
#include "shadowacc/error.hpp"

using namespace shadowacc;
using namespace shadowacc::analysis;
using nlohmann::json;
using tiles::TileCoord;

namespace {

const TileCoord kA{16, 19298, 24631};

json line_feature(const std::string& id, std::vector<tiles::PixelPoint> pts) {
    json coords = json::array();
    for (auto p : pts) {
        const auto ll = tiles::pixel_to_lonlat(p, 16);
        coords.push_back({ll.lon, ll.lat});
    }
    return {{"type", "Feature"}, {"id", id}, {"properties", json::object()},
            {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}};
}

json box_feature(const std::string& id, double x0, double y0, double x1, double y1) {
    const auto f = testsupport::pixel_box(x0, y0, x1, y1, 0.0, id);
    json ring = json::array();
    for (const auto& p : f.rings[0]) ring.push_back({p.lon, p.lat});
    return {{"type", "Feature"}, {"id", id}, {"properties", json::object()},
            {"geometry", {{"type", "Polygon"}, {"coordinates", {ring}}}}};
}

GeometryAggregate agg(const std::string& id, double mean, std::optional<std::string> group = {}) {
    GeometryAggregate a;
    a.geometry_id = id;
    a.mean_fraction = mean;
    a.category = classify(mean);
    a.group = std::move(group);
    a.pixel_count = 10;
    return a;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("classification thresholds") {
    CHECK(classify(0.22) == SunlightCategory::HighAccess);
    CHECK(classify(0.50) == SunlightCategory::ModerateAccess);
    CHECK(classify(0.70) == SunlightCategory::PartiallyShadowed);
    CHECK(classify(0.89) == SunlightCategory::Overshadowed);
    CHECK(classify(0.0) == SunlightCategory::HighAccess);
    CHECK(classify(0.25) == SunlightCategory::ModerateAccess);
    CHECK(classify(0.75) == SunlightCategory::PartiallyShadowed);
    CHECK(classify(std::nextafter(0.75, 1.0)) == SunlightCategory::Overshadowed);
    CHECK(classify(1.0) == SunlightCategory::Overshadowed);
    CHECK_THROWS_AS(classify(-0.01), OutOfRange);
    CHECK_THROWS_AS(classify(1.01), OutOfRange);
    CHECK_THROWS_AS(classify(std::nan("")), OutOfRange);
}

TEST_CASE("polygon over a zero region") {
    const ShadowLookup zeros = [](const TileCoord&) { return Raster<std::uint8_t>(256, 256, 0); };
    const auto g = geometry_from_feature(box_feature("p", kA.x * 256 + 10, kA.y * 256 + 10, kA.x * 256 + 30,
                                                     kA.y * 256 + 25), "x");
    const auto a = aggregate_over_geometry(zeros, g, solar::SeasonKind::WinterSolstice, 0.0);
    CHECK(a.mean_fraction == 0.0);
    CHECK(a.category == SunlightCategory::HighAccess);
    CHECK(a.pixel_count == 20 * 15);
}

TEST_CASE("buffered line across two tiles equals the stitched-mosaic mean") {
    std::mt19937_64 rng(8);
    std::map<TileCoord, Raster<std::uint8_t>> tiles_map;
    for (int dx = 0; dx < 2; ++dx) {
        Raster<std::uint8_t> t(256, 256);
        for (auto& v : t.values()) v = static_cast<std::uint8_t>(rng());
        tiles_map[kA.offset(dx, 0)] = t;
    }
    const ShadowLookup lookup = [&](const TileCoord& c) -> std::optional<Raster<std::uint8_t>> {
        auto it = tiles_map.find(c);
        if (it == tiles_map.end()) return std::nullopt;
        return it->second;
    };
    const double x0 = kA.x * 256.0, y0 = kA.y * 256.0;
    const tiles::PixelPoint a{x0 + 180.3, y0 + 100.7}, b{x0 + 340.9, y0 + 130.2};
    const auto g = geometry_from_feature(line_feature("street", {a, b}), "x");
    const auto got = aggregate_over_geometry(lookup, g, solar::SeasonKind::SummerSolstice, 5.0);

    // Mosaic oracle: one 256x512 raster, pixel centres tested against the
    // buffered segment in mosaic coordinates.
    Raster<std::uint8_t> mosaic(256, 512);
    paste(mosaic, tiles_map[kA], 0, 0);
    paste(mosaic, tiles_map[kA.offset(1, 0)], 0, 256);
    const double lat = (tiles::pixel_to_lonlat(a, 16).lat + tiles::pixel_to_lonlat(b, 16).lat) / 2;
    const double buf = 5.0 / tiles::meters_per_pixel(lat, 16);
    double sum = 0.0;
    std::size_t n = 0;
    for (int r = 0; r < 256; ++r) {
        for (int c = 0; c < 512; ++c) {
            const double px = x0 + c + 0.5, py = y0 + r + 0.5;
            const double dx = b.x - a.x, dy = b.y - a.y;
            double t = ((px - a.x) * dx + (py - a.y) * dy) / (dx * dx + dy * dy);
            t = std::clamp(t, 0.0, 1.0);
            const double ex = a.x + t * dx - px, ey = a.y + t * dy - py;
            if (ex * ex + ey * ey <= buf * buf) {
                sum += mosaic(r, c) / 255.0;
                ++n;
            }
        }
    }
    CHECK(got.pixel_count == n);
    CHECK(std::abs(got.mean_fraction - sum / n) < 1e-12);
}

TEST_CASE("coverage errors") {
    const ShadowLookup none = [](const TileCoord&) -> std::optional<Raster<std::uint8_t>> { return std::nullopt; };
    const auto g = geometry_from_feature(box_feature("p", kA.x * 256 + 10, kA.y * 256 + 10, kA.x * 256 + 30,
                                                     kA.y * 256 + 25), "x");
    CHECK_THROWS_AS(aggregate_over_geometry(none, g, solar::SeasonKind::WinterSolstice, 0.0), NoCoverage);

    const ShadowLookup zeros = [](const TileCoord&) { return Raster<std::uint8_t>(256, 256, 0); };
    const auto sliver = geometry_from_feature(box_feature("s", kA.x * 256 + 10.1, kA.y * 256 + 10.1,
                                                          kA.x * 256 + 10.3, kA.y * 256 + 10.3), "x");
    CHECK_THROWS_AS(aggregate_over_geometry(zeros, sliver, solar::SeasonKind::WinterSolstice, 0.0),
                    EmptyIntersection);
}

TEST_CASE("summaries") {
    const auto one = summarize({agg("a", 0.8)});
    REQUIRE(one.size() == 1);
    CHECK(one[0].percent[3] == 100.0);

    std::vector<GeometryAggregate> rows;
    for (int i = 0; i < 3; ++i) rows.push_back(agg("r" + std::to_string(i), 0.9, "residential"));
    rows.push_back(agg("r3", 0.1, "residential"));
    rows.push_back(agg("c0", 0.6, "commercial"));
    rows.push_back(agg("c1", 0.3, "commercial"));
    const auto s = summarize(rows);
    REQUIRE(s.size() == 2);
    CHECK(s[0].group == "commercial");
    CHECK(s[0].percent[1] == 50.0);
    CHECK(s[0].percent[2] == 50.0);
    CHECK(s[1].group == "residential");
    CHECK(s[1].percent[3] == 75.0);
    CHECK(s[1].percent[0] == 25.0);
    for (const auto& g : s) CHECK(g.percent[0] + g.percent[1] + g.percent[2] + g.percent[3] == doctest::Approx(100.0));

    std::ostringstream out;
    write_summary_csv(out, s);
    CHECK(out.str().starts_with("group,total,high,moderate,partially,overshadowed\ncommercial,2,"));
}

TEST_CASE("what-if delta") {
    CHECK(whatif_delta(agg("a", 0.4), agg("a", 0.4)) == 0.0);
    CHECK(whatif_delta(agg("a", 0.4), agg("a", 0.1)) == doctest::Approx(-0.3));
    CHECK_THROWS_AS(whatif_delta(agg("a", 0.4), agg("b", 0.4)), MismatchedGeometry);
    auto winter = agg("a", 0.4);
    winter.season = solar::SeasonKind::WinterSolstice;
    CHECK_THROWS_AS(whatif_delta(agg("a", 0.4), winter), MismatchedGeometry);
}

TEST_CASE("geojson parsing") {
    const json fc = json::parse(R"({"type":"FeatureCollection","features":[
        {"type":"Feature","properties":{"id":"s1","landuse":"commercial"},
         "geometry":{"type":"MultiLineString","coordinates":[[[0,0],[1,1]],[[2,2],[3,3]]]}},
        {"type":"Feature","properties":{},
         "geometry":{"type":"MultiPolygon","coordinates":[[[[0,0],[1,0],[1,1],[0,0]]]]}}]})");
    const auto gs = geometries_from_collection(fc);
    REQUIRE(gs.size() == 2);
    CHECK(gs[0].id == "s1");
    CHECK(gs[0].kind == Geometry::Kind::Line);
    CHECK(gs[0].lines.size() == 2);
    CHECK(gs[0].group == "commercial");
    CHECK(gs[1].id == "1");
    CHECK(gs[1].kind == Geometry::Kind::Polygon);
    CHECK_THROWS_AS(geometries_from_collection(json::parse(R"({"type":"FeatureCollection","features":[
        {"type":"Feature","geometry":{"type":"Point","coordinates":[0,0]}}]})")), ParseError);
    CHECK_THROWS_AS(geometries_from_collection(json::array()), ParseError);
}

TEST_CASE("aggregates are invariant to how the raster is tiled") {
    // The same 512x512 region served as four tiles or shifted by one tile
    // column (with the geometry shifted too) gives the same answer.
    std::mt19937_64 rng(12);
    Raster<std::uint8_t> region(512, 512);
    for (auto& v : region.values()) v = static_cast<std::uint8_t>(rng());
    auto lookup_at = [&](TileCoord origin) {
        return ShadowLookup([&, origin](const TileCoord& c) -> std::optional<Raster<std::uint8_t>> {
            const int dx = c.x - origin.x, dy = c.y - origin.y;
            if (dx < 0 || dy < 0 || dx > 1 || dy > 1) return std::nullopt;
            return extract(region, dy * 256, dx * 256, 256, 256);
        });
    };
    const auto g1 = geometry_from_feature(box_feature("p", kA.x * 256 + 200, kA.y * 256 + 190, kA.x * 256 + 300,
                                                      kA.y * 256 + 320), "x");
    const TileCoord shifted = kA.offset(3, 0);
    const auto g2 = geometry_from_feature(box_feature("p", shifted.x * 256 + 200, shifted.y * 256 + 190,
                                                      shifted.x * 256 + 300, shifted.y * 256 + 320), "x");
    const auto a1 = aggregate_over_geometry(lookup_at(kA), g1, solar::SeasonKind::WinterSolstice, 0.0);
    const auto a2 = aggregate_over_geometry(lookup_at(shifted), g2, solar::SeasonKind::WinterSolstice, 0.0);
    CHECK(a1.pixel_count == a2.pixel_count);
    CHECK(a1.mean_fraction == a2.mean_fraction);
    CHECK(a1.category == a2.category);
}

TEST_CASE("park in the scene city is shadowed by its southern neighbour in winter") {
    auto& city = testsupport::scene_city();
    const ShadowLookup lookup = [&](const TileCoord& c) {
        return city.store.read_shadow(solar::SeasonKind::WinterSolstice, c);
    };
    const auto park = geometry_from_feature(testsupport::SceneCity::park_feature(), "x");
    const auto a = aggregate_over_geometry(lookup, park, solar::SeasonKind::WinterSolstice, 0.0);
    CHECK(a.pixel_count == 1600);
    CHECK(a.mean_fraction > 0.1);
    CHECK(a.group == "park");
}

}

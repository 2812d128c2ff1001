#include <doctest.h>

#include <cmath>
#include <random>

#include "shadowacc/error.hpp"
#include "shadowacc/tiles/height_tile.hpp"
#include "shadowacc/tiles/png_io.hpp"
#include "shadowacc/tiles/tile_store.hpp"
#include "shadowacc/tiles/web_mercator.hpp"
#include "test_support.hpp"

using namespace shadowacc;
using namespace shadowacc::tiles;

TEST_SUITE("tiles") {

TEST_CASE("tile bounds and centre") {
    const TileCoord c{16, 19298, 24631};
    const GeoBox b = tile_bounds(c);
    CHECK(b.west == doctest::Approx(-73.992919921875).epsilon(1e-12));
    CHECK(b.north == doctest::Approx(40.75141843299743).epsilon(1e-12));
    CHECK(b.east - b.west == doctest::Approx(360.0 / 65536).epsilon(1e-12));
    const LonLat mid = tile_center(c);
    CHECK(b.contains(mid));
    CHECK(tile_for(mid, 16) == c);
}

TEST_CASE("ground resolution") {
    CHECK(meters_per_pixel(0.0, 16) == doctest::Approx(2.388657).epsilon(1e-6));
    CHECK(meters_per_pixel(60.0, 16) == doctest::Approx(2.388657 / 2).epsilon(1e-6));
    // Zoom 16 sits in the 2.3-2.4 m band near the equator.
    const double eq = meters_per_pixel(TileCoord{16, 32768, 32767});
    CHECK(eq > 2.3);
    CHECK(eq < 2.4);
}

TEST_CASE("lonlat <-> pixel round trip") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lon(-179.9, 179.9), lat(-85.0, 85.0);
    for (int i = 0; i < 1000; ++i) {
        const LonLat p{lon(rng), lat(rng)};
        const LonLat q = pixel_to_lonlat(lonlat_to_pixel(p, 16), 16);
        CHECK(std::abs(p.lon - q.lon) < 1e-9);
        CHECK(std::abs(p.lat - q.lat) < 1e-9);
    }
}

TEST_CASE("tile validity") {
    CHECK(TileCoord{16, 0, 0}.valid());
    CHECK(TileCoord{16, 65535, 65535}.valid());
    CHECK_FALSE(TileCoord{16, 65536, 0}.valid());
    CHECK_FALSE(TileCoord{16, -1, 0}.valid());
    CHECK(TileCoord{16, 3, 4}.to_string() == "16/3/4");
}

TEST_CASE("height quantization") {
    CHECK(quantize_height(0.0f) == 0);
    CHECK(quantize_height(500.0f) == 65535);
    CHECK(quantize_height(900.0f) == 65535);
    CHECK(quantize_height(-3.0f) == 0);
    CHECK(quantize_height(250.0f) == 32768);
    for (float h = 0.0f; h <= 500.0f; h += 0.37f) {
        CHECK(std::abs(dequantize_height(quantize_height(h)) - h) <= 500.0f / 65535.0f / 2.0f + 1e-5f);
        CHECK(quantize_height(dequantize_height(quantize_height(h))) == quantize_height(h));
    }
}

TEST_CASE("pad assembles the neighbourhood") {
    const TileCoord c{16, 100, 200};
    auto tile_with = [](TileCoord t, float v) {
        return HeightTile{t, Raster<float>(kTileSize, kTileSize, v)};
    };
    const HeightTileProvider provider = [&](const TileCoord& t) -> std::optional<HeightTile> {
        if (t == c.offset(1, 1)) return std::nullopt;  // missing SE neighbour
        return tile_with(t, static_cast<float>((t.x - 99) + 3 * (t.y - 199)));
    };
    const PaddedHeightTile p = pad(c, provider);
    REQUIRE(p.grid.rows() == kPaddedSize);
    CHECK(p.grid(0, 0) == 0.0f);      // NW: (99, 199)
    CHECK(p.grid(0, 200) == 1.0f);    // N
    CHECK(p.grid(200, 0) == 3.0f);    // W
    CHECK(p.grid(200, 200) == 4.0f);  // centre
    CHECK(p.grid(200, 500) == 5.0f);  // E
    CHECK(p.grid(500, 500) == 0.0f);  // missing SE
    CHECK(p.grid(500, 200) == 7.0f);  // S
    CHECK(crop_to_center(p.grid) == Raster<float>(kTileSize, kTileSize, 4.0f));
}

TEST_CASE("pad takes the facing border of each neighbour") {
    const TileCoord c{16, 10, 10};
    const HeightTileProvider provider = [&](const TileCoord& t) -> std::optional<HeightTile> {
        Raster<float> g(kTileSize, kTileSize);
        for (int r = 0; r < kTileSize; ++r) {
            for (int col = 0; col < kTileSize; ++col) g(r, col) = static_cast<float>(r * 1000 + col + (t == c ? 0 : 0.5));
        }
        return HeightTile{t, g};
    };
    const auto p = pad(c, provider);
    // Row 0 of the padded grid is row 128 of the northern neighbour.
    CHECK(p.grid(0, 128) == 128 * 1000 + 0 + 0.5f);
    // Column 511 is column 127 of the eastern neighbour.
    CHECK(p.grid(128, 511) == 0 * 1000 + 127 + 0.5f);
}

TEST_CASE("pad errors and edge handling") {
    const HeightTileProvider none = [](const TileCoord&) -> std::optional<HeightTile> { return std::nullopt; };
    CHECK_THROWS_AS(pad({16, 5, 5}, none), MissingCenterTile);

    // Antimeridian: the western neighbour of x=0 is x=2^z-1.
    const int last = (1 << 16) - 1;
    const HeightTileProvider wrap = [&](const TileCoord& t) -> std::optional<HeightTile> {
        if (t.x == 0 || t.x == last) return HeightTile{t, Raster<float>(kTileSize, kTileSize, t.x == 0 ? 1.0f : 2.0f)};
        return std::nullopt;
    };
    const auto p = pad({16, 0, 30}, wrap);
    CHECK(p.grid(256, 10) == 2.0f);
    CHECK(p.grid(256, 300) == 1.0f);

    // Rows beyond the pole are empty.
    const HeightTileProvider all = [](const TileCoord& t) -> std::optional<HeightTile> {
        return HeightTile{t, Raster<float>(kTileSize, kTileSize, 9.0f)};
    };
    const auto top = pad({16, 7, 0}, all);
    CHECK(top.grid(10, 256) == 0.0f);
    CHECK(top.grid(300, 256) == 9.0f);

    CHECK_THROWS_AS(crop_to_center(Raster<float>(500, 512)), DimensionError);
}

TEST_CASE("png round trip") {
    std::mt19937_64 rng(3);
    Raster<std::uint8_t> a(37, 53);
    Raster<std::uint16_t> b(256, 256);
    for (auto& v : a.values()) v = static_cast<std::uint8_t>(rng());
    for (auto& v : b.values()) v = static_cast<std::uint16_t>(rng());
    const auto da = decode_png(encode_png(a));
    CHECK(da.bit_depth == 8);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(da.pixels.values()[i] == a.values()[i]);
    const auto db = decode_png(encode_png(b));
    CHECK(db.bit_depth == 16);
    CHECK(db.pixels == b);
    CHECK(encode_png(b) == encode_png(b));
    CHECK_THROWS_AS(decode_png("definitely not a png"), ParseError);
    CHECK_THROWS_AS(decode_png(encode_png(b).substr(0, 100)), ParseError);
}

TEST_CASE("tile store layout") {
    testsupport::TempDir dir;
    const TileStore store(dir.path());
    Raster<float> g(kTileSize, kTileSize, 0.0f);
    g(3, 4) = 123.25f;
    store.write_height({{16, 5, 6}, g});
    store.write_height({{16, 5, 7}, g});
    CHECK(std::filesystem::exists(dir.path() / "heights/16/5/6.png"));
    const auto back = store.read_height({16, 5, 6});
    REQUIRE(back.has_value());
    CHECK(std::abs(back->grid(3, 4) - 123.25f) < 0.004f);
    CHECK_FALSE(store.read_height({16, 9, 9}).has_value());
    CHECK(store.list_height_tiles() == std::vector<TileCoord>{{16, 5, 6}, {16, 5, 7}});

    Raster<std::uint8_t> s(kTileSize, kTileSize, 17);
    store.write_shadow(solar::SeasonKind::WinterSolstice, {16, 5, 6}, s);
    CHECK(std::filesystem::exists(dir.path() / "shadows/winter/16/5/6.png"));
    CHECK(*store.read_shadow(solar::SeasonKind::WinterSolstice, {16, 5, 6}) == s);
    CHECK(store.available_seasons() == std::vector{solar::SeasonKind::WinterSolstice});
}

}

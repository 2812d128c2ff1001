#include <doctest.h>

#include <random>

#include "shadowacc/tiles/rasterize.hpp"
#include "test_support.hpp"

using namespace shadowacc;
using namespace shadowacc::tiles;
using testsupport::pixel_box;

namespace {
const TileCoord kTile{16, 19298, 24631};
const double kX = kTile.x * 256.0;
const double kY = kTile.y * 256.0;
}  // namespace

TEST_SUITE("rasterize") {

TEST_CASE("pixel-aligned box fills exactly its pixels") {
    const std::vector fs{pixel_box(kX + 10, kY + 30, kX + 20, kY + 40, 27.3, "a")};
    const auto t = rasterize(fs, kTile);
    for (int r = 0; r < 256; ++r) {
        for (int c = 0; c < 256; ++c) {
            const bool in = r >= 30 && r < 40 && c >= 10 && c < 20;
            CHECK(t.grid(r, c) == (in ? 27.3f : 0.0f));
        }
    }
}

TEST_CASE("partial coverage averages over the whole pixel") {
    const std::vector fs{pixel_box(kX + 10.5, kY + 30, kX + 20, kY + 40.25, 40.0, "a")};
    const auto t = rasterize(fs, kTile);
    CHECK(t.grid(35, 10) == 20.0f);  // half the samples covered
    CHECK(t.grid(40, 15) == 10.0f);  // one row of four
    CHECK(t.grid(40, 10) == 5.0f);
    CHECK(t.grid(35, 15) == 40.0f);
}

TEST_CASE("overlapping footprints keep the tallest") {
    const std::vector fs{pixel_box(kX + 0, kY + 0, kX + 10, kY + 10, 12.0, "low"),
                         pixel_box(kX + 5, kY + 5, kX + 15, kY + 15, 30.0, "high")};
    const auto t = rasterize(fs, kTile);
    CHECK(t.grid(2, 2) == 12.0f);
    CHECK(t.grid(7, 7) == 30.0f);
    CHECK(t.grid(12, 12) == 30.0f);
    const std::vector reversed{fs[1], fs[0]};
    CHECK(rasterize(reversed, kTile).grid == t.grid);
}

TEST_CASE("heights are clamped and holes stay empty") {
    auto outer = pixel_box(kX + 100, kY + 100, kX + 140, kY + 140, 650.0, "tower");
    const auto hole = pixel_box(kX + 110, kY + 110, kX + 120, kY + 120, 0.0, "h");
    outer.rings.push_back(hole.rings[0]);
    const auto t = rasterize(std::vector{outer}, kTile);
    CHECK(t.grid(105, 105) == 500.0f);
    CHECK(t.grid(115, 115) == 0.0f);
}

TEST_CASE("footprints spanning tiles split cleanly") {
    const std::vector fs{pixel_box(kX + 250, kY + 10, kX + 262, kY + 20, 9.0, "span")};
    const auto west = rasterize(fs, kTile);
    const auto east = rasterize(fs, kTile.offset(1, 0));
    CHECK(west.grid(15, 255) == 9.0f);
    CHECK(west.grid(15, 249) == 0.0f);
    CHECK(east.grid(15, 0) == 9.0f);
    CHECK(east.grid(15, 5) == 9.0f);
    CHECK(east.grid(15, 6) == 0.0f);
}

TEST_CASE("covered volume matches area times height") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(5.0, 200.0), size(1.0, 40.0);
    for (int i = 0; i < 20; ++i) {
        const double x = pos(rng), y = pos(rng), w = size(rng), h = size(rng);
        const std::vector fs{pixel_box(kX + x, kY + y, kX + x + w, kY + y + h, 10.0, "r")};
        const auto t = rasterize(fs, kTile);
        double volume = 0.0;
        for (float v : t.grid.values()) volume += v;
        // Sample quantization: at most a quarter pixel of error per edge.
        const double expected = w * h * 10.0;
        CHECK(std::abs(volume - expected) <= 10.0 * 0.25 * 2 * (w + h + 1));
    }
}

TEST_CASE("no footprints, empty tile") {
    const auto t = rasterize(std::vector<BuildingFootprint>{}, kTile);
    CHECK(t.grid == Raster<float>(256, 256, 0.0f));
    CHECK(t.mean_height() == 0.0);
}

}

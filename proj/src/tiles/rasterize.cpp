#include "shadowacc/tiles/rasterize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace shadowacc::tiles {

Raster<float> rasterize_window(std::span<const BuildingFootprint> footprints, int zoom, std::int64_t origin_x,
                               std::int64_t origin_y, int rows, int cols) {
    constexpr int S = kSamplesPerAxis;
    const int srows = rows * S;
    const int scols = cols * S;
    Raster<float> samples(srows, scols, 0.0f);

    struct Edge {
        double x0, y0, x1, y1;
    };
    std::vector<Edge> edges;
    std::vector<double> xs;

    for (const auto& f : footprints) {
        const float h = static_cast<float>(std::clamp(f.height_m, 0.0, kMaxBuildingHeight));
        if (!(h > 0.0f)) continue;

        // Edges in sample units relative to the window origin.
        edges.clear();
        double ymin = INFINITY, ymax = -INFINITY, xmin = INFINITY, xmax = -INFINITY;
        for (const auto& ring : f.rings) {
            for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
                const PixelPoint a = lonlat_to_pixel(ring[i], zoom);
                const PixelPoint b = lonlat_to_pixel(ring[i + 1], zoom);
                Edge e{(a.x - static_cast<double>(origin_x)) * S, (a.y - static_cast<double>(origin_y)) * S,
                       (b.x - static_cast<double>(origin_x)) * S, (b.y - static_cast<double>(origin_y)) * S};
                ymin = std::min({ymin, e.y0, e.y1});
                ymax = std::max({ymax, e.y0, e.y1});
                xmin = std::min({xmin, e.x0, e.x1});
                xmax = std::max({xmax, e.x0, e.x1});
                if (e.y0 != e.y1) edges.push_back(e);
            }
        }
        if (edges.empty() || xmax < 0 || ymax < 0 || xmin > scols || ymin > srows) continue;

        const int row_lo = std::max(0, static_cast<int>(std::ceil(ymin - 0.5)));
        const int row_hi = std::min(srows, static_cast<int>(std::ceil(ymax - 0.5)));
        for (int sr = row_lo; sr < row_hi; ++sr) {
            const double yc = sr + 0.5;
            xs.clear();
            for (const Edge& e : edges) {
                if ((e.y0 <= yc && yc < e.y1) || (e.y1 <= yc && yc < e.y0)) {
                    xs.push_back(e.x0 + (yc - e.y0) * (e.x1 - e.x0) / (e.y1 - e.y0));
                }
            }
            std::sort(xs.begin(), xs.end());
            auto row = samples.row(sr);
            // Even-odd fill: sample centres in [xs[2k], xs[2k+1]).
            for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
                const int c0 = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
                const int c1 = std::min(scols, static_cast<int>(std::ceil(xs[k + 1] - 0.5)));
                for (int sc = c0; sc < c1; ++sc) row[sc] = std::max(row[sc], h);
            }
        }
    }

    Raster<float> out(rows, cols, 0.0f);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double sum = 0.0;
            for (int i = 0; i < S; ++i) {
                const float* s = samples.row(r * S + i).data() + c * S;
                for (int j = 0; j < S; ++j) sum += s[j];
            }
            out(r, c) = static_cast<float>(sum / (S * S));
        }
    }
    return out;
}

HeightTile rasterize(std::span<const BuildingFootprint> footprints, const TileCoord& coord) {
    return {coord, rasterize_window(footprints, coord.zoom, std::int64_t{coord.x} * kTileSize,
                                    std::int64_t{coord.y} * kTileSize, kTileSize, kTileSize)};
}

}  // namespace shadowacc::tiles

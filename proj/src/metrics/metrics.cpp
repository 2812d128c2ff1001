#include "shadowacc/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "shadowacc/error.hpp"

namespace shadowacc::metrics {
namespace {

void require_mask(const Fractions& a, const Mask& mask) {
    require_same_shape(a, mask, "mask");
}

// Valid-mode separable filter: out(r, c) = sum_ij w_i w_j in(r+i, c+j).
Fractions filter_valid(const Fractions& in, const std::vector<double>& taps) {
    const int n = static_cast<int>(taps.size());
    const int rows = in.rows() - n + 1;
    const int cols = in.cols() - n + 1;
    Fractions horiz(in.rows(), cols);
    for (int r = 0; r < in.rows(); ++r) {
        const auto src = in.row(r);
        for (int c = 0; c < cols; ++c) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += taps[k] * src[c + k];
            horiz(r, c) = s;
        }
    }
    Fractions out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += taps[k] * horiz(r + k, c);
            out(r, c) = s;
        }
    }
    return out;
}

Fractions product(const Fractions& a, const Fractions& b) {
    Fractions out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.values()[i] = a.values()[i] * b.values()[i];
    return out;
}

}  // namespace

Fractions dequantize(const Raster<std::uint8_t>& codes) {
    Fractions out(codes.rows(), codes.cols());
    for (std::size_t i = 0; i < codes.size(); ++i) out.values()[i] = codes.values()[i] / 255.0;
    return out;
}

ErrorSums error_sums(const Fractions& a, const Fractions& b) {
    require_same_shape(a, b, "metrics");
    ErrorSums s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.values()[i] - b.values()[i];
        s.abs_sum += std::abs(d);
        s.sq_sum += d * d;
    }
    s.count = a.size();
    return s;
}

ErrorSums error_sums(const Fractions& a, const Fractions& b, const Mask& mask) {
    require_same_shape(a, b, "metrics");
    require_mask(a, mask);
    ErrorSums s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!mask.values()[i]) continue;
        const double d = a.values()[i] - b.values()[i];
        s.abs_sum += std::abs(d);
        s.sq_sum += d * d;
        ++s.count;
    }
    if (s.count == 0) throw EmptyMask("mask selects no pixels");
    return s;
}

double l1_mean(const Fractions& a, const Fractions& b) { return mae(a, b); }

double mse(const Fractions& a, const Fractions& b) {
    auto s = error_sums(a, b);
    if (s.count == 0) throw EmptyMask("empty raster");
    return s.mse();
}
double mae(const Fractions& a, const Fractions& b) {
    auto s = error_sums(a, b);
    if (s.count == 0) throw EmptyMask("empty raster");
    return s.mae();
}
double rmse(const Fractions& a, const Fractions& b) { return std::sqrt(mse(a, b)); }
double mse(const Fractions& a, const Fractions& b, const Mask& m) { return error_sums(a, b, m).mse(); }
double mae(const Fractions& a, const Fractions& b, const Mask& m) { return error_sums(a, b, m).mae(); }
double rmse(const Fractions& a, const Fractions& b, const Mask& m) { return std::sqrt(mse(a, b, m)); }

std::vector<double> gaussian_taps(int window, double sigma) {
    std::vector<double> taps(window);
    const double mid = (window - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        taps[i] = std::exp(-(i - mid) * (i - mid) / (2 * sigma * sigma));
        sum += taps[i];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

Fractions ssim_map(const Fractions& a, const Fractions& b, const SsimParams& p) {
    require_same_shape(a, b, "ssim");
    if (a.rows() < p.window || a.cols() < p.window) {
        throw DimensionError("ssim needs at least " + std::to_string(p.window) + "x" + std::to_string(p.window));
    }
    const auto taps = gaussian_taps(p.window, p.sigma);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

    const Fractions mu_a = filter_valid(a, taps);
    const Fractions mu_b = filter_valid(b, taps);
    const Fractions e_aa = filter_valid(product(a, a), taps);
    const Fractions e_bb = filter_valid(product(b, b), taps);
    const Fractions e_ab = filter_valid(product(a, b), taps);

    Fractions out(mu_a.rows(), mu_a.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double ma = mu_a.values()[i], mb = mu_b.values()[i];
        const double var_a = e_aa.values()[i] - ma * ma;
        const double var_b = e_bb.values()[i] - mb * mb;
        const double cov = e_ab.values()[i] - ma * mb;
        out.values()[i] = ((2 * (ma * mb) + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
    }
    return out;
}

double ssim(const Fractions& a, const Fractions& b, const SsimParams& p) {
    const Fractions map = ssim_map(a, b, p);
    double sum = 0.0;
    for (double v : map.values()) sum += v;
    return sum / static_cast<double>(map.size());
}

Fractions sobel_magnitude(const Fractions& a) {
    if (a.rows() < 3 || a.cols() < 3) throw DimensionError("sobel needs at least 3x3");
    const int rows = a.rows(), cols = a.cols();
    auto px = [&](int r, int c) { return a(std::clamp(r, 0, rows - 1), std::clamp(c, 0, cols - 1)); };
    Fractions out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double gx = ((px(r - 1, c + 1) - px(r - 1, c - 1)) + 2 * (px(r, c + 1) - px(r, c - 1)) +
                               (px(r + 1, c + 1) - px(r + 1, c - 1))) /
                              8.0;
            const double gy = ((px(r + 1, c - 1) - px(r - 1, c - 1)) + 2 * (px(r + 1, c) - px(r - 1, c)) +
                               (px(r + 1, c + 1) - px(r - 1, c + 1))) /
                              8.0;
            out(r, c) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

double sobel_loss(const Fractions& a, const Fractions& b) {
    require_same_shape(a, b, "sobel_loss");
    return mse(sobel_magnitude(a), sobel_magnitude(b));
}

MetricReport report(const Fractions& truth, const Fractions& predicted) {
    const ErrorSums s = error_sums(truth, predicted);
    if (s.count == 0) throw EmptyMask("empty raster");
    MetricReport r;
    r.mse = s.mse();
    r.mae = s.mae();
    r.rmse = std::sqrt(r.mse);
    r.ssim = ssim(truth, predicted);
    r.pixel_count = s.count;
    return r;
}

MetricReport street_masked_report(const Fractions& truth, const Fractions& predicted, const Mask& mask) {
    const ErrorSums s = error_sums(truth, predicted, mask);
    MetricReport r;
    r.mse = s.mse();
    r.mae = s.mae();
    r.rmse = std::sqrt(r.mse);
    r.pixel_count = s.count;

    const SsimParams p;
    const Fractions map = ssim_map(truth, predicted, p);
    const int half = p.window / 2;
    double sum = 0.0;
    std::size_t n = 0;
    for (int row = 0; row < map.rows(); ++row) {
        for (int col = 0; col < map.cols(); ++col) {
            if (!mask(row + half, col + half)) continue;
            sum += map(row, col);
            ++n;
        }
    }
    r.ssim = n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    return r;
}

double minutes_equivalent(double rmse_value, solar::SeasonKind season) {
    return rmse_value * solar::season(season).window_minutes;
}

void write_evaluation_csv(std::ostream& out, const std::vector<EvaluationRow>& rows) {
    out << "city,season,tile_z,tile_x,tile_y,rmse,mae,mse,ssim,masked\n";
    char buf[256];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.10g,%.10g,%.10g,%.10g,%d\n", row.tile.zoom, row.tile.x, row.tile.y,
                      row.report.rmse, row.report.mae, row.report.mse, row.report.ssim, row.masked ? 1 : 0);
        out << row.city << ',' << solar::season_slug(row.season) << ',' << buf;
    }
}

}  // namespace shadowacc::metrics

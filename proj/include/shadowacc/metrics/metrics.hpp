#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "shadowacc/raster.hpp"
#include "shadowacc/solar/solar.hpp"
#include "shadowacc/tiles/web_mercator.hpp"

namespace shadowacc::metrics {

/// Fraction raster, values nominally in [0, 1].
using Fractions = Raster<double>;
/// Inclusion mask; nonzero cells are included.
using Mask = Raster<std::uint8_t>;

/// 8-bit tile code -> fraction (code / 255).
Fractions dequantize(const Raster<std::uint8_t>& codes);

struct ErrorSums {
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    std::size_t count = 0;

    double mae() const { return abs_sum / static_cast<double>(count); }
    double mse() const { return sq_sum / static_cast<double>(count); }
};

/// Absolute and squared error totals in row-major order.
ErrorSums error_sums(const Fractions& a, const Fractions& b);
ErrorSums error_sums(const Fractions& a, const Fractions& b, const Mask& mask);

/// Mean absolute difference (per-pixel normalized L1).
double l1_mean(const Fractions& a, const Fractions& b);

double mse(const Fractions& a, const Fractions& b);
double mae(const Fractions& a, const Fractions& b);
double rmse(const Fractions& a, const Fractions& b);
double mse(const Fractions& a, const Fractions& b, const Mask& mask);
double mae(const Fractions& a, const Fractions& b, const Mask& mask);
double rmse(const Fractions& a, const Fractions& b, const Mask& mask);

/// SSIM parameters: 11x11 Gaussian window, sigma 1.5, K1 0.01, K2 0.03,
/// dynamic range 1.
struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Normalized 1D Gaussian taps.
std::vector<double> gaussian_taps(int window, double sigma);

/// Local SSIM for every full window position: (H-10) x (W-10); entry (r, c)
/// belongs to the window centred on pixel (r+5, c+5).
Fractions ssim_map(const Fractions& a, const Fractions& b, const SsimParams& p = {});
double ssim(const Fractions& a, const Fractions& b, const SsimParams& p = {});

/// 3x3 Sobel gradient magnitude, kernels scaled by 1/8, replicate border.
Fractions sobel_magnitude(const Fractions& a);
/// Mean squared difference of the two Sobel magnitudes.
double sobel_loss(const Fractions& a, const Fractions& b);

struct MetricReport {
    double rmse = 0.0;
    double mae = 0.0;
    double mse = 0.0;
    double ssim = 1.0;
    std::size_t pixel_count = 0;
};

MetricReport report(const Fractions& truth, const Fractions& predicted);

/// Report restricted to `mask`. SSIM is the mean local SSIM over masked
/// pixels that have a full window (NaN when none do). Throws EmptyMask.
MetricReport street_masked_report(const Fractions& truth, const Fractions& predicted, const Mask& mask);

/// Error expressed in minutes of the season's window (rmse * minutes).
double minutes_equivalent(double rmse, solar::SeasonKind season);

struct EvaluationRow {
    std::string city;
    solar::SeasonKind season = solar::SeasonKind::SummerSolstice;
    tiles::TileCoord tile;
    MetricReport report;
    bool masked = false;
};

/// Columns: city,season,tile_z,tile_x,tile_y,rmse,mae,mse,ssim,masked
void write_evaluation_csv(std::ostream& out, const std::vector<EvaluationRow>& rows);

}  // namespace shadowacc::metrics

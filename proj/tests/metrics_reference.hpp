#pragma once

// From-definition reference implementations used to check the metrics module.

#include <algorithm>
#include <cmath>

#include "shadowacc/raster.hpp"

namespace reference {

inline double naive_mse(const shadowacc::Raster<double>& a, const shadowacc::Raster<double>& b) {
    double s = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) s += (a(r, c) - b(r, c)) * (a(r, c) - b(r, c));
    return s / (a.rows() * a.cols());
}

inline double naive_mae(const shadowacc::Raster<double>& a, const shadowacc::Raster<double>& b) {
    double s = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) s += std::abs(a(r, c) - b(r, c));
    return s / (a.rows() * a.cols());
}

// Wang et al. (2004): Gaussian-weighted local statistics over every 11x11
// window, weights w(i,j) proportional to exp(-((i-5)^2 + (j-5)^2) / (2 sigma^2)).
inline double ssim_from_definition(const shadowacc::Raster<double>& a, const shadowacc::Raster<double>& b) {
    const int n = 11;
    const double sigma = 1.5, c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double w[11][11];
    double wsum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            w[i][j] = std::exp(-((i - 5.0) * (i - 5.0) + (j - 5.0) * (j - 5.0)) / (2 * sigma * sigma));
            wsum += w[i][j];
        }
    double total = 0.0;
    int count = 0;
    for (int r = 0; r + n <= a.rows(); ++r) {
        for (int c = 0; c + n <= a.cols(); ++c) {
            double ma = 0, mb = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    ma += w[i][j] / wsum * a(r + i, c + j);
                    mb += w[i][j] / wsum * b(r + i, c + j);
                }
            double va = 0, vb = 0, cov = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double da = a(r + i, c + j) - ma, db = b(r + i, c + j) - mb;
                    va += w[i][j] / wsum * da * da;
                    vb += w[i][j] / wsum * db * db;
                    cov += w[i][j] / wsum * da * db;
                }
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return total / count;
}

inline shadowacc::Raster<double> sobel_from_definition(const shadowacc::Raster<double>& a) {
    const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    shadowacc::Raster<double> out(a.rows(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) {
            double gx = 0, gy = 0;
            for (int i = -1; i <= 1; ++i)
                for (int j = -1; j <= 1; ++j) {
                    const double v = a(std::clamp(r + i, 0, a.rows() - 1), std::clamp(c + j, 0, a.cols() - 1));
                    gx += kx[i + 1][j + 1] * v;
                    gy += ky[i + 1][j + 1] * v;
                }
            out(r, c) = std::hypot(gx / 8, gy / 8);
        }
    return out;
}

}  // namespace reference

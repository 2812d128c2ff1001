#include "shadowacc/oracle/march.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>

#include "kernels.hpp"
#include "shadowacc/error.hpp"

namespace shadowacc::oracle {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

MarchTemplate build_march_template(const solar::SunPosition& sun, double meters_per_pixel, int max_reach,
                                   float max_height) {
    if (!(sun.elevation_deg > 0.0)) throw InvalidArgument("march template needs a sun above the horizon");
    if (!(meters_per_pixel > 0.0)) throw InvalidArgument("meters_per_pixel must be positive");

    MarchTemplate tpl;
    if (sun.elevation_deg >= 90.0 || !(max_height > 0.0f) || max_reach <= 0) return tpl;

    const double rise = std::tan(sun.elevation_deg * kDeg) * meters_per_pixel;  // meters per pixel travelled
    const double az = sun.azimuth_deg * kDeg;
    // Toward the sun: east is +col, north is -row.
    double ux = std::sin(az);
    double uy = -std::cos(az);
    if (std::abs(ux) < 1e-15) ux = 0.0;
    if (std::abs(uy) < 1e-15) uy = 0.0;

    constexpr double inf = std::numeric_limits<double>::infinity();
    tpl.col_step = ux > 0 ? 1 : (ux < 0 ? -1 : 0);
    tpl.row_step = uy > 0 ? 1 : (uy < 0 ? -1 : 0);
    const double delta_c = ux != 0 ? 1.0 / std::abs(ux) : inf;
    const double delta_r = uy != 0 ? 1.0 / std::abs(uy) : inf;
    double next_c = 0.5 * delta_c;
    double next_r = 0.5 * delta_r;

    int row = 0, col = 0;
    for (;;) {
        double s;
        if (next_c < next_r) {
            s = next_c;
            col += tpl.col_step;
            next_c += delta_c;
        } else {
            s = next_r;
            row += tpl.row_step;
            next_r += delta_r;
        }
        if (std::abs(row) >= max_reach || std::abs(col) >= max_reach) break;
        const double h = rise * s;
        if (h >= max_height) break;
        tpl.drow.push_back(row);
        tpl.dcol.push_back(col);
        tpl.min_height.push_back(static_cast<float>(h));
    }
    return tpl;
}

MarchField::MarchField(const Raster<float>& heights)
    : rows_(heights.rows()), cols_(heights.cols()), stride_(heights.cols() + 2 * kLaneMargin) {
    data_.assign(static_cast<std::size_t>(rows_) * stride_, 0.0f);
    for (int r = 0; r < rows_; ++r) {
        const auto src = heights.row(r);
        float* dst = data_.data() + r * stride_ + kLaneMargin;
        for (int c = 0; c < cols_; ++c) {
            const float h = src[c];
            dst[c] = h > 0.0f ? h : 0.0f;  // also maps NaN to 0
            max_height_ = std::max(max_height_, dst[c]);
        }
    }
}

std::string_view kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::Scalar: return "scalar";
        case KernelKind::Avx2: return "avx2";
        case KernelKind::Neon: return "neon";
    }
    return "unknown";
}

bool kernel_available(KernelKind kind) {
    switch (kind) {
        case KernelKind::Scalar: return true;
        case KernelKind::Avx2:
#if defined(__x86_64__) || defined(__i386__)
            return detail::avx2_compiled() && __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case KernelKind::Neon: return detail::neon_compiled();
    }
    return false;
}

std::vector<KernelKind> available_kernels() {
    std::vector<KernelKind> out;
    for (auto k : {KernelKind::Scalar, KernelKind::Avx2, KernelKind::Neon}) {
        if (kernel_available(k)) out.push_back(k);
    }
    return out;
}

KernelKind default_kernel() {
    static const KernelKind chosen = [] {
        if (const char* env = std::getenv("SHADOWACC_KERNEL")) {
            for (auto k : available_kernels()) {
                if (kernel_name(k) == env) return k;
            }
        }
        if (kernel_available(KernelKind::Avx2)) return KernelKind::Avx2;
        if (kernel_available(KernelKind::Neon)) return KernelKind::Neon;
        return KernelKind::Scalar;
    }();
    return chosen;
}

namespace detail {

std::size_t row_limit(const MarchTemplate& tpl, int rows, int row) {
    auto first = tpl.drow.begin();
    auto it = std::partition_point(first, tpl.drow.end(), [&](int d) {
        const int r = row + d;
        return r >= 0 && r < rows;
    });
    return static_cast<std::size_t>(it - first);
}

std::size_t col_limit(const MarchTemplate& tpl, int cols, int col) {
    auto first = tpl.dcol.begin();
    auto it = std::partition_point(first, tpl.dcol.end(), [&](int d) {
        const int c = col + d;
        return c >= 0 && c < cols;
    });
    return static_cast<std::size_t>(it - first);
}

void count_scalar(const KernelArgs& args, int col_begin, int col_end) {
    const MarchField& field = *args.field;
    const MarchTemplate& tpl = *args.tpl;
    const float* thresholds = tpl.min_height.data();
    const CountTarget& t = args.target;
    for (int r = t.row0; r < t.row1; ++r) {
        const std::size_t rlim = row_limit(tpl, field.rows(), r);
        for (int c = col_begin; c < col_end; ++c) {
            const std::size_t lim = std::min(rlim, col_limit(tpl, field.cols(), c));
            const float* origin = field.at(r, c);
            for (std::size_t k = 0; k < lim; ++k) {
                if (origin[args.offsets[k]] > thresholds[k]) {
                    ++(*t.counts)(r - t.row0 + t.out_row0, c - t.col0 + t.out_col0);
                    break;
                }
            }
        }
    }
}

}  // namespace detail

void accumulate_counts(KernelKind kind, const MarchField& field, const MarchTemplate& tpl, const CountTarget& target) {
    if (target.row0 < 0 || target.col0 < 0 || target.row1 > field.rows() || target.col1 > field.cols() ||
        target.row0 > target.row1 || target.col0 > target.col1) {
        throw DimensionError("accumulate_counts: target outside field");
    }
    if (!target.counts || target.out_row0 < 0 || target.out_col0 < 0 ||
        target.out_row0 + (target.row1 - target.row0) > target.counts->rows() ||
        target.out_col0 + (target.col1 - target.col0) > target.counts->cols()) {
        throw DimensionError("accumulate_counts: counts raster too small");
    }
    if (tpl.size() == 0) return;

    std::vector<std::ptrdiff_t> offsets(tpl.size());
    for (std::size_t k = 0; k < tpl.size(); ++k) offsets[k] = tpl.drow[k] * field.stride() + tpl.dcol[k];
    const detail::KernelArgs args{&field, &tpl, offsets.data(), target};

    if (kind != KernelKind::Scalar && !kernel_available(kind)) {
        throw InvalidArgument(std::string("kernel ") + std::string(kernel_name(kind)) + " not available");
    }
    switch (kind) {
        case KernelKind::Scalar: detail::count_scalar(args, target.col0, target.col1); break;
        case KernelKind::Avx2: detail::count_avx2(args); break;
        case KernelKind::Neon: detail::count_neon(args); break;
    }
}

bool shadowed(const MarchField& field, const MarchTemplate& tpl, int row, int col) {
    if (row < 0 || col < 0 || row >= field.rows() || col >= field.cols()) {
        throw DimensionError("shadowed: pixel outside field");
    }
    const std::size_t lim =
        std::min(detail::row_limit(tpl, field.rows(), row), detail::col_limit(tpl, field.cols(), col));
    const float* origin = field.at(row, col);
    for (std::size_t k = 0; k < lim; ++k) {
        if (origin[tpl.drow[k] * field.stride() + tpl.dcol[k]] > tpl.min_height[k]) return true;
    }
    return false;
}

}  // namespace shadowacc::oracle

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "shadowacc/raster.hpp"
#include "shadowacc/solar/solar.hpp"

namespace shadowacc::oracle {

/// Cells visited by a 2D DDA walk from a pixel centre toward the sun,
/// together with the height the ray has reached where it enters each cell.
///
/// For a fixed sun direction and ground resolution the walk is the same
/// for every origin pixel, so one template serves the whole raster. A cell
/// occludes when its column height is strictly greater than `min_height`.
/// Row and column offsets are monotone along the walk.
struct MarchTemplate {
    std::vector<int> drow;
    std::vector<int> dcol;
    std::vector<float> min_height;  ///< meters, non-decreasing, > 0
    int row_step = 0;               ///< -1, 0 or +1
    int col_step = 0;

    std::size_t size() const noexcept { return drow.size(); }
};

/// Builds the walk for `sun` at `meters_per_pixel`. The walk stops once an
/// offset reaches `max_reach` pixels on either axis or the ray height reaches
/// `max_height` (nothing taller exists, so later cells cannot occlude).
/// Requires 0 < elevation.
MarchTemplate build_march_template(const solar::SunPosition& sun, double meters_per_pixel, int max_reach,
                                   float max_height);

/// Height raster laid out for the kernels: every row carries zero-filled
/// margins so vector lanes may read a few columns past either edge.
class MarchField {
public:
    static constexpr int kLaneMargin = 16;

    explicit MarchField(const Raster<float>& heights);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::ptrdiff_t stride() const noexcept { return stride_; }
    float max_height() const noexcept { return max_height_; }
    const float* at(int row, int col) const noexcept { return data_.data() + row * stride_ + kLaneMargin + col; }

private:
    int rows_;
    int cols_;
    std::ptrdiff_t stride_;
    float max_height_ = 0.0f;
    std::vector<float> data_;
};

enum class KernelKind { Scalar, Avx2, Neon };

std::string_view kernel_name(KernelKind kind);
/// Compiled in and supported by the running CPU.
bool kernel_available(KernelKind kind);
std::vector<KernelKind> available_kernels();

/// Kernel used when callers do not pick one: SHADOWACC_KERNEL
/// (scalar|avx2|neon) if set and available, else the widest available.
KernelKind default_kernel();

/// Target rectangle of origin pixels in field coordinates and where their
/// counts land in `counts`.
struct CountTarget {
    int row0, row1, col0, col1;
    Raster<std::uint16_t>* counts;
    int out_row0, out_col0;
};

/// Adds one to the count of every origin pixel in the target rectangle whose
/// ray is blocked before leaving the field.
void accumulate_counts(KernelKind kind, const MarchField& field, const MarchTemplate& tpl, const CountTarget& target);

/// Single-pixel reference test; same semantics as the kernels.
bool shadowed(const MarchField& field, const MarchTemplate& tpl, int row, int col);

}  // namespace shadowacc::oracle

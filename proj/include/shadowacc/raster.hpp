#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "shadowacc/error.hpp"

namespace shadowacc {

/// Dense row-major 2D grid. Row 0 is the northern edge, column 0 the western
/// edge, matching slippy-map pixel order.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int rows, int cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw DimensionError("negative raster dimensions");
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(int row, int col) noexcept { return data_[index(row, col)]; }
    const T& operator()(int row, int col) const noexcept { return data_[index(row, col)]; }

    std::span<T> row(int r) noexcept { return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)}; }
    std::span<const T> row(int r) const noexcept {
        return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)};
    }

    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }
    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    bool same_shape(const Raster& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * cols_ + col;
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

template <typename A, typename B>
void require_same_shape(const Raster<A>& a, const Raster<B>& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

/// Copies the window [row0, row0+rows) x [col0, col0+cols) out of `src`.
template <typename T>
Raster<T> extract(const Raster<T>& src, int row0, int col0, int rows, int cols) {
    if (row0 < 0 || col0 < 0 || row0 + rows > src.rows() || col0 + cols > src.cols()) {
        throw DimensionError("extract: window outside raster");
    }
    Raster<T> out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        auto s = src.row(row0 + r).subspan(col0, cols);
        std::copy(s.begin(), s.end(), out.row(r).begin());
    }
    return out;
}

template <typename T>
void paste(Raster<T>& dst, const Raster<T>& src, int row0, int col0) {
    if (row0 < 0 || col0 < 0 || row0 + src.rows() > dst.rows() || col0 + src.cols() > dst.cols()) {
        throw DimensionError("paste: window outside raster");
    }
    for (int r = 0; r < src.rows(); ++r) {
        auto s = src.row(r);
        std::copy(s.begin(), s.end(), dst.row(row0 + r).begin() + col0);
    }
}

}  // namespace shadowacc

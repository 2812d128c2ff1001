#include "shadowacc/tiles/png_io.hpp"

#include <png.h>

#include <cstring>
#include <vector>

#include "shadowacc/error.hpp"
#include "shadowacc/io_util.hpp"

namespace shadowacc::tiles {
namespace {

void on_png_error(png_structp, png_const_charp msg) { throw ParseError(std::string("png: ") + msg); }
void on_png_warning(png_structp, png_const_charp) {}

void append_bytes(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::string*>(png_get_io_ptr(png));
    out->append(reinterpret_cast<const char*>(data), len);
}

struct ReadCursor {
    std::string_view bytes;
    std::size_t pos = 0;
};

void read_bytes(png_structp png, png_bytep data, png_size_t len) {
    auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
    if (cur->pos + len > cur->bytes.size()) png_error(png, "truncated stream");
    std::memcpy(data, cur->bytes.data() + cur->pos, len);
    cur->pos += len;
}

std::string encode(int rows, int cols, int bit_depth, const std::vector<png_bytep>& row_ptrs) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    std::string out;
    try {
        png_set_write_fn(png, &out, append_bytes, nullptr);
        png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), bit_depth,
                     PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_set_compression_level(png, 6);
        png_write_info(png, info);
        if (bit_depth == 16) png_set_swap(png);  // rows are host (little-endian) order
        png_write_image(png, const_cast<png_bytepp>(row_ptrs.data()));
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace

std::string encode_png(const Raster<std::uint8_t>& gray8) {
    std::vector<png_bytep> rows(gray8.rows());
    for (int r = 0; r < gray8.rows(); ++r) rows[r] = const_cast<png_bytep>(gray8.row(r).data());
    return encode(gray8.rows(), gray8.cols(), 8, rows);
}

std::string encode_png(const Raster<std::uint16_t>& gray16) {
    std::vector<png_bytep> rows(gray16.rows());
    for (int r = 0; r < gray16.rows(); ++r) {
        rows[r] = reinterpret_cast<png_bytep>(const_cast<std::uint16_t*>(gray16.row(r).data()));
    }
    return encode(gray16.rows(), gray16.cols(), 16, rows);
}

DecodedPng decode_png(std::string_view bytes) {
    if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
        throw ParseError("png: bad signature");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    DecodedPng out;
    ReadCursor cursor{bytes, 0};
    try {
        png_set_read_fn(png, &cursor, read_bytes);
        png_read_info(png, info);
        const int color = png_get_color_type(png, info);
        const int depth = png_get_bit_depth(png, info);
        if (color != PNG_COLOR_TYPE_GRAY || (depth != 8 && depth != 16)) {
            png_error(png, "expected 8- or 16-bit single-channel grayscale");
        }
        if (depth == 16) png_set_swap(png);
        png_read_update_info(png, info);
        const int rows = static_cast<int>(png_get_image_height(png, info));
        const int cols = static_cast<int>(png_get_image_width(png, info));
        out.bit_depth = depth;
        out.pixels = Raster<std::uint16_t>(rows, cols);
        if (depth == 16) {
            std::vector<png_bytep> ptrs(rows);
            for (int r = 0; r < rows; ++r) ptrs[r] = reinterpret_cast<png_bytep>(out.pixels.row(r).data());
            png_read_image(png, ptrs.data());
        } else {
            Raster<std::uint8_t> tmp(rows, cols);
            std::vector<png_bytep> ptrs(rows);
            for (int r = 0; r < rows; ++r) ptrs[r] = tmp.row(r).data();
            png_read_image(png, ptrs.data());
            std::copy(tmp.values().begin(), tmp.values().end(), out.pixels.values().begin());
        }
        png_read_end(png, nullptr);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png(const std::filesystem::path& path, const Raster<std::uint8_t>& gray8) {
    write_file_atomic(path, encode_png(gray8));
}

void write_png(const std::filesystem::path& path, const Raster<std::uint16_t>& gray16) {
    write_file_atomic(path, encode_png(gray16));
}

Raster<std::uint8_t> read_png8(const std::filesystem::path& path) {
    DecodedPng d = decode_png(read_file(path));
    if (d.bit_depth != 8) throw ParseError(path.string() + ": expected 8-bit PNG");
    Raster<std::uint8_t> out(d.pixels.rows(), d.pixels.cols());
    std::copy(d.pixels.values().begin(), d.pixels.values().end(), out.values().begin());
    return out;
}

Raster<std::uint16_t> read_png16(const std::filesystem::path& path) {
    DecodedPng d = decode_png(read_file(path));
    if (d.bit_depth != 16) throw ParseError(path.string() + ": expected 16-bit PNG");
    return std::move(d.pixels);
}

}  // namespace shadowacc::tiles

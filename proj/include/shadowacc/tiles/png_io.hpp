#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "shadowacc/raster.hpp"

namespace shadowacc::tiles {

/// Single-channel grayscale PNG codecs. Encoding is deterministic (fixed
/// compression settings, no time chunk).
std::string encode_png(const Raster<std::uint8_t>& gray8);
std::string encode_png(const Raster<std::uint16_t>& gray16);

struct DecodedPng {
    int bit_depth = 0;
    Raster<std::uint16_t> pixels;  ///< 8-bit images widen losslessly
};

DecodedPng decode_png(std::string_view bytes);

void write_png(const std::filesystem::path& path, const Raster<std::uint8_t>& gray8);
void write_png(const std::filesystem::path& path, const Raster<std::uint16_t>& gray16);
Raster<std::uint8_t> read_png8(const std::filesystem::path& path);
Raster<std::uint16_t> read_png16(const std::filesystem::path& path);

}  // namespace shadowacc::tiles

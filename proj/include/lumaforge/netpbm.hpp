#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "lumaforge/pixel_core.hpp"

namespace lumaforge::netpbm {

// Binary PGM (P5) or PPM (P6), maxval 255.
using Image = std::variant<PixelBuffer, ColorBuffer>;

// Header comments are accepted on read; the writer emits "P5\n<cols> <rows>\n255\n"
// (or P6) followed by raw samples.
Image decode(const std::string& bytes, const std::string& origin = "<memory>");
std::string encode(const PixelBuffer& frame);
std::string encode(const ColorBuffer& frame);

// Throw IngestError naming the file on any read or format failure.
Image read(const std::filesystem::path& path);
ColorBuffer read_color(const std::filesystem::path& path);

void write(const std::filesystem::path& path, const PixelBuffer& frame);
void write(const std::filesystem::path& path, const ColorBuffer& frame);

}  // namespace lumaforge::netpbm

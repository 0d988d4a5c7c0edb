#pragma once

#include <filesystem>
#include <iosfwd>

#include "cgei/image.hpp"

namespace cgei {

// 8-bit binary PGM (P5). Intensities map linearly between [0, 255] and [0, 1];
// maxval other than 255 is rescaled on read.
Image read_pgm(const std::filesystem::path& path);
Image read_pgm(std::istream& in);

// Values are clamped to [0, 1] and rounded to the nearest code.
void write_pgm(const std::filesystem::path& path, const Grid& img);
void write_pgm(std::ostream& out, const Grid& img);

}  // namespace cgei

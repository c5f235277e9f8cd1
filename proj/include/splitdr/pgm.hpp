#pragma once

#include <string>

#include "splitdr/vec.hpp"

namespace splitdr {

struct PgmImage {
  int n1 = 0;  // rows
  int n2 = 0;  // cols
  Vector pixels;  // row-major, [0, 255]
};

// Reads P2 (ASCII) or P5 (binary) 8-bit grayscale.
PgmImage read_pgm(const std::string& path);

// Writes P5; values clamped to [0, 255] and rounded.
void write_pgm(const std::string& path, const PgmImage& img);

}  // namespace splitdr

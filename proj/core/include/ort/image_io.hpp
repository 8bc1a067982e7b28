#pragma once

#include <stdexcept>
#include <string>

#include "ort/lattice.hpp"

namespace ort {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads a binary PGM (P5, maxval up to 65535) or grayscale PNG (8/16-bit)
// into a 2-D field with dims = (height, width); intensities mapped to [0,1]
// by v / maxval. ASCII PGM (P2) and color PNG are rejected.
LatticeField read_image(const std::string& path);

// Writes a 2-D field as PGM or PNG (chosen by extension, default PGM).
// Values are clipped to [0,1] and quantized by round(v * (2^depth - 1));
// depth is 8 or 16.
void write_image(const LatticeField& field, const std::string& path, int depth = 8);

}  // namespace ort

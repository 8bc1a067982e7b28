#pragma once

#include <string>

#include "ort/image_io.hpp"
#include "ort/lattice.hpp"

namespace ort {

// ORTF container, version 1: magic "ORTF", u8 version, u8 p, then p little-
// endian u32 dims and product(dims) little-endian f64 values in row-major
// order. Round-trips fields of any dimension bit-exactly.
LatticeField read_tensor(const std::string& path);
void write_tensor(const LatticeField& field, const std::string& path);

// Dispatches on extension: .orft tensors, anything else through image I/O.
LatticeField read_field(const std::string& path);
void write_field(const LatticeField& field, const std::string& path, int depth = 8);

}  // namespace ort

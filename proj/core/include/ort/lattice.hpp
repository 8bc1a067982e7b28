#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ort {

using Index = std::int64_t;

// Scalar field sampled on an equally spaced lattice over [0,1]^p.
//
// The lattice point with multi-index (i_1,...,i_p), i_j in {1..n_j}, sits at
// the coordinate (i_1/n_1, ..., i_p/n_p). Values are stored row-major with
// axis 1 slowest, which makes 2-D fields scanline-compatible with image I/O.
// Immutable after construction; safe for shared concurrent reads.
class LatticeField {
 public:
  LatticeField(std::vector<int> dims, std::vector<double> values);

  static LatticeField constant(std::vector<int> dims, double value);

  int dim() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  Index size() const { return static_cast<Index>(values_.size()); }
  std::span<const double> values() const { return values_; }
  double operator[](Index i) const { return values_[static_cast<std::size_t>(i)]; }
  double at(Index i) const;

  // Multi-index (1-based) of a flat index, row-major with axis 1 slowest.
  void multi_index(Index flat, std::span<int> out) const;
  Index flatten(std::span<const int> multi) const;

  // Coordinate in (0,1]^p of a lattice point.
  void coord(Index flat, std::span<double> out) const;
  std::vector<double> coord(Index flat) const;

  // Nearest lattice point to x in [0,1]^p, ties toward the smaller flat
  // index. Throws std::domain_error outside the unit cube.
  Index nearest_index(std::span<const double> x) const;

  // Elements to step over when axis' multi-index increments by one.
  Index stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

 private:
  std::vector<int> dims_;
  std::vector<Index> strides_;
  std::vector<double> values_;
};

// Sorted set of flat lattice indices forming a tree node or mask.
// Value-semantic; freely transferable between threads.
struct PointSet {
  std::vector<Index> indices;

  static PointSet all(const LatticeField& field);
  // Validates sortedness and bounds against a field.
  static PointSet from_indices(std::vector<Index> indices, const LatticeField& field);

  Index size() const { return static_cast<Index>(indices.size()); }
  bool empty() const { return indices.empty(); }
};

}  // namespace ort

#include "ort/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ort {

namespace {
std::vector<Index> make_strides(const std::vector<int>& dims) {
  std::vector<Index> strides(dims.size(), 1);
  for (int j = static_cast<int>(dims.size()) - 2; j >= 0; --j) {
    strides[j] = strides[j + 1] * dims[j + 1];
  }
  return strides;
}
}  // namespace

LatticeField::LatticeField(std::vector<int> dims, std::vector<double> values)
    : dims_(std::move(dims)), strides_(make_strides(dims_)), values_(std::move(values)) {
  if (dims_.empty()) throw std::invalid_argument("LatticeField: empty dims");
  Index n = 1;
  for (int d : dims_) {
    if (d <= 0) throw std::invalid_argument("LatticeField: non-positive dim");
    n *= d;
  }
  if (n != static_cast<Index>(values_.size())) {
    throw std::invalid_argument("LatticeField: values.length != product(dims)");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("LatticeField: non-finite value");
  }
}

LatticeField LatticeField::constant(std::vector<int> dims, double value) {
  Index n = 1;
  for (int d : dims) n *= d;
  return LatticeField(std::move(dims), std::vector<double>(static_cast<std::size_t>(n), value));
}

double LatticeField::at(Index i) const {
  if (i < 0 || i >= size()) {
    throw std::out_of_range("LatticeField: index " + std::to_string(i) + " out of range");
  }
  return values_[static_cast<std::size_t>(i)];
}

void LatticeField::multi_index(Index flat, std::span<int> out) const {
  if (flat < 0 || flat >= size()) throw std::out_of_range("LatticeField: flat index out of range");
  for (int j = 0; j < dim(); ++j) {
    out[j] = static_cast<int>(flat / strides_[j]) + 1;
    flat %= strides_[j];
  }
}

Index LatticeField::flatten(std::span<const int> multi) const {
  Index flat = 0;
  for (int j = 0; j < dim(); ++j) {
    if (multi[j] < 1 || multi[j] > dims_[j]) {
      throw std::out_of_range("LatticeField: multi-index out of range");
    }
    flat += static_cast<Index>(multi[j] - 1) * strides_[j];
  }
  return flat;
}

void LatticeField::coord(Index flat, std::span<double> out) const {
  if (flat < 0 || flat >= size()) throw std::out_of_range("LatticeField: flat index out of range");
  for (int j = 0; j < dim(); ++j) {
    const Index i = flat / strides_[j] + 1;
    flat %= strides_[j];
    out[j] = static_cast<double>(i) / dims_[j];
  }
}

std::vector<double> LatticeField::coord(Index flat) const {
  std::vector<double> out(static_cast<std::size_t>(dim()));
  coord(flat, out);
  return out;
}

Index LatticeField::nearest_index(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) {
    throw std::invalid_argument("LatticeField: coordinate dimension mismatch");
  }
  Index flat = 0;
  for (int j = 0; j < dim(); ++j) {
    if (x[j] < 0.0 || x[j] > 1.0) throw std::domain_error("LatticeField: coordinate outside [0,1]^p");
    // Nearest i in {1..n_j} to x*n_j; exact halves round down so ties go to
    // the smaller flat index.
    const double t = x[j] * dims_[j];
    Index i = static_cast<Index>(std::ceil(t - 0.5));
    i = std::clamp<Index>(i, 1, dims_[j]);
    flat += (i - 1) * strides_[j];
  }
  return flat;
}

PointSet PointSet::all(const LatticeField& field) {
  PointSet s;
  s.indices.resize(static_cast<std::size_t>(field.size()));
  for (Index i = 0; i < field.size(); ++i) s.indices[static_cast<std::size_t>(i)] = i;
  return s;
}

PointSet PointSet::from_indices(std::vector<Index> indices, const LatticeField& field) {
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= field.size()) {
      throw std::out_of_range("PointSet: index out of range");
    }
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw std::invalid_argument("PointSet: indices must be strictly increasing");
    }
  }
  return PointSet{std::move(indices)};
}

}  // namespace ort

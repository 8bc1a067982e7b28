#pragma once

#include <span>
#include <string>
#include <vector>

#include "ort/lattice.hpp"

namespace ort {

// Set of detected edge locations in domain coordinates, duplicates removed.
struct EdgeSet {
  std::vector<std::vector<double>> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

// sqrt of the Monte Carlo mean (over replications) of the summed squared
// error over the lattice.
double remse(std::span<const LatticeField> estimates, const LatticeField& truth);
inline double remse(const LatticeField& estimate, const LatticeField& truth) {
  return remse(std::span<const LatticeField>(&estimate, 1), truth);
}

// Per-pixel-normalized variant: the inner sum is divided by the number of
// lattice points before averaging over replications.
double rmse(std::span<const LatticeField> estimates, const LatticeField& truth);
inline double rmse(const LatticeField& estimate, const LatticeField& truth) {
  return rmse(std::span<const LatticeField>(&estimate, 1), truth);
}

// 10*log10(peak^2/mse) in dB; +infinity when the fields match exactly.
double psnr(const LatticeField& estimate, const LatticeField& truth, double peak = 1.0);

// Local linear least-squares gradient detector for 2-D fields: fits a plane
// over the (2*bandwidth+1)^2 window at every interior pixel and flags those
// whose fitted gradient magnitude exceeds the threshold. A negative
// threshold selects auto mode: mean + 2 sd of the gradient magnitudes.
EdgeSet detect_edges(const LatticeField& field, int bandwidth, double threshold);
inline EdgeSet detect_edges_auto(const LatticeField& field, int bandwidth = 2) {
  return detect_edges(field, bandwidth, -1.0);
}

// Symmetric average of directed mean nearest-neighbor Euclidean distances.
// Not a metric (no triangle inequality); throws on empty input sets.
double d_kq(const EdgeSet& detected, const EdgeSet& reference);

}  // namespace ort

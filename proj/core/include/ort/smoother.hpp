#pragma once

#include <optional>

#include "ort/lattice.hpp"
#include "ort/tree.hpp"

namespace ort {

enum class EstimatorKind { leaf_mean, local_weighted };

// Which intensities patch distances are measured on inside the weighted
// estimator. `pilot` runs a leaf-gated window mean first and scores patches
// of that pilot; `raw` scores patches of the noisy input, optionally with the
// 2*sigma^2-per-offset expected distance subtracted. Raw uncompensated
// distances swamp the similarity kernel once sigma is on the order of 0.15:
// E[SS] = exp(-2*kappa*K*sigma^2/(n h)^2) for K patch offsets, which
// downweights every same-region neighbor and defeats the averaging.
enum class PatchSource { pilot, raw };

struct SmootherConfig {
  // Splitting threshold; <= 0 derives 1e-4 * sigma^2.
  double r_n = 0.0;
  // Neighborhood half-width in domain units; <= 0 derives 3/n for the
  // largest axis. Must lie in (0, 0.5] when set.
  double h_n = 0.0;
  double kappa_n = 5.0;
  // Noise s.d.; estimated from the field when absent.
  std::optional<double> sigma;
  EstimatorKind estimator = EstimatorKind::leaf_mean;
  PatchSource patch_source = PatchSource::pilot;
  bool compensate_noise = true;
  // Propagate sigma into the tree's noise-adaptive split threshold.
  bool adaptive_split = true;
  TreeConfig tree;
};

// Leaf-only averaging: output at x is the mean response over the leaf
// containing x; constant within each leaf.
LatticeField leaf_mean_estimate(const LatticeField& field, const LeafPartition& partition);

// Chebyshev ball: all lattice points whose coordinates differ from the
// center's by <= h_n in every axis, clipped to the domain. Contains the
// center.
PointSet neighborhood(const LatticeField& field, Index center, double h_n);

// exp(-kappa * D^2 / (n h_n)^2) where D^2 sums squared intensity differences
// over patch offsets present in both (possibly boundary-clipped) patches.
// When compensate_sigma > 0, the expected pure-noise distance
// 2*sigma^2*(offset count) is subtracted before clamping at 0.
double similarity_score(const LatticeField& field, Index a, Index b, double h_n, double kappa_n,
                        double compensate_sigma = 0.0);

// Leaf-wise locally weighted averaging over the neighborhood intersected
// with the leaf of x; the center always participates with weight 1.
LatticeField local_weighted_estimate(const LatticeField& field, const LeafPartition& partition,
                                     const SmootherConfig& cfg);

// Robust noise scale from first differences along the first axis with >= 2
// points: median(|d|) / (0.6745 * sqrt(2)), floored at 1e-6.
double estimate_sigma(const LatticeField& field);

struct DenoiseResult {
  LatticeField estimate;
  LeafPartition partition;
  // Resolved parameters actually used.
  double sigma = 0.0;
  double r_n = 0.0;
  double h_n = 0.0;
};

// Full pipeline: resolve sigma/r_n/h_n, grow the tree, run the configured
// estimator. Deterministic given cfg (including tree.seed).
DenoiseResult denoise(const LatticeField& field, const SmootherConfig& cfg);

}  // namespace ort

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ort/lattice.hpp"

namespace ort {

// Oriented hyperplane split in canonical form: ||alpha|| = 1 and the first
// nonzero component of alpha is positive, so (alpha, c) and (-alpha, -c)
// describe the same partition exactly once. Left child is alpha'z <= c.
struct SplitRule {
  std::vector<double> alpha;
  double c = 0.0;

  void canonicalize();
  bool goes_left(std::span<const double> z) const;
};

// Streaming count/sum/sum-of-squares triple for a node's responses.
struct NodeStats {
  std::int64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double w) {
    ++count;
    sum += w;
    sum_sq += w * w;
  }
  void merge(const NodeStats& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const { return sum / static_cast<double>(count); }
  // Within-node SSE; floored at 0 against roundoff.
  double sse() const {
    const double s = sum_sq - sum * sum / static_cast<double>(count);
    return s > 0.0 ? s : 0.0;
  }
};

struct TreeConfig {
  // Minimum gain for accepting a split.
  double r_n = 1e-8;
  // Both children of an accepted split must have at least this many points.
  int min_leaf = 1;
  // Oblique candidate directions sampled per node; 0 picks 64 for p=2 and
  // 128 for p>=3.
  int n_random_dirs = 0;
  // Rounds of coordinate-wise refinement around the best direction.
  int refine_steps = 20;
  // Stop splitting once this many leaves exist; 0 = unbounded.
  int max_leaves = 0;
  std::uint64_t seed = 0;
  // When > 0, a split is accepted only if its gain also exceeds
  // split_penalty * noise_sigma^2 * ln(m) / m for a node of m points. This is
  // the depth-limiting constraint used on noisy inputs: the maximum scan gain
  // of an m-point pure-noise node concentrates near 6 sigma^2/m, far above
  // r_n = 1e-4 sigma^2 for any m below ~6e4, so a bare r_n rule would
  // fragment noise regions into singleton leaves.
  double noise_sigma = 0.0;
  double split_penalty = 3.0;

  int resolved_dirs(int p) const {
    if (n_random_dirs > 0) return n_random_dirs;
    return p <= 2 ? 64 : 128;
  }
};

// Gain a split must exceed at a node of `size` points.
double split_threshold(const TreeConfig& cfg, Index size);

struct SplitRecord {
  int node_id = 0;
  SplitRule rule;
  double gain = 0.0;
};

// Leaf assignment of every lattice point plus per-leaf statistics. Each
// leaf's member set is the lattice intersected with the convex polytope
// formed by its ancestors' half-spaces.
class LeafPartition {
 public:
  LeafPartition(std::vector<std::int32_t> leaf_id, std::vector<NodeStats> leaf_stats,
                std::vector<SplitRecord> split_log);

  std::int32_t leaf_count() const { return static_cast<std::int32_t>(leaf_stats_.size()); }
  std::span<const std::int32_t> leaf_ids() const { return leaf_id_; }
  std::int32_t leaf_of(Index flat) const;
  const NodeStats& stats(std::int32_t leaf) const {
    return leaf_stats_[static_cast<std::size_t>(leaf)];
  }
  const std::vector<SplitRecord>& split_log() const { return split_log_; }

  // Members of one leaf, ascending.
  std::span<const Index> members(std::int32_t leaf) const;

 private:
  std::vector<std::int32_t> leaf_id_;
  std::vector<NodeStats> leaf_stats_;
  std::vector<SplitRecord> split_log_;
  std::vector<Index> member_offsets_;
  std::vector<Index> member_indices_;
};

struct ScoredSplit {
  SplitRule rule;
  double gain = 0.0;
};

// Impurity gain of a split: (SSE(N) - SSE(N_L) - SSE(N_R)) / |N|, evaluated
// by direct two-pass summation. Throws std::invalid_argument if either child
// is empty. Never negative beyond roundoff (clamped at 0).
double impurity_gain(const LatticeField& field, const PointSet& node, const SplitRule& split);

// Algebraically identical gain from child statistics alone:
// (|L||R|/|N|^2) (mean_L - mean_R)^2.
double simplified_gain(const NodeStats& left, const NodeStats& right);

// Best split found by the staged candidate search (axis sweeps, sampled
// oblique directions, coordinate-wise refinement); thresholds are swept
// exhaustively for every candidate direction. Returns nullopt when no split
// satisfies the min_leaf constraint. node_id selects the node's RNG stream.
std::optional<ScoredSplit> best_split(const LatticeField& field, const PointSet& node,
                                      const TreeConfig& cfg, int node_id = 0);

// Recursive construction: splits the frontier (largest node first) until
// every leaf fails the acceptance threshold, is too small to split, or the
// leaf budget is exhausted. Deterministic given (field, cfg) regardless of
// thread count.
LeafPartition grow_tree(const LatticeField& field, const TreeConfig& cfg);

inline std::int32_t locate_leaf(const LeafPartition& partition, Index flat) {
  return partition.leaf_of(flat);
}

// Line-oriented serialization of the split log: one split per line,
// "node_id alpha_1 ... alpha_p c gain" with 17-significant-digit reals.
std::string format_split_log(const LeafPartition& partition);

}  // namespace ort

#include "ort/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>
#include <utility>

#include "ort/parallel.hpp"
#include "ort/rng.hpp"

namespace ort {

void SplitRule::canonicalize() {
  double norm = 0.0;
  for (double a : alpha) norm += a * a;
  norm = std::sqrt(norm);
  if (norm <= 0.0) throw std::invalid_argument("SplitRule: zero direction");
  double flip = 1.0;
  for (double a : alpha) {
    if (a != 0.0) {
      flip = (a > 0.0 ? 1.0 : -1.0);
      break;
    }
  }
  for (double& a : alpha) a = a * flip / norm;
  c *= flip / norm;
}

bool SplitRule::goes_left(std::span<const double> z) const {
  double dot = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) dot += alpha[j] * z[j];
  return dot <= c;
}

double simplified_gain(const NodeStats& left, const NodeStats& right) {
  if (left.count < 1 || right.count < 1) {
    throw std::invalid_argument("simplified_gain: empty child");
  }
  const double n = static_cast<double>(left.count + right.count);
  const double d = left.mean() - right.mean();
  return (static_cast<double>(left.count) * static_cast<double>(right.count) / (n * n)) * d * d;
}

double impurity_gain(const LatticeField& field, const PointSet& node, const SplitRule& split) {
  if (node.empty()) throw std::invalid_argument("impurity_gain: empty node");
  const int p = field.dim();
  std::vector<double> z(static_cast<std::size_t>(p));
  std::vector<double> wl, wr;
  wl.reserve(node.indices.size());
  wr.reserve(node.indices.size());
  for (Index i : node.indices) {
    field.coord(i, z);
    (split.goes_left(z) ? wl : wr).push_back(field[i]);
  }
  if (wl.empty() || wr.empty()) throw std::invalid_argument("impurity_gain: split leaves a child empty");

  auto sse = [](const std::vector<double>& w) {
    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(w.size());
    double s = 0.0;
    for (double v : w) s += (v - mean) * (v - mean);
    return s;
  };
  std::vector<double> all;
  all.reserve(wl.size() + wr.size());
  all.insert(all.end(), wl.begin(), wl.end());
  all.insert(all.end(), wr.begin(), wr.end());
  const double gain = (sse(all) - sse(wl) - sse(wr)) / static_cast<double>(all.size());
  return gain > 0.0 ? gain : 0.0;
}

double split_threshold(const TreeConfig& cfg, Index size) {
  double t = cfg.r_n;
  if (cfg.noise_sigma > 0.0 && size >= 2) {
    const double m = static_cast<double>(size);
    t = std::max(t, cfg.split_penalty * cfg.noise_sigma * cfg.noise_sigma * std::log(m) / m);
  }
  return t;
}

namespace {

struct CandidateBest {
  double gain = -1.0;
  Index threshold_idx = 0;
  double c = 0.0;
  bool valid = false;
};

// Exhaustive threshold sweep along one direction: walks every boundary
// between distinct sorted projections, updating child statistics
// incrementally. Thresholds sit at midpoints of consecutive distinct values.
CandidateBest sweep_direction(std::span<const std::pair<double, double>> sorted, int min_leaf) {
  CandidateBest best;
  const Index m = static_cast<Index>(sorted.size());
  NodeStats total;
  for (const auto& [proj, w] : sorted) {
    (void)proj;
    total.add(w);
  }

  NodeStats left;
  Index tidx = 0;
  for (Index k = 0; k + 1 < m; ++k) {
    const double pk = sorted[static_cast<std::size_t>(k)].first;
    const double pn = sorted[static_cast<std::size_t>(k + 1)].first;
    left.add(sorted[static_cast<std::size_t>(k)].second);
    if (pn <= pk) continue;  // same projected value, no boundary here
    const Index nl = k + 1;
    const Index nr = m - nl;
    const Index this_idx = tidx++;
    if (nl < min_leaf || nr < min_leaf) continue;
    NodeStats right{total.count - left.count, total.sum - left.sum, total.sum_sq - left.sum_sq};
    double g = simplified_gain(left, right);
    if (g < 0.0) g = 0.0;
    if (g > best.gain) {
      best.gain = g;
      best.threshold_idx = this_idx;
      best.c = 0.5 * (pk + pn);
      best.valid = true;
    }
  }
  return best;
}

struct DirectionResult {
  bool valid = false;
  double gain = -1.0;
  Index threshold_idx = 0;
  SplitRule rule;
};

class SplitSearcher {
 public:
  SplitSearcher(const LatticeField& field, const PointSet& node) : field_(field), p_(field.dim()) {
    const Index m = node.size();
    coords_.resize(static_cast<std::size_t>(m * p_));
    w_.resize(static_cast<std::size_t>(m));
    std::vector<double> z(static_cast<std::size_t>(p_));
    for (Index k = 0; k < m; ++k) {
      const Index i = node.indices[static_cast<std::size_t>(k)];
      field.coord(i, z);
      for (int j = 0; j < p_; ++j) coords_[static_cast<std::size_t>(k * p_ + j)] = z[static_cast<std::size_t>(j)];
      w_[static_cast<std::size_t>(k)] = field[i];
    }
  }

  Index count() const { return static_cast<Index>(w_.size()); }

  DirectionResult evaluate(std::vector<double> alpha, int min_leaf) const {
    SplitRule rule{std::move(alpha), 0.0};
    rule.canonicalize();
    const Index m = count();
    std::vector<std::pair<double, double>> pairs(static_cast<std::size_t>(m));
    for (Index k = 0; k < m; ++k) {
      double dot = 0.0;
      for (int j = 0; j < p_; ++j) {
        dot += rule.alpha[static_cast<std::size_t>(j)] * coords_[static_cast<std::size_t>(k * p_ + j)];
      }
      pairs[static_cast<std::size_t>(k)] = {dot, w_[static_cast<std::size_t>(k)]};
    }
    // Equal projections collapse into one group during the sweep, so tie
    // order inside the sort cannot affect the result. Sorting by (proj, w)
    // keeps the comparator a strict weak order on duplicates.
    std::sort(pairs.begin(), pairs.end());
    CandidateBest cb = sweep_direction(pairs, min_leaf);
    DirectionResult out;
    if (cb.valid) {
      out.valid = true;
      out.gain = cb.gain;
      out.threshold_idx = cb.threshold_idx;
      rule.c = cb.c;
      out.rule = std::move(rule);
    }
    return out;
  }

  int dim() const { return p_; }

 private:
  const LatticeField& field_;
  int p_;
  std::vector<double> coords_;
  std::vector<double> w_;
};

// Deterministic argmax: higher gain wins, ties go to the lower candidate id,
// then the lower threshold index.
bool better(const DirectionResult& a, Index a_id, const DirectionResult& b, Index b_id) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.gain != b.gain) return a.gain > b.gain;
  if (a_id != b_id) return a_id < b_id;
  return a.threshold_idx < b.threshold_idx;
}

}  // namespace

std::optional<ScoredSplit> best_split(const LatticeField& field, const PointSet& node,
                                      const TreeConfig& cfg, int node_id) {
  const Index m = node.size();
  if (m < 2 * static_cast<Index>(cfg.min_leaf) || m < 2) return std::nullopt;

  SplitSearcher searcher(field, node);
  const int p = field.dim();
  const int n_dirs = cfg.resolved_dirs(p);
  const CounterRng rng(CounterRng::derive(cfg.seed, static_cast<std::uint64_t>(node_id)));

  // Stages (a) and (b): axis-aligned sweeps plus sampled unit directions.
  const Index n_candidates = p + n_dirs;
  std::vector<DirectionResult> results(static_cast<std::size_t>(n_candidates));
  parallel_tasks(n_candidates, [&](std::int64_t t) {
    std::vector<double> alpha(static_cast<std::size_t>(p), 0.0);
    if (t < p) {
      alpha[static_cast<std::size_t>(t)] = 1.0;
    } else {
      const std::uint64_t base = static_cast<std::uint64_t>(t - p) * static_cast<std::uint64_t>(p);
      double norm = 0.0;
      for (int j = 0; j < p; ++j) {
        alpha[static_cast<std::size_t>(j)] = rng.gaussian(base + static_cast<std::uint64_t>(j));
        norm += alpha[static_cast<std::size_t>(j)] * alpha[static_cast<std::size_t>(j)];
      }
      if (norm <= 0.0) alpha[0] = 1.0;
    }
    results[static_cast<std::size_t>(t)] = searcher.evaluate(std::move(alpha), cfg.min_leaf);
  });

  DirectionResult best;
  Index best_id = 0;
  for (Index t = 0; t < n_candidates; ++t) {
    if (better(results[static_cast<std::size_t>(t)], t, best, best_id)) {
      best = results[static_cast<std::size_t>(t)];
      best_id = t;
    }
  }
  if (!best.valid) return std::nullopt;

  // Stage (c): coordinate-wise refinement of the best direction, perturbation
  // scale halving each round from 0.5.
  double scale = 0.5;
  for (int round = 0; round < cfg.refine_steps; ++round, scale *= 0.5) {
    const Index n_ref = 2 * static_cast<Index>(p);
    std::vector<DirectionResult> ref(static_cast<std::size_t>(n_ref));
    const std::vector<double> center = best.rule.alpha;
    parallel_tasks(n_ref, [&](std::int64_t t) {
      std::vector<double> alpha = center;
      const int j = static_cast<int>(t / 2);
      const double s = (t % 2 == 0) ? scale : -scale;
      alpha[static_cast<std::size_t>(j)] += s;
      double norm = 0.0;
      for (double a : alpha) norm += a * a;
      if (norm <= 1e-24) return;  // degenerate perturbation, leave invalid
      ref[static_cast<std::size_t>(t)] = searcher.evaluate(std::move(alpha), cfg.min_leaf);
    });
    DirectionResult round_best;
    Index round_id = 0;
    for (Index t = 0; t < n_ref; ++t) {
      if (better(ref[static_cast<std::size_t>(t)], t, round_best, round_id)) {
        round_best = ref[static_cast<std::size_t>(t)];
        round_id = t;
      }
    }
    // Strict improvement keeps the earliest (stage, candidate) winner on ties.
    if (round_best.valid && round_best.gain > best.gain) best = std::move(round_best);
  }

  return ScoredSplit{std::move(best.rule), best.gain};
}

LeafPartition::LeafPartition(std::vector<std::int32_t> leaf_id, std::vector<NodeStats> leaf_stats,
                             std::vector<SplitRecord> split_log)
    : leaf_id_(std::move(leaf_id)),
      leaf_stats_(std::move(leaf_stats)),
      split_log_(std::move(split_log)) {
  const std::int32_t k = leaf_count();
  member_offsets_.assign(static_cast<std::size_t>(k) + 1, 0);
  for (std::int32_t id : leaf_id_) member_offsets_[static_cast<std::size_t>(id) + 1]++;
  for (std::size_t i = 1; i < member_offsets_.size(); ++i) member_offsets_[i] += member_offsets_[i - 1];
  member_indices_.resize(leaf_id_.size());
  std::vector<Index> cursor(member_offsets_.begin(), member_offsets_.end() - 1);
  for (std::size_t i = 0; i < leaf_id_.size(); ++i) {
    member_indices_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(leaf_id_[i])]++)] =
        static_cast<Index>(i);
  }
}

std::int32_t LeafPartition::leaf_of(Index flat) const {
  if (flat < 0 || flat >= static_cast<Index>(leaf_id_.size())) {
    throw std::out_of_range("LeafPartition: index out of range");
  }
  return leaf_id_[static_cast<std::size_t>(flat)];
}

std::span<const Index> LeafPartition::members(std::int32_t leaf) const {
  const auto lo = member_offsets_[static_cast<std::size_t>(leaf)];
  const auto hi = member_offsets_[static_cast<std::size_t>(leaf) + 1];
  return {member_indices_.data() + lo, static_cast<std::size_t>(hi - lo)};
}

namespace {

struct FrontierNode {
  int id = 0;
  std::vector<Index> indices;
};

struct FrontierOrder {
  // Largest node first; equal sizes processed in id order.
  bool operator()(const FrontierNode& a, const FrontierNode& b) const {
    if (a.indices.size() != b.indices.size()) return a.indices.size() < b.indices.size();
    return a.id > b.id;
  }
};

}  // namespace

LeafPartition grow_tree(const LatticeField& field, const TreeConfig& cfg) {
  if (cfg.r_n <= 0.0) throw std::invalid_argument("TreeConfig: r_n must be positive");
  if (cfg.min_leaf < 1) throw std::invalid_argument("TreeConfig: min_leaf must be >= 1");
  if (cfg.max_leaves < 0) throw std::invalid_argument("TreeConfig: max_leaves must be >= 0");

  const int p = field.dim();
  std::priority_queue<FrontierNode, std::vector<FrontierNode>, FrontierOrder> frontier;
  {
    FrontierNode root;
    root.id = 0;
    root.indices = PointSet::all(field).indices;
    frontier.push(std::move(root));
  }
  int next_id = 1;

  std::vector<SplitRecord> log;
  std::vector<std::vector<Index>> leaves;
  std::vector<double> z(static_cast<std::size_t>(p));

  while (!frontier.empty()) {
    FrontierNode node = frontier.top();
    frontier.pop();
    const Index m = static_cast<Index>(node.indices.size());

    const bool budget_left =
        cfg.max_leaves == 0 ||
        static_cast<int>(leaves.size() + frontier.size()) + 1 < cfg.max_leaves;

    std::optional<ScoredSplit> split;
    if (budget_left && m >= 2 * static_cast<Index>(cfg.min_leaf)) {
      PointSet ps{std::move(node.indices)};
      split = best_split(field, ps, cfg, node.id);
      node.indices = std::move(ps.indices);
      if (split && split->gain <= split_threshold(cfg, m)) split.reset();
    }

    if (!split) {
      leaves.push_back(std::move(node.indices));
      continue;
    }

    std::vector<Index> left, right;
    left.reserve(node.indices.size());
    right.reserve(node.indices.size());
    for (Index i : node.indices) {
      field.coord(i, z);
      (split->rule.goes_left(z) ? left : right).push_back(i);
    }
    log.push_back(SplitRecord{node.id, split->rule, split->gain});
    FrontierNode l{next_id++, std::move(left)};
    FrontierNode r{next_id++, std::move(right)};
    frontier.push(std::move(l));
    frontier.push(std::move(r));
  }

  std::vector<std::int32_t> leaf_id(static_cast<std::size_t>(field.size()), -1);
  std::vector<NodeStats> stats(leaves.size());
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    for (Index i : leaves[l]) {
      leaf_id[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(l);
      stats[l].add(field[i]);
    }
  }
  return LeafPartition(std::move(leaf_id), std::move(stats), std::move(log));
}

std::string format_split_log(const LeafPartition& partition) {
  std::string out;
  char buf[64];
  for (const SplitRecord& rec : partition.split_log()) {
    std::snprintf(buf, sizeof(buf), "%d", rec.node_id);
    out += buf;
    for (double a : rec.rule.alpha) {
      std::snprintf(buf, sizeof(buf), " %.17g", a);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), " %.17g %.17g\n", rec.rule.c, rec.gain);
    out += buf;
  }
  return out;
}

}  // namespace ort

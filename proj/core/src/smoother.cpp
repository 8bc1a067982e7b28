#include "ort/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ort/parallel.hpp"

namespace ort {

namespace {

int reference_n(const LatticeField& field) {
  int n = 1;
  for (int d : field.dims()) n = std::max(n, d);
  return n;
}

std::vector<int> patch_radii(const LatticeField& field, double h_n) {
  std::vector<int> r(static_cast<std::size_t>(field.dim()));
  for (int j = 0; j < field.dim(); ++j) {
    // The epsilon absorbs representation error in h_n = k/n so that exact
    // multiples keep their full radius (0.03 * 100 evaluates below 3).
    const double t = h_n * field.dims()[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(j)] = std::max(0, static_cast<int>(std::floor(t + 1e-6)));
  }
  return r;
}

// Sliding-window sum of length 2r+1 along one axis, boundary-clipped.
// Each 1-D line is processed independently; outputs go to distinct slots.
void axis_boxsum(const std::vector<int>& dims, const std::vector<Index>& strides, int axis, int r,
                 const std::vector<double>& in, std::vector<double>& out) {
  const int n = dims[static_cast<std::size_t>(axis)];
  const Index stride = strides[static_cast<std::size_t>(axis)];
  const Index total = static_cast<Index>(in.size());
  const Index n_lines = total / n;
  parallel_for(n_lines, [&](Index lo, Index hi) {
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1);
    for (Index line = lo; line < hi; ++line) {
      // Base offset of this line: positions with axis index 0.
      const Index block = line / stride;
      const Index within = line % stride;
      const Index base = block * stride * n + within;
      prefix[0] = 0.0;
      for (int k = 0; k < n; ++k) {
        prefix[static_cast<std::size_t>(k) + 1] =
            prefix[static_cast<std::size_t>(k)] + in[static_cast<std::size_t>(base + k * stride)];
      }
      for (int k = 0; k < n; ++k) {
        const int a = std::max(0, k - r);
        const int b = std::min(n - 1, k + r);
        out[static_cast<std::size_t>(base + k * stride)] =
            prefix[static_cast<std::size_t>(b) + 1] - prefix[static_cast<std::size_t>(a)];
      }
    }
  });
}

std::vector<Index> make_strides(const std::vector<int>& dims) {
  std::vector<Index> strides(dims.size(), 1);
  for (int j = static_cast<int>(dims.size()) - 2; j >= 0; --j) {
    strides[static_cast<std::size_t>(j)] =
        strides[static_cast<std::size_t>(j) + 1] * dims[static_cast<std::size_t>(j) + 1];
  }
  return strides;
}

void window_boxsum(const std::vector<int>& dims, const std::vector<Index>& strides,
                   const std::vector<int>& radii, std::vector<double>& buf,
                   std::vector<double>& scratch) {
  for (std::size_t j = 0; j < dims.size(); ++j) {
    axis_boxsum(dims, strides, static_cast<int>(j), radii[j], buf, scratch);
    std::swap(buf, scratch);
  }
}

// Enumerates all displacement vectors in prod([-r_j, r_j]).
std::vector<std::vector<int>> displacements(const std::vector<int>& radii) {
  std::vector<std::vector<int>> out;
  std::vector<int> d(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) d[j] = -radii[j];
  for (;;) {
    out.push_back(d);
    std::size_t j = radii.size();
    while (j > 0) {
      --j;
      if (d[j] < radii[j]) {
        ++d[j];
        break;
      }
      d[j] = -radii[j];
      if (j == 0) return out;
    }
    if (radii.empty()) return out;
  }
}

// Leaf-gated window mean: plain average of same-leaf values in the
// neighborhood (the kappa -> 0 limit of the weighted estimator).
std::vector<double> pilot_estimate(const LatticeField& field, const LeafPartition& partition,
                                   const std::vector<int>& radii) {
  const auto& dims = field.dims();
  const int p = field.dim();
  const auto strides = make_strides(dims);
  const auto w = field.values();
  const auto leaf = partition.leaf_ids();
  std::vector<double> out(static_cast<std::size_t>(field.size()));
  std::vector<int> r = radii;
  parallel_for(field.size(), [&](Index lo, Index hi) {
    std::vector<int> mi(static_cast<std::size_t>(p));
    std::vector<int> off(static_cast<std::size_t>(p));
    for (Index i = lo; i < hi; ++i) {
      Index rest = i;
      for (int j = 0; j < p; ++j) {
        mi[static_cast<std::size_t>(j)] = static_cast<int>(rest / strides[static_cast<std::size_t>(j)]);
        rest %= strides[static_cast<std::size_t>(j)];
      }
      for (int j = 0; j < p; ++j) off[static_cast<std::size_t>(j)] = -r[static_cast<std::size_t>(j)];
      double sum = 0.0;
      Index cnt = 0;
      for (;;) {
        Index u = 0;
        bool ok = true;
        for (int j = 0; j < p; ++j) {
          const int k = mi[static_cast<std::size_t>(j)] + off[static_cast<std::size_t>(j)];
          if (k < 0 || k >= dims[static_cast<std::size_t>(j)]) {
            ok = false;
            break;
          }
          u += static_cast<Index>(k) * strides[static_cast<std::size_t>(j)];
        }
        if (ok && leaf[static_cast<std::size_t>(u)] == leaf[static_cast<std::size_t>(i)]) {
          sum += w[static_cast<std::size_t>(u)];
          ++cnt;
        }
        int j = p;
        bool done = false;
        while (j > 0) {
          --j;
          if (off[static_cast<std::size_t>(j)] < r[static_cast<std::size_t>(j)]) {
            ++off[static_cast<std::size_t>(j)];
            break;
          }
          off[static_cast<std::size_t>(j)] = -r[static_cast<std::size_t>(j)];
          if (j == 0) done = true;
        }
        if (done) break;
      }
      out[static_cast<std::size_t>(i)] = sum / static_cast<double>(cnt);
    }
  });
  return out;
}

}  // namespace

LatticeField leaf_mean_estimate(const LatticeField& field, const LeafPartition& partition) {
  if (static_cast<Index>(partition.leaf_ids().size()) != field.size()) {
    throw std::invalid_argument("leaf_mean_estimate: partition does not match field");
  }
  std::vector<double> out(static_cast<std::size_t>(field.size()));
  const auto leaf = partition.leaf_ids();
  parallel_for(field.size(), [&](Index lo, Index hi) {
    for (Index i = lo; i < hi; ++i) {
      out[static_cast<std::size_t>(i)] = partition.stats(leaf[static_cast<std::size_t>(i)]).mean();
    }
  });
  return LatticeField(std::vector<int>(field.dims()), std::move(out));
}

PointSet neighborhood(const LatticeField& field, Index center, double h_n) {
  if (h_n <= 0.0) throw std::invalid_argument("neighborhood: h_n must be positive");
  if (center < 0 || center >= field.size()) throw std::out_of_range("neighborhood: bad center");
  const int p = field.dim();
  const auto radii = patch_radii(field, h_n);
  std::vector<int> mi(static_cast<std::size_t>(p));
  field.multi_index(center, mi);

  std::vector<int> lo(static_cast<std::size_t>(p)), hi(static_cast<std::size_t>(p)),
      cur(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    lo[static_cast<std::size_t>(j)] = std::max(1, mi[static_cast<std::size_t>(j)] - radii[static_cast<std::size_t>(j)]);
    hi[static_cast<std::size_t>(j)] =
        std::min(field.dims()[static_cast<std::size_t>(j)],
                 mi[static_cast<std::size_t>(j)] + radii[static_cast<std::size_t>(j)]);
    cur[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)];
  }
  PointSet out;
  for (;;) {
    out.indices.push_back(field.flatten(cur));
    int j = p;
    bool done = false;
    while (j > 0) {
      --j;
      if (cur[static_cast<std::size_t>(j)] < hi[static_cast<std::size_t>(j)]) {
        ++cur[static_cast<std::size_t>(j)];
        break;
      }
      cur[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)];
      if (j == 0) done = true;
    }
    if (done) break;
  }
  // Lexicographic multi-index enumeration emits ascending flat indices.
  return out;
}

double similarity_score(const LatticeField& field, Index a, Index b, double h_n, double kappa_n,
                        double compensate_sigma) {
  if (a < 0 || a >= field.size() || b < 0 || b >= field.size()) {
    throw std::out_of_range("similarity_score: bad index");
  }
  const int p = field.dim();
  const auto radii = patch_radii(field, h_n);
  std::vector<int> ma(static_cast<std::size_t>(p)), mb(static_cast<std::size_t>(p)),
      off(static_cast<std::size_t>(p));
  field.multi_index(a, ma);
  field.multi_index(b, mb);
  for (int j = 0; j < p; ++j) off[static_cast<std::size_t>(j)] = -radii[static_cast<std::size_t>(j)];

  double d2 = 0.0;
  Index cnt = 0;
  std::vector<int> ua(static_cast<std::size_t>(p)), ub(static_cast<std::size_t>(p));
  for (;;) {
    bool ok = true;
    for (int j = 0; j < p; ++j) {
      ua[static_cast<std::size_t>(j)] = ma[static_cast<std::size_t>(j)] + off[static_cast<std::size_t>(j)];
      ub[static_cast<std::size_t>(j)] = mb[static_cast<std::size_t>(j)] + off[static_cast<std::size_t>(j)];
      if (ua[static_cast<std::size_t>(j)] < 1 || ua[static_cast<std::size_t>(j)] > field.dims()[static_cast<std::size_t>(j)] ||
          ub[static_cast<std::size_t>(j)] < 1 || ub[static_cast<std::size_t>(j)] > field.dims()[static_cast<std::size_t>(j)]) {
        ok = false;
        break;
      }
    }
    if (ok) {
      const double diff = field[field.flatten(ua)] - field[field.flatten(ub)];
      d2 += diff * diff;
      ++cnt;
    }
    int j = p;
    bool done = false;
    while (j > 0) {
      --j;
      if (off[static_cast<std::size_t>(j)] < radii[static_cast<std::size_t>(j)]) {
        ++off[static_cast<std::size_t>(j)];
        break;
      }
      off[static_cast<std::size_t>(j)] = -radii[static_cast<std::size_t>(j)];
      if (j == 0) done = true;
    }
    if (done) break;
  }
  if (a == b) return 1.0;
  if (compensate_sigma > 0.0) {
    d2 = std::max(0.0, d2 - 2.0 * compensate_sigma * compensate_sigma * static_cast<double>(cnt));
  }
  const double nh = reference_n(field) * h_n;
  return std::exp(-kappa_n * d2 / (nh * nh));
}

LatticeField local_weighted_estimate(const LatticeField& field, const LeafPartition& partition,
                                     const SmootherConfig& cfg) {
  if (static_cast<Index>(partition.leaf_ids().size()) != field.size()) {
    throw std::invalid_argument("local_weighted_estimate: partition does not match field");
  }
  const int p = field.dim();
  const auto& dims = field.dims();
  const auto strides = make_strides(dims);
  const double h_n = cfg.h_n > 0.0 ? cfg.h_n : 3.0 / reference_n(field);
  if (cfg.kappa_n <= 0.0) throw std::invalid_argument("SmootherConfig: kappa_n must be positive");
  const auto radii = patch_radii(field, h_n);
  const double nh = reference_n(field) * h_n;
  const double inv_scale = cfg.kappa_n / (nh * nh);
  const double sigma = cfg.sigma.value_or(0.0);

  const auto w = field.values();
  const auto leaf = partition.leaf_ids();
  const Index total = field.size();

  std::vector<double> patches;
  if (cfg.patch_source == PatchSource::pilot) {
    patches = pilot_estimate(field, partition, radii);
  } else {
    patches.assign(w.begin(), w.end());
  }
  const bool compensate =
      cfg.patch_source == PatchSource::raw && cfg.compensate_noise && sigma > 0.0;

  std::vector<double> num(static_cast<std::size_t>(total), 0.0);
  std::vector<double> den(static_cast<std::size_t>(total), 0.0);
  std::vector<double> ed(static_cast<std::size_t>(total));
  std::vector<double> scratch(static_cast<std::size_t>(total));
  std::vector<double> ones, cnt;
  if (compensate) {
    ones.resize(static_cast<std::size_t>(total));
    cnt.resize(static_cast<std::size_t>(total));
  }

  // Displacement-major evaluation: for displacement d, the common-offset
  // patch distance between x and x+d is a window sum of the shifted squared
  // difference image, which one separable box filter produces for every x at
  // once. Displacements run sequentially; pixels are parallel within each.
  for (const auto& d : displacements(radii)) {
    Index shift = 0;
    for (int j = 0; j < p; ++j) shift += static_cast<Index>(d[static_cast<std::size_t>(j)]) * strides[static_cast<std::size_t>(j)];
    // Valid y range per axis for y and y+d in bounds.
    std::vector<int> ylo(static_cast<std::size_t>(p)), yhi(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
      ylo[static_cast<std::size_t>(j)] = std::max(0, -d[static_cast<std::size_t>(j)]);
      yhi[static_cast<std::size_t>(j)] =
          std::min(dims[static_cast<std::size_t>(j)], dims[static_cast<std::size_t>(j)] - d[static_cast<std::size_t>(j)]) - 1;
    }
    std::fill(ed.begin(), ed.end(), 0.0);
    if (compensate) std::fill(ones.begin(), ones.end(), 0.0);
    parallel_for(total, [&](Index lo_i, Index hi_i) {
      std::vector<int> mi(static_cast<std::size_t>(p));
      for (Index y = lo_i; y < hi_i; ++y) {
        Index rest = y;
        bool ok = true;
        for (int j = 0; j < p; ++j) {
          const int k = static_cast<int>(rest / strides[static_cast<std::size_t>(j)]);
          rest %= strides[static_cast<std::size_t>(j)];
          if (k < ylo[static_cast<std::size_t>(j)] || k > yhi[static_cast<std::size_t>(j)]) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        const double diff = patches[static_cast<std::size_t>(y + shift)] - patches[static_cast<std::size_t>(y)];
        ed[static_cast<std::size_t>(y)] = diff * diff;
        if (compensate) ones[static_cast<std::size_t>(y)] = 1.0;
      }
    });
    window_boxsum(dims, strides, radii, ed, scratch);
    if (compensate) {
      cnt = ones;
      window_boxsum(dims, strides, radii, cnt, scratch);
    }

    // Accumulate weights for x with x+d in bounds and in the same leaf.
    parallel_for(total, [&](Index lo_i, Index hi_i) {
      for (Index x = lo_i; x < hi_i; ++x) {
        Index rest = x;
        bool ok = true;
        for (int j = 0; j < p; ++j) {
          const int k = static_cast<int>(rest / strides[static_cast<std::size_t>(j)]);
          rest %= strides[static_cast<std::size_t>(j)];
          if (k < ylo[static_cast<std::size_t>(j)] || k > yhi[static_cast<std::size_t>(j)]) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        const Index u = x + shift;
        if (leaf[static_cast<std::size_t>(u)] != leaf[static_cast<std::size_t>(x)]) continue;
        double d2 = ed[static_cast<std::size_t>(x)];
        if (compensate) {
          d2 = std::max(0.0, d2 - 2.0 * sigma * sigma * cnt[static_cast<std::size_t>(x)]);
        }
        const double ss = (shift == 0) ? 1.0 : std::exp(-inv_scale * d2);
        num[static_cast<std::size_t>(x)] += ss * w[static_cast<std::size_t>(u)];
        den[static_cast<std::size_t>(x)] += ss;
      }
    });
  }

  std::vector<double> out(static_cast<std::size_t>(total));
  parallel_for(total, [&](Index lo_i, Index hi_i) {
    for (Index i = lo_i; i < hi_i; ++i) {
      out[static_cast<std::size_t>(i)] = num[static_cast<std::size_t>(i)] / den[static_cast<std::size_t>(i)];
    }
  });
  return LatticeField(std::vector<int>(dims), std::move(out));
}

double estimate_sigma(const LatticeField& field) {
  int axis = -1;
  for (int j = 0; j < field.dim(); ++j) {
    if (field.dims()[static_cast<std::size_t>(j)] >= 2) {
      axis = j;
      break;
    }
  }
  if (axis < 0) throw std::invalid_argument("estimate_sigma: field has no axis with >= 2 points");

  const auto& dims = field.dims();
  const auto strides = make_strides(dims);
  const Index stride = strides[static_cast<std::size_t>(axis)];
  const int n = dims[static_cast<std::size_t>(axis)];
  const auto w = field.values();

  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(field.size() / n * (n - 1)));
  const Index n_lines = field.size() / n;
  for (Index line = 0; line < n_lines; ++line) {
    const Index block = line / stride;
    const Index within = line % stride;
    const Index base = block * stride * n + within;
    for (int k = 0; k + 1 < n; ++k) {
      diffs.push_back(std::abs(w[static_cast<std::size_t>(base + (k + 1) * stride)] -
                               w[static_cast<std::size_t>(base + k * stride)]));
    }
  }
  auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
  std::nth_element(diffs.begin(), mid, diffs.end());
  double med = *mid;
  if (diffs.size() % 2 == 0) {
    // Lower-half max completes the even-length median.
    const double lo = *std::max_element(diffs.begin(), mid);
    med = 0.5 * (med + lo);
  }
  const double sigma = med / (0.6745 * std::sqrt(2.0));
  return std::max(sigma, 1e-6);
}

DenoiseResult denoise(const LatticeField& field, const SmootherConfig& cfg) {
  if (cfg.h_n > 0.5) throw std::invalid_argument("SmootherConfig: h_n must be in (0, 0.5]");
  SmootherConfig resolved = cfg;
  const double sigma = cfg.sigma ? *cfg.sigma : estimate_sigma(field);
  resolved.sigma = sigma;
  resolved.h_n = cfg.h_n > 0.0 ? cfg.h_n : 3.0 / reference_n(field);
  const double r_n = cfg.r_n > 0.0 ? cfg.r_n : 1e-4 * sigma * sigma;

  TreeConfig tree_cfg = cfg.tree;
  tree_cfg.r_n = r_n;
  tree_cfg.noise_sigma = cfg.adaptive_split ? sigma : 0.0;

  LeafPartition partition = grow_tree(field, tree_cfg);
  LatticeField estimate = (cfg.estimator == EstimatorKind::leaf_mean)
                              ? leaf_mean_estimate(field, partition)
                              : local_weighted_estimate(field, partition, resolved);
  return DenoiseResult{std::move(estimate), std::move(partition), sigma, r_n, resolved.h_n};
}

}  // namespace ort

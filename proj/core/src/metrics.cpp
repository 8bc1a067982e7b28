#include "ort/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ort/parallel.hpp"

namespace ort {

namespace {

void check_dims(const LatticeField& a, const LatticeField& b, const char* who) {
  if (a.dims() != b.dims()) throw std::invalid_argument(std::string(who) + ": dims mismatch");
}

double summed_sq_error(const LatticeField& est, const LatticeField& truth) {
  double s = 0.0;
  const auto a = est.values();
  const auto b = truth.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

double remse(std::span<const LatticeField> estimates, const LatticeField& truth) {
  if (estimates.empty()) throw std::invalid_argument("remse: no replications");
  double mean = 0.0;
  for (const LatticeField& est : estimates) {
    check_dims(est, truth, "remse");
    mean += summed_sq_error(est, truth);
  }
  return std::sqrt(mean / static_cast<double>(estimates.size()));
}

double rmse(std::span<const LatticeField> estimates, const LatticeField& truth) {
  if (estimates.empty()) throw std::invalid_argument("rmse: no replications");
  double mean = 0.0;
  for (const LatticeField& est : estimates) {
    check_dims(est, truth, "rmse");
    mean += summed_sq_error(est, truth) / static_cast<double>(truth.size());
  }
  return std::sqrt(mean / static_cast<double>(estimates.size()));
}

double psnr(const LatticeField& estimate, const LatticeField& truth, double peak) {
  check_dims(estimate, truth, "psnr");
  const double mse = summed_sq_error(estimate, truth) / static_cast<double>(truth.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

EdgeSet detect_edges(const LatticeField& field, int bandwidth, double threshold) {
  if (field.dim() != 2) throw std::invalid_argument("detect_edges: only 2-D fields supported");
  if (bandwidth < 1) throw std::invalid_argument("detect_edges: bandwidth must be >= 1");
  const int h = field.dims()[0];
  const int w = field.dims()[1];
  const int b = bandwidth;
  if (h < 2 * b + 1 || w < 2 * b + 1) {
    throw std::invalid_argument("detect_edges: field smaller than the fit window");
  }
  const auto v = field.values();

  // Least-squares plane over the symmetric window: the slope along an axis is
  // sum(offset * value) / sum(offset^2), the cross terms vanish.
  double s2 = 0.0;
  for (int t = -b; t <= b; ++t) s2 += static_cast<double>(t) * t;
  s2 *= (2 * b + 1);

  const int ih = h - 2 * b;
  const int iw = w - 2 * b;
  std::vector<double> grad(static_cast<std::size_t>(ih) * iw);
  parallel_for(static_cast<Index>(ih) * iw, [&](Index lo, Index hi_) {
    for (Index t = lo; t < hi_; ++t) {
      const int i = static_cast<int>(t / iw) + b;
      const int j = static_cast<int>(t % iw) + b;
      double gx = 0.0, gy = 0.0;
      for (int di = -b; di <= b; ++di) {
        for (int dj = -b; dj <= b; ++dj) {
          const double z = v[static_cast<std::size_t>((i + di) * w + (j + dj))];
          gx += di * z;
          gy += dj * z;
        }
      }
      // Slopes converted to domain units (coordinate step 1/n per axis).
      gx = gx / s2 * h;
      gy = gy / s2 * w;
      grad[static_cast<std::size_t>(t)] = std::sqrt(gx * gx + gy * gy);
    }
  });

  double thr = threshold;
  if (threshold < 0.0) {
    double mean = 0.0;
    for (double g : grad) mean += g;
    mean /= static_cast<double>(grad.size());
    double var = 0.0;
    for (double g : grad) var += (g - mean) * (g - mean);
    var /= static_cast<double>(grad.size());
    thr = mean + 2.0 * std::sqrt(var);
  }

  EdgeSet out;
  for (Index t = 0; t < static_cast<Index>(grad.size()); ++t) {
    if (grad[static_cast<std::size_t>(t)] > thr) {
      const int i = static_cast<int>(t / iw) + b;
      const int j = static_cast<int>(t % iw) + b;
      out.points.push_back({static_cast<double>(i + 1) / h, static_cast<double>(j + 1) / w});
    }
  }
  return out;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

// Uniform-grid nearest-neighbor index for 2-D point sets; exact distances,
// expanding-ring search.
class Grid2d {
 public:
  explicit Grid2d(const std::vector<std::vector<double>>& pts) : pts_(pts) {
    lo_ = {pts[0][0], pts[0][1]};
    hi_ = lo_;
    for (const auto& p : pts) {
      lo_[0] = std::min(lo_[0], p[0]);
      lo_[1] = std::min(lo_[1], p[1]);
      hi_[0] = std::max(hi_[0], p[0]);
      hi_[1] = std::max(hi_[1], p[1]);
    }
    const double extent = std::max({hi_[0] - lo_[0], hi_[1] - lo_[1], 1e-12});
    ncell_ = std::max<int>(1, static_cast<int>(std::sqrt(static_cast<double>(pts.size()))));
    cell_ = extent / ncell_;
    buckets_.resize(static_cast<std::size_t>(ncell_) * ncell_);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      buckets_[bucket_of(pts[k])].push_back(k);
    }
  }

  double min_dist(std::span<const double> q) const {
    const int ci = clampi(static_cast<int>((q[0] - lo_[0]) / cell_));
    const int cj = clampi(static_cast<int>((q[1] - lo_[1]) / cell_));
    double best = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= 2 * ncell_; ++ring) {
      // Cells at Chebyshev distance `ring` from (ci, cj).
      for (int i = ci - ring; i <= ci + ring; ++i) {
        for (int j = cj - ring; j <= cj + ring; ++j) {
          if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
          if (i < 0 || j < 0 || i >= ncell_ || j >= ncell_) continue;
          for (std::size_t k : buckets_[static_cast<std::size_t>(i) * ncell_ + j]) {
            best = std::min(best, sq_dist(q, pts_[k]));
          }
        }
      }
      // Every unvisited cell is at least ring*cell_ away from the query.
      if (std::isfinite(best) && static_cast<double>(ring) * cell_ >= std::sqrt(best)) break;
    }
    return std::sqrt(best);
  }

 private:
  int clampi(int k) const { return std::clamp(k, 0, ncell_ - 1); }
  std::size_t bucket_of(const std::vector<double>& p) const {
    const int i = clampi(static_cast<int>((p[0] - lo_[0]) / cell_));
    const int j = clampi(static_cast<int>((p[1] - lo_[1]) / cell_));
    return static_cast<std::size_t>(i) * ncell_ + j;
  }

  const std::vector<std::vector<double>>& pts_;
  std::array<double, 2> lo_{}, hi_{};
  int ncell_ = 1;
  double cell_ = 1.0;
  std::vector<std::vector<std::size_t>> buckets_;
};

double directed_mean(const EdgeSet& from, const EdgeSet& to) {
  const std::size_t p = from.points[0].size();
  std::vector<double> mins(from.points.size());
  if (p == 2 && to.points.size() > 64) {
    Grid2d grid(to.points);
    parallel_for(static_cast<Index>(from.points.size()), [&](Index lo, Index hi) {
      for (Index k = lo; k < hi; ++k) {
        mins[static_cast<std::size_t>(k)] = grid.min_dist(from.points[static_cast<std::size_t>(k)]);
      }
    });
  } else {
    parallel_for(static_cast<Index>(from.points.size()), [&](Index lo, Index hi) {
      for (Index k = lo; k < hi; ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : to.points) {
          best = std::min(best, sq_dist(from.points[static_cast<std::size_t>(k)], q));
        }
        mins[static_cast<std::size_t>(k)] = std::sqrt(best);
      }
    });
  }
  double s = 0.0;
  for (double d : mins) s += d;
  return s / static_cast<double>(mins.size());
}

}  // namespace

double d_kq(const EdgeSet& detected, const EdgeSet& reference) {
  if (detected.empty() || reference.empty()) {
    throw std::invalid_argument("d_kq: undefined for empty edge sets");
  }
  if (detected.points[0].size() != reference.points[0].size()) {
    throw std::invalid_argument("d_kq: dimension mismatch");
  }
  return 0.5 * directed_mean(detected, reference) + 0.5 * directed_mean(reference, detected);
}

}  // namespace ort

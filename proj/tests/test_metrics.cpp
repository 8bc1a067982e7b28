#include "ort/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <limits>
#include <vector>

#include "doctest.h"
#include "ort/rng.hpp"
#include "ort/synth.hpp"

using namespace ort;

TEST_CASE("remse and rmse formulas") {
  LatticeField truth({2, 2}, {0.0, 0.0, 0.0, 0.0});
  LatticeField same = truth;
  CHECK(remse(same, truth) == doctest::Approx(0.0));

  LatticeField est({2, 2}, {0.1, 0.0, 0.0, 0.0});
  CHECK(remse(est, truth) == doctest::Approx(0.1));
  CHECK(rmse(est, truth) == doctest::Approx(0.05));

  // Two replications with summed squared errors 0.01 and 0.03.
  LatticeField est2({2, 2}, {0.1, 0.1, 0.1, 0.0});
  std::vector<LatticeField> reps = {est, est2};
  CHECK(remse(reps, truth) == doctest::Approx(std::sqrt(0.02)));

  LatticeField other({2, 3}, std::vector<double>(6, 0.0));
  CHECK_THROWS_AS(remse(other, truth), std::invalid_argument);
}

TEST_CASE("remse of raw noise approximates sigma * sqrt(N)") {
  const double sigma = 0.25;
  auto truth = LatticeField::constant({128, 128}, 0.0);
  std::vector<LatticeField> reps;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    reps.push_back(add_noise(truth, {sigma, seed}));
  }
  const double expected = sigma * 128.0;
  const double got = remse(reps, truth);
  CHECK(got > 0.95 * expected);
  CHECK(got < 1.05 * expected);
}

TEST_CASE("psnr formulas") {
  auto truth = LatticeField::constant({10, 10}, 0.5);
  std::vector<double> v(100, 0.5);
  for (auto& x : v) x += std::sqrt(1e-3);
  LatticeField est({10, 10}, std::move(v));
  CHECK(psnr(est, truth) == doctest::Approx(30.0));
  CHECK(psnr(est, truth, 2.0) - psnr(est, truth) == doctest::Approx(20.0 * std::log10(2.0)));

  std::vector<double> unit(100, 0.5 + 1.0);
  LatticeField offset({10, 10}, std::move(unit));
  CHECK(psnr(offset, truth, 1.0) == doctest::Approx(0.0));

  CHECK(psnr(truth, truth) == std::numeric_limits<double>::infinity());
}

TEST_CASE("edge detection on flat, step, and triangle fields") {
  auto flat = LatticeField::constant({32, 32}, 0.4);
  // Auto mode on a constant field flags nothing (all gradients are zero, the
  // threshold is zero, and comparisons are strict).
  CHECK(detect_edges_auto(flat).empty());

  // Vertical step: flags concentrate within bandwidth+...2 columns of the
  // jump, verified against the analytic column of the step.
  const int n = 64;
  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = n / 2; j < n; ++j) v[static_cast<std::size_t>(i) * n + j] = 1.0;
  }
  LatticeField step({n, n}, std::move(v));
  auto edges = detect_edges_auto(step, 2);
  CHECK_FALSE(edges.empty());
  const double step_col = (static_cast<double>(n / 2) + 0.5) / n;
  for (const auto& pt : edges.points) {
    CHECK(std::abs(pt[1] - step_col) <= 2.5 / n);
  }

  // Triangle: flagged pixels stay within Chebyshev distance 2 px of the
  // analytic boundary.
  auto spec = triangle_spec();
  auto tri = render(spec, {100, 100});
  auto tri_edges = detect_edges_auto(tri, 2);
  CHECK_FALSE(tri_edges.empty());
  auto near_boundary = [&](double x, double y) {
    // A point is near the boundary if a 2px-radius Chebyshev box crosses it.
    const double r = 2.0 / 100.0 + 1e-9;
    bool any_in = false, any_out = false;
    for (int a = -1; a <= 1; ++a) {
      for (int b = -1; b <= 1; ++b) {
        const std::vector<double> q = {x + r * a, y + r * b};
        (spec.region_of(q) == 0 ? any_in : any_out) = true;
      }
    }
    return any_in && any_out;
  };
  for (const auto& pt : tri_edges.points) {
    CHECK(near_boundary(pt[0], pt[1]));
  }

  CHECK_THROWS_AS(detect_edges(LatticeField::constant({4, 4, 4}, 0.0), 2, -1.0),
                  std::invalid_argument);
}

TEST_CASE("d_kq pinned examples") {
  EdgeSet a{{{0.0, 0.0}}};
  EdgeSet b{{{0.0, 0.3}}};
  CHECK(d_kq(a, a) == doctest::Approx(0.0));
  CHECK(d_kq(a, b) == doctest::Approx(0.3));

  EdgeSet c{{{0.0, 0.0}, {0.0, 0.4}}};
  EdgeSet d{{{0.0, 0.0}}};
  CHECK(d_kq(c, d) == doctest::Approx(0.1));

  EdgeSet empty;
  CHECK_THROWS_AS(d_kq(empty, a), std::invalid_argument);
  CHECK_THROWS_AS(d_kq(a, empty), std::invalid_argument);
}

TEST_CASE("d_kq is symmetric and matches brute force") {
  SequentialRng rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    EdgeSet a, b;
    const int na = 2 + static_cast<int>(rng.below(198));
    const int nb = 2 + static_cast<int>(rng.below(198));
    for (int k = 0; k < na; ++k) a.points.push_back({rng.uniform01(), rng.uniform01()});
    for (int k = 0; k < nb; ++k) b.points.push_back({rng.uniform01(), rng.uniform01()});

    // Brute-force oracle.
    auto directed = [](const EdgeSet& from, const EdgeSet& to) {
      double sum = 0.0;
      for (const auto& p : from.points) {
        double best = 1e300;
        for (const auto& q : to.points) {
          const double dx = p[0] - q[0];
          const double dy = p[1] - q[1];
          best = std::min(best, dx * dx + dy * dy);
        }
        sum += std::sqrt(best);
      }
      return sum / static_cast<double>(from.points.size());
    };
    const double oracle = 0.5 * directed(a, b) + 0.5 * directed(b, a);
    CHECK(std::abs(d_kq(a, b) - oracle) <= 1e-12);
    CHECK(d_kq(a, b) == doctest::Approx(d_kq(b, a)));
  }
}

TEST_CASE("d_kq grid index agrees with brute force on large sets") {
  SequentialRng rng(56);
  EdgeSet a, b;
  for (int k = 0; k < 3000; ++k) a.points.push_back({rng.uniform01(), rng.uniform01()});
  for (int k = 0; k < 2500; ++k) b.points.push_back({rng.uniform01(), rng.uniform01()});
  // Clustered tail to exercise uneven buckets.
  for (int k = 0; k < 500; ++k) {
    b.points.push_back({0.9 + 0.05 * rng.uniform01(), 0.9 + 0.05 * rng.uniform01()});
  }
  auto directed = [](const EdgeSet& from, const EdgeSet& to) {
    double sum = 0.0;
    for (const auto& p : from.points) {
      double best = 1e300;
      for (const auto& q : to.points) {
        const double dx = p[0] - q[0];
        const double dy = p[1] - q[1];
        best = std::min(best, dx * dx + dy * dy);
      }
      sum += std::sqrt(best);
    }
    return sum / static_cast<double>(from.points.size());
  };
  const double oracle = 0.5 * directed(a, b) + 0.5 * directed(b, a);
  CHECK(d_kq(a, b) == doctest::Approx(oracle).epsilon(1e-12));
}

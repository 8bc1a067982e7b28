#include "ort/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ort/rng.hpp"

using namespace ort;

TEST_CASE("index_to_coord on a 4x4 grid") {
  auto f = LatticeField::constant({4, 4}, 0.0);
  CHECK(f.coord(0) == std::vector<double>{0.25, 0.25});
  CHECK(f.coord(15) == std::vector<double>{1.0, 1.0});
}

TEST_CASE("index_to_coord hand-decoded on a 2x3 grid") {
  auto f = LatticeField::constant({2, 3}, 0.0);
  // Row-major index 4 = multi-index (2,2).
  auto c = f.coord(4);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("coord bounds errors") {
  auto f = LatticeField::constant({4, 4}, 0.0);
  CHECK_THROWS_AS(f.coord(16), std::out_of_range);
  CHECK_THROWS_AS(f.coord(-1), std::out_of_range);
  CHECK_THROWS_AS(f.at(16), std::out_of_range);
}

TEST_CASE("nearest index snaps and breaks ties low") {
  auto f = LatticeField::constant({4, 4}, 0.0);
  const std::vector<double> exact = {0.25, 0.25};
  CHECK(f.nearest_index(exact) == 0);
  const std::vector<double> corner = {0.0, 0.0};
  CHECK(f.nearest_index(corner) == 0);

  // Brute-force oracle over all 16 lattice points.
  const std::vector<double> q = {0.374, 0.51};
  Index best = 0;
  double best_d = 1e300;
  for (Index i = 0; i < 16; ++i) {
    auto c = f.coord(i);
    const double d = (c[0] - q[0]) * (c[0] - q[0]) + (c[1] - q[1]) * (c[1] - q[1]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  CHECK(f.nearest_index(q) == best);
  CHECK(f.coord(f.nearest_index(q)) == std::vector<double>{0.25, 0.5});

  const std::vector<double> outside = {1.2, 0.0};
  CHECK_THROWS_AS(f.nearest_index(outside), std::domain_error);
}

TEST_CASE("nearest index agrees with brute force on random queries") {
  auto f = LatticeField::constant({5, 3, 4}, 0.0);
  SequentialRng rng(42);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> q = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
    Index best = 0;
    double best_d = 1e300;
    for (Index i = 0; i < f.size(); ++i) {
      auto c = f.coord(i);
      double d = 0.0;
      for (int j = 0; j < 3; ++j) d += (c[j] - q[j]) * (c[j] - q[j]);
      if (d < best_d - 1e-15) {
        best_d = d;
        best = i;
      }
    }
    CHECK(f.nearest_index(q) == best);
  }
}

TEST_CASE("round trips") {
  auto f = LatticeField::constant({3, 5, 2}, 0.0);
  std::vector<int> mi(3);
  for (Index i = 0; i < f.size(); ++i) {
    f.multi_index(i, mi);
    CHECK(f.flatten(mi) == i);
    CHECK(f.nearest_index(f.coord(i)) == i);
  }
}

TEST_CASE("field invariants are validated") {
  CHECK_THROWS_AS(LatticeField({2, 2}, {1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(LatticeField({2, 0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(LatticeField({2}, {1.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(LatticeField({1}, {std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
}

TEST_CASE("point set validation") {
  auto f = LatticeField::constant({4, 4}, 0.0);
  CHECK(PointSet::all(f).size() == 16);
  CHECK_THROWS_AS(PointSet::from_indices({3, 3}, f), std::invalid_argument);
  CHECK_THROWS_AS(PointSet::from_indices({17}, f), std::out_of_range);
  CHECK(PointSet::from_indices({0, 5, 12}, f).size() == 3);
}

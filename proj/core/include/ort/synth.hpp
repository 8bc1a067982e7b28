#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ort/lattice.hpp"

namespace ort {

// Closed half-space a'x <= b.
struct HalfSpace {
  std::vector<double> normal;
  double offset = 0.0;

  bool contains(std::span<const double> x) const;
};

// Convex polytope as an intersection of half-spaces.
struct Polytope {
  std::vector<HalfSpace> faces;

  bool contains(std::span<const double> x) const;
};

// Smooth base surface shared by all regions.
struct BaseFunction {
  enum class Kind { zero, linear, quadratic };
  Kind kind = Kind::zero;
  // linear: coeffs = [c0, c1..cp], g = c0 + sum c_j x_j.
  // quadratic: coeffs = [c0, c1..cp, q1..qp], adds sum q_j x_j^2.
  std::vector<double> coeffs;

  double eval(std::span<const double> x) const;
};

// Piecewise-continuous surface: f(x) = g(x) + jump of the first region
// containing x, or background_jump when no region does. Region boundaries
// are closed (a'x = b counts as inside).
struct PiecewiseSpec {
  int dim = 2;
  BaseFunction base;
  double background_jump = 0.0;
  std::vector<Polytope> regions;
  std::vector<double> jumps;

  double eval(std::span<const double> x) const;
  // Index of the region owning x; -1 for background.
  int region_of(std::span<const double> x) const;
};

struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// Triangle phantom: vertices (0.2,0.2), (0.8,0.2), (0.5,0.8); value 1 inside,
// 0 outside.
PiecewiseSpec triangle_spec();

// 3-D phantom: tetrahedron with base triangle (0.2,0.2), (0.8,0.2), (0.5,0.8)
// on the plane z = 0.2 and apex (0.5,0.45,0.8); value 1 inside, 0 outside.
PiecewiseSpec tetrahedron_spec();

// Evaluates the spec at every lattice coordinate.
LatticeField render(const PiecewiseSpec& spec, std::vector<int> dims);

// Adds i.i.d. N(0, sigma^2) draws addressed per index, so the result is
// independent of evaluation order and identical for identical (field, seed).
LatticeField add_noise(const LatticeField& field, const NoiseModel& noise);

// Line-oriented spec files; grammar documented in the repository README:
//   dim P
//   base zero | base linear c0 c1..cp | base quadratic c0 c1..cp q1..qp
//   background DELTA0
//   region DELTA
//   halfspace a1 .. ap b
PiecewiseSpec parse_spec(std::istream& in);
PiecewiseSpec load_spec(const std::string& path);
std::string format_spec(const PiecewiseSpec& spec);

}  // namespace ort

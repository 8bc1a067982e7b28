#include "ort/synth.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ort/parallel.hpp"
#include "ort/rng.hpp"

namespace ort {

bool HalfSpace::contains(std::span<const double> x) const {
  double dot = 0.0;
  for (std::size_t j = 0; j < normal.size(); ++j) dot += normal[j] * x[j];
  return dot <= offset;
}

bool Polytope::contains(std::span<const double> x) const {
  for (const HalfSpace& h : faces) {
    if (!h.contains(x)) return false;
  }
  return true;
}

double BaseFunction::eval(std::span<const double> x) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::linear: {
      double v = coeffs.empty() ? 0.0 : coeffs[0];
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (j + 1 < coeffs.size()) v += coeffs[j + 1] * x[j];
      }
      return v;
    }
    case Kind::quadratic: {
      double v = coeffs.empty() ? 0.0 : coeffs[0];
      const std::size_t p = x.size();
      for (std::size_t j = 0; j < p; ++j) {
        if (j + 1 < coeffs.size()) v += coeffs[j + 1] * x[j];
        if (j + 1 + p < coeffs.size()) v += coeffs[j + 1 + p] * x[j] * x[j];
      }
      return v;
    }
  }
  return 0.0;
}

int PiecewiseSpec::region_of(std::span<const double> x) const {
  for (std::size_t l = 0; l < regions.size(); ++l) {
    if (regions[l].contains(x)) return static_cast<int>(l);
  }
  return -1;
}

double PiecewiseSpec::eval(std::span<const double> x) const {
  const int l = region_of(x);
  return base.eval(x) + (l >= 0 ? jumps[static_cast<std::size_t>(l)] : background_jump);
}

namespace {

// Half-space through points a,b oriented so that `inside` satisfies it (2-D).
HalfSpace edge_2d(std::array<double, 2> a, std::array<double, 2> b, std::array<double, 2> inside) {
  // Normal perpendicular to b-a.
  double nx = b[1] - a[1];
  double ny = -(b[0] - a[0]);
  double off = nx * a[0] + ny * a[1];
  if (nx * inside[0] + ny * inside[1] > off) {
    nx = -nx;
    ny = -ny;
    off = -off;
  }
  return HalfSpace{{nx, ny}, off};
}

// Plane through points a,b,c oriented so that `inside` satisfies it (3-D).
HalfSpace face_3d(std::array<double, 3> a, std::array<double, 3> b, std::array<double, 3> c,
                  std::array<double, 3> inside) {
  const std::array<double, 3> u = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const std::array<double, 3> v = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  std::array<double, 3> n = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                             u[0] * v[1] - u[1] * v[0]};
  double off = n[0] * a[0] + n[1] * a[1] + n[2] * a[2];
  if (n[0] * inside[0] + n[1] * inside[1] + n[2] * inside[2] > off) {
    for (double& x : n) x = -x;
    off = -off;
  }
  return HalfSpace{{n[0], n[1], n[2]}, off};
}

}  // namespace

PiecewiseSpec triangle_spec() {
  const std::array<double, 2> a = {0.2, 0.2}, b = {0.8, 0.2}, c = {0.5, 0.8};
  const std::array<double, 2> centroid = {0.5, 0.4};
  Polytope tri;
  tri.faces = {edge_2d(a, b, centroid), edge_2d(b, c, centroid), edge_2d(c, a, centroid)};
  PiecewiseSpec spec;
  spec.dim = 2;
  spec.base.kind = BaseFunction::Kind::zero;
  spec.background_jump = 0.0;
  spec.regions = {std::move(tri)};
  spec.jumps = {1.0};
  return spec;
}

PiecewiseSpec tetrahedron_spec() {
  const std::array<double, 3> a = {0.2, 0.2, 0.2}, b = {0.8, 0.2, 0.2}, c = {0.5, 0.8, 0.2},
                              apex = {0.5, 0.45, 0.8};
  const std::array<double, 3> centroid = {(a[0] + b[0] + c[0] + apex[0]) / 4,
                                          (a[1] + b[1] + c[1] + apex[1]) / 4,
                                          (a[2] + b[2] + c[2] + apex[2]) / 4};
  Polytope tet;
  tet.faces = {face_3d(a, b, c, centroid), face_3d(a, b, apex, centroid),
               face_3d(b, c, apex, centroid), face_3d(c, a, apex, centroid)};
  PiecewiseSpec spec;
  spec.dim = 3;
  spec.base.kind = BaseFunction::Kind::zero;
  spec.background_jump = 0.0;
  spec.regions = {std::move(tet)};
  spec.jumps = {1.0};
  return spec;
}

LatticeField render(const PiecewiseSpec& spec, std::vector<int> dims) {
  if (static_cast<int>(dims.size()) != spec.dim) {
    throw std::invalid_argument("render: dims rank does not match spec dim");
  }
  LatticeField grid = LatticeField::constant(dims, 0.0);
  std::vector<double> values(static_cast<std::size_t>(grid.size()));
  parallel_for(grid.size(), [&](Index begin, Index end) {
    std::vector<double> x(static_cast<std::size_t>(spec.dim));
    for (Index i = begin; i < end; ++i) {
      grid.coord(i, x);
      values[static_cast<std::size_t>(i)] = spec.eval(x);
    }
  });
  return LatticeField(std::move(dims), std::move(values));
}

LatticeField add_noise(const LatticeField& field, const NoiseModel& noise) {
  if (noise.sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be >= 0");
  if (noise.sigma == 0.0) return field;
  std::vector<double> values(field.values().begin(), field.values().end());
  const CounterRng rng(noise.seed);
  parallel_for(field.size(), [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      values[static_cast<std::size_t>(i)] += noise.sigma * rng.gaussian(static_cast<std::uint64_t>(i));
    }
  });
  return LatticeField(std::vector<int>(field.dims()), std::move(values));
}

namespace {

std::vector<double> read_doubles(std::istringstream& ss, const std::string& line) {
  std::vector<double> vals;
  double v;
  while (ss >> v) vals.push_back(v);
  if (!ss.eof()) throw std::runtime_error("spec parse: bad number in line: " + line);
  return vals;
}

}  // namespace

PiecewiseSpec parse_spec(std::istream& in) {
  PiecewiseSpec spec;
  spec.dim = 0;
  bool have_region = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    if (tok == "dim") {
      if (!(ss >> spec.dim) || spec.dim < 1) {
        throw std::runtime_error("spec parse: invalid dim at line " + std::to_string(lineno));
      }
    } else if (tok == "base") {
      std::string kind;
      ss >> kind;
      if (kind == "zero") {
        spec.base.kind = BaseFunction::Kind::zero;
      } else if (kind == "linear") {
        spec.base.kind = BaseFunction::Kind::linear;
      } else if (kind == "quadratic") {
        spec.base.kind = BaseFunction::Kind::quadratic;
      } else {
        throw std::runtime_error("spec parse: unknown base kind at line " + std::to_string(lineno));
      }
      spec.base.coeffs = read_doubles(ss, line);
    } else if (tok == "background") {
      if (!(ss >> spec.background_jump)) {
        throw std::runtime_error("spec parse: invalid background at line " + std::to_string(lineno));
      }
    } else if (tok == "region") {
      double jump;
      if (!(ss >> jump)) {
        throw std::runtime_error("spec parse: invalid region jump at line " + std::to_string(lineno));
      }
      spec.regions.emplace_back();
      spec.jumps.push_back(jump);
      have_region = true;
    } else if (tok == "halfspace") {
      if (!have_region) {
        throw std::runtime_error("spec parse: halfspace before any region at line " +
                                 std::to_string(lineno));
      }
      std::vector<double> vals = read_doubles(ss, line);
      if (spec.dim < 1 || static_cast<int>(vals.size()) != spec.dim + 1) {
        throw std::runtime_error("spec parse: halfspace needs dim+1 numbers at line " +
                                 std::to_string(lineno));
      }
      HalfSpace h;
      h.normal.assign(vals.begin(), vals.end() - 1);
      h.offset = vals.back();
      spec.regions.back().faces.push_back(std::move(h));
    } else {
      throw std::runtime_error("spec parse: unknown directive '" + tok + "' at line " +
                               std::to_string(lineno));
    }
  }
  if (spec.dim < 1) throw std::runtime_error("spec parse: missing dim directive");
  return spec;
}

PiecewiseSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("spec parse: cannot open " + path);
  return parse_spec(in);
}

std::string format_spec(const PiecewiseSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "dim " << spec.dim << "\n";
  out << "base ";
  switch (spec.base.kind) {
    case BaseFunction::Kind::zero:
      out << "zero";
      break;
    case BaseFunction::Kind::linear:
      out << "linear";
      break;
    case BaseFunction::Kind::quadratic:
      out << "quadratic";
      break;
  }
  for (double c : spec.base.coeffs) out << ' ' << c;
  out << "\n";
  out << "background " << spec.background_jump << "\n";
  for (std::size_t l = 0; l < spec.regions.size(); ++l) {
    out << "region " << spec.jumps[l] << "\n";
    for (const HalfSpace& h : spec.regions[l].faces) {
      out << "halfspace";
      for (double a : h.normal) out << ' ' << a;
      out << ' ' << h.offset << "\n";
    }
  }
  return out.str();
}

}  // namespace ort

#include "rtk/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace rtk {

namespace {

constexpr double kCoincidence = 1e-12;

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 normalized(const Vec3& v) {
  const double r = norm3(v);
  return {v[0] / r, v[1] / r, v[2] / r};
}

Point make_point(const Vec3& x, PointKind kind, std::optional<Vec3> normal = std::nullopt) {
  return Point{x[0], x[1], x[2], kind, normal};
}

void check_duplicates(const std::vector<Point>& pts) {
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].x < pts[b].x || (pts[a].x == pts[b].x && a < b);
  });
  for (std::size_t s = 0; s < order.size(); ++s) {
    const Point& a = pts[order[s]];
    for (std::size_t t = s + 1; t < order.size(); ++t) {
      const Point& b = pts[order[t]];
      if (b.x - a.x > kCoincidence) break;
      const double d = norm3({a.x - b.x, a.y - b.y, a.z - b.z});
      if (d <= kCoincidence) {
        throw PointSetError("duplicate collocation points at flat indices " + std::to_string(order[s]) + " and " +
                            std::to_string(order[t]));
      }
    }
  }
}

std::size_t cube_boundary_count(const Shape3& s) {
  return s.total() - (s.m - 2) * (s.n - 2) * (s.p - 2);
}

// Outward normals of the six cube faces in the order x=0, x=1, y=0, y=1, z=0, z=1.
constexpr std::array<Vec3, 6> kFaceNormals{{{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};

std::pair<double, int> nearest_face(const Vec3& x) {
  double best = x[0];
  int face = 0;
  const std::array<double, 6> d{x[0], 1.0 - x[0], x[1], 1.0 - x[1], x[2], 1.0 - x[2]};
  for (int f = 1; f < 6; ++f) {
    if (d[f] < best) {
      best = d[f];
      face = f;
    }
  }
  return {best, face};
}

PointSet project_to_cube_boundary(Shape3 shape, const std::vector<Vec3>& raw) {
  const std::size_t n_b = cube_boundary_count(shape);
  std::vector<std::pair<double, int>> faces(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) faces[i] = nearest_face(raw[i]);

  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return faces[a].first < faces[b].first; });

  std::vector<Point> pts(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) pts[i] = make_point(raw[i], PointKind::Interior);
  for (std::size_t s = 0; s < n_b; ++s) {
    const std::size_t i = order[s];
    const int f = faces[i].second;
    Vec3 x = raw[i];
    x[static_cast<std::size_t>(f / 2)] = (f % 2 == 0) ? 0.0 : 1.0;
    pts[i] = make_point(x, PointKind::Boundary, kFaceNormals[static_cast<std::size_t>(f)]);
  }
  return {shape, std::move(pts)};
}

double grid_coord(std::size_t i, std::size_t extent, double lo, double hi) {
  if (extent == 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(extent - 1);
}

// Interior radius used by every sphere distribution: half a grid spacing
// inside the unit sphere so interior and surface points never crowd.
double sphere_interior_radius(const Shape3& s) {
  double h = 2.0;
  for (std::size_t e : {s.m, s.n, s.p}) {
    if (e > 1) h = std::min(h, 2.0 / static_cast<double>(e - 1));
  }
  return 1.0 - 0.5 * h;
}

std::vector<Vec3> sphere_grid_interior(const Shape3& s, double radius) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < s.m; ++i) {
    for (std::size_t j = 0; j < s.n; ++j) {
      for (std::size_t k = 0; k < s.p; ++k) {
        const Vec3 x{grid_coord(i, s.m, -1, 1), grid_coord(j, s.n, -1, 1), grid_coord(k, s.p, -1, 1)};
        if (norm3(x) < radius) out.push_back(x);
      }
    }
  }
  return out;
}

Vec3 sphere_point(double u, double v) {
  const double z = 2.0 * u - 1.0;
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * std::numbers::pi * v;
  return normalized({rho * std::cos(phi), rho * std::sin(phi), z});
}

}  // namespace

PointSet::PointSet(Shape3 shape, std::vector<Point> points) : shape_(shape), points_(std::move(points)) {
  if (points_.size() != shape_.total()) {
    throw PointSetError("PointSet: " + std::to_string(points_.size()) + " points for shape " + shape_.str());
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Point& pt = points_[i];
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z)) {
      throw PointSetError("PointSet: non-finite coordinate at flat index " + std::to_string(i));
    }
    if (pt.normal && std::abs(norm3(*pt.normal) - 1.0) > 1e-12) {
      throw PointSetError("PointSet: normal at flat index " + std::to_string(i) + " is not unit length");
    }
    if (pt.kind == PointKind::Interior) ++n_interior_;
  }
  check_duplicates(points_);
}

Distribution parse_distribution(const std::string& name) {
  if (name == "uniform") return Distribution::Uniform;
  if (name == "random") return Distribution::Random;
  if (name == "halton") return Distribution::Halton;
  throw std::invalid_argument("unknown distribution '" + name + "' (expected uniform, random or halton)");
}

std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::Uniform: return "uniform";
    case Distribution::Random: return "random";
    case Distribution::Halton: return "halton";
  }
  return "unknown";
}

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv_base = 1.0 / static_cast<double>(base);
  double inv = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * inv;
    index /= base;
    inv *= inv_base;
  }
  return result;
}

Vec3 halton3(std::uint64_t index) {
  return {radical_inverse(index, 2), radical_inverse(index, 3), radical_inverse(index, 5)};
}

UniformStream::UniformStream(std::uint64_t seed) : engine_(seed) {}

double UniformStream::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

PointSet gen_cube(Shape3 shape, Distribution dist, std::uint64_t seed) {
  if (shape.m < 2 || shape.n < 2 || shape.p < 2) {
    throw std::invalid_argument("gen_cube: every extent must be at least 2, got " + shape.str());
  }
  if (dist == Distribution::Uniform) {
    std::vector<Point> pts;
    pts.reserve(shape.total());
    for (std::size_t i = 0; i < shape.m; ++i) {
      for (std::size_t j = 0; j < shape.n; ++j) {
        for (std::size_t k = 0; k < shape.p; ++k) {
          const Vec3 x{grid_coord(i, shape.m, 0, 1), grid_coord(j, shape.n, 0, 1), grid_coord(k, shape.p, 0, 1)};
          const std::array<std::size_t, 3> idx{i, j, k};
          const std::array<std::size_t, 3> ext{shape.m, shape.n, shape.p};
          Vec3 nrm{0, 0, 0};
          bool on_face = false;
          for (std::size_t a = 0; a < 3; ++a) {
            if (idx[a] == 0) nrm[a] = -1.0;
            if (idx[a] == ext[a] - 1) nrm[a] = 1.0;
            on_face = on_face || nrm[a] != 0.0;
          }
          if (on_face) {
            pts.push_back(make_point(x, PointKind::Boundary, normalized(nrm)));
          } else {
            pts.push_back(make_point(x, PointKind::Interior));
          }
        }
      }
    }
    return {shape, std::move(pts)};
  }

  std::vector<Vec3> raw(shape.total());
  if (dist == Distribution::Random) {
    UniformStream rng(seed);
    for (auto& x : raw) x = {rng.next(), rng.next(), rng.next()};
  } else {
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = halton3(i + 1);
  }
  return project_to_cube_boundary(shape, raw);
}

PointSet gen_sphere(Shape3 shape, Distribution dist, std::uint64_t seed) {
  if (shape.total() < 8) {
    throw std::invalid_argument("gen_sphere: need at least 8 points, got shape " + shape.str());
  }
  const double radius = sphere_interior_radius(shape);
  std::vector<Vec3> interior = sphere_grid_interior(shape, radius);
  const std::size_t n_int = interior.size();
  const std::size_t n_b = shape.total() - n_int;

  std::vector<Vec3> surface;
  surface.reserve(n_b);
  if (dist == Distribution::Uniform) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n_b; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n_b);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double theta = golden * static_cast<double>(i);
      surface.push_back(normalized({rho * std::cos(theta), rho * std::sin(theta), z}));
    }
  } else if (dist == Distribution::Random) {
    UniformStream rng(seed);
    for (auto& x : interior) {
      do {
        x = {radius * (2 * rng.next() - 1), radius * (2 * rng.next() - 1), radius * (2 * rng.next() - 1)};
      } while (norm3(x) >= radius);
    }
    for (std::size_t i = 0; i < n_b; ++i) {
      const double u = rng.next();
      surface.push_back(sphere_point(u, rng.next()));
    }
  } else {
    std::uint64_t index = 1;
    for (auto& x : interior) {
      do {
        const Vec3 h = halton3(index++);
        x = {radius * (2 * h[0] - 1), radius * (2 * h[1] - 1), radius * (2 * h[2] - 1)};
      } while (norm3(x) >= radius);
    }
    for (std::size_t i = 0; i < n_b; ++i) {
      surface.push_back(sphere_point(radical_inverse(i + 1, 2), radical_inverse(i + 1, 3)));
    }
  }

  std::vector<Point> pts;
  pts.reserve(shape.total());
  for (const auto& x : interior) pts.push_back(make_point(x, PointKind::Interior));
  for (const auto& x : surface) pts.push_back(make_point(x, PointKind::Boundary, x));
  return {shape, std::move(pts)};
}

PointSet gen_casing(Shape3 shape, Distribution dist, std::uint64_t seed) {
  if (shape.m < 3 || shape.n < 3 || shape.p < 3) {
    throw std::invalid_argument("gen_casing: every extent must be at least 3, got " + shape.str());
  }
  if (dist == Distribution::Uniform) throw std::invalid_argument("gen_casing: uniform distribution not supported");
  constexpr double r_in = 1.0;
  constexpr double r_out = 2.5;
  constexpr double z_lo = -0.5;
  constexpr double z_hi = 0.5;
  const std::size_t n_b = cube_boundary_count(shape);
  const std::size_t n_int = shape.total() - n_b;

  UniformStream rng(seed);
  std::uint64_t hidx = 1;
  auto sample3 = [&]() -> Vec3 {
    if (dist == Distribution::Random) {
      const double a = rng.next();
      const double b = rng.next();
      return {a, b, rng.next()};
    }
    return halton3(hidx++);
  };

  std::vector<Point> pts;
  pts.reserve(shape.total());
  while (pts.size() < n_int) {
    const Vec3 u = sample3();
    const Vec3 x{r_out * (2 * u[0] - 1), r_out * (2 * u[1] - 1), z_lo + (z_hi - z_lo) * u[2]};
    const double r = std::hypot(x[0], x[1]);
    // Keep interior points off the surfaces.
    if (r > r_in + 1e-3 && r < r_out - 1e-3 && x[2] > z_lo + 1e-3 && x[2] < z_hi - 1e-3) {
      pts.push_back(make_point(x, PointKind::Interior));
    }
  }

  const double h = z_hi - z_lo;
  const double cap = std::numbers::pi * (r_out * r_out - r_in * r_in);
  const std::array<double, 4> area{2 * std::numbers::pi * r_out * h, 2 * std::numbers::pi * r_in * h, cap, cap};
  const double total_area = area[0] + area[1] + area[2] + area[3];
  std::array<std::size_t, 4> count{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    count[s] = static_cast<std::size_t>(std::llround(static_cast<double>(n_b) * area[s] / total_area));
    assigned += count[s];
  }
  count[3] = n_b - assigned;

  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t i = 0; i < count[s]; ++i) {
      double u = 0.0;
      double v = 0.0;
      if (dist == Distribution::Random) {
        u = rng.next();
        v = rng.next();
      } else {
        u = radical_inverse(i + 1, 2);
        v = radical_inverse(i + 1, 3);
      }
      const double theta = 2 * std::numbers::pi * u;
      const double c = std::cos(theta);
      const double sn = std::sin(theta);
      if (s < 2) {
        const double r = s == 0 ? r_out : r_in;
        const double sign = s == 0 ? 1.0 : -1.0;
        pts.push_back(make_point({r * c, r * sn, z_lo + h * v}, PointKind::Boundary, Vec3{sign * c, sign * sn, 0.0}));
      } else {
        // Area-uniform radius on the annulus.
        const double r = std::sqrt(r_in * r_in + v * (r_out * r_out - r_in * r_in));
        const double z = s == 2 ? z_hi : z_lo;
        pts.push_back(make_point({r * c, r * sn, z}, PointKind::Boundary, Vec3{0.0, 0.0, s == 2 ? 1.0 : -1.0}));
      }
    }
  }
  return {shape, std::move(pts)};
}

PointSet load_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open point file " + path.string());

  std::optional<Shape3> shape;
  std::vector<Point> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream is(line);
    if (!shape) {
      long long m = 0, n = 0, p = 0;
      if (!(is >> m >> n >> p) || m <= 0 || n <= 0 || p <= 0) {
        throw ParseError("expected header \"M N P\" with positive extents", lineno);
      }
      shape = Shape3(static_cast<std::size_t>(m), static_cast<std::size_t>(n), static_cast<std::size_t>(p));
      pts.reserve(shape->total());
      continue;
    }
    Point pt;
    std::string kind;
    if (!(is >> pt.x >> pt.y >> pt.z >> kind)) throw ParseError("expected \"x y z kind [nx ny nz]\"", lineno);
    if (kind == "I") {
      pt.kind = PointKind::Interior;
    } else if (kind == "B") {
      pt.kind = PointKind::Boundary;
    } else {
      throw ParseError("point kind must be I or B, got '" + kind + "'", lineno);
    }
    Vec3 nrm{};
    if (is >> nrm[0]) {
      if (!(is >> nrm[1] >> nrm[2])) throw ParseError("incomplete normal vector", lineno);
      pt.normal = nrm;
    }
    std::string extra;
    if (is >> extra) throw ParseError("unexpected trailing field '" + extra + "'", lineno);
    if (pts.size() == shape->total()) {
      throw ParseError("more records than the header's " + std::to_string(shape->total()), lineno);
    }
    pts.push_back(pt);
  }
  if (!shape) throw ParseError("missing header", lineno);
  if (pts.size() != shape->total()) {
    throw ParseError("header declares " + std::to_string(shape->total()) + " points but file has " +
                         std::to_string(pts.size()),
                     lineno);
  }
  return {*shape, std::move(pts)};
}

void save_points(const PointSet& points, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write point file " + path.string());
  out.precision(17);
  const Shape3& s = points.shape();
  out << s.m << ' ' << s.n << ' ' << s.p << '\n';
  for (const Point& pt : points.points()) {
    out << pt.x << ' ' << pt.y << ' ' << pt.z << ' ' << (pt.kind == PointKind::Interior ? 'I' : 'B');
    if (pt.normal) out << ' ' << (*pt.normal)[0] << ' ' << (*pt.normal)[1] << ' ' << (*pt.normal)[2];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace rtk

#pragma once

#include "rtk/tensor.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtk {

using Vec3 = std::array<double, 3>;

enum class PointKind { Interior, Boundary };

/// Collocation point. Boundary points carry an outward unit normal.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  PointKind kind = PointKind::Interior;
  std::optional<Vec3> normal;

  [[nodiscard]] Vec3 pos() const noexcept { return {x, y, z}; }

  friend bool operator==(const Point&, const Point&) = default;
};

/// Raised for malformed point sets: duplicate points, bad normals, size mismatches.
class PointSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by load_points with the offending line number in the message.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// M x N x P collocation points addressed by the Tensor3 flattening.
///
/// The constructor validates: point count matches the shape, normals are unit
/// length, and no two points lie within 1e-12 of each other.
class PointSet {
 public:
  PointSet(Shape3 shape, std::vector<Point> points);

  [[nodiscard]] const Shape3& shape() const noexcept { return shape_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] const Point& operator[](std::size_t flat) const { return points_[flat]; }
  [[nodiscard]] const std::vector<Point>& points() const noexcept { return points_; }
  [[nodiscard]] std::size_t n_interior() const noexcept { return n_interior_; }
  [[nodiscard]] std::size_t n_boundary() const noexcept { return points_.size() - n_interior_; }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.shape_ == b.shape_ && a.points_ == b.points_;
  }

 private:
  Shape3 shape_;
  std::vector<Point> points_;
  std::size_t n_interior_ = 0;
};

enum class Distribution { Uniform, Random, Halton };

[[nodiscard]] Distribution parse_distribution(const std::string& name);
[[nodiscard]] std::string to_string(Distribution d);

/// Radical inverse of `index` in `base` (van der Corput digit reversal).
[[nodiscard]] double radical_inverse(std::uint64_t index, unsigned base);

/// Halton point `index` (1-based) with bases (2, 3, 5).
[[nodiscard]] Vec3 halton3(std::uint64_t index);

/// Seedable uniform generator on [0, 1) built on mt19937_64, using the top
/// 53 bits so the stream is identical across standard library vendors.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed);
  double next();

 private:
  std::mt19937_64 engine_;
};

/// Points in the unit cube [0,1]^3. Every extent must be at least 2.
///
/// Uniform is the tensor grid; any point on a face is Boundary. Random and
/// Halton draw shape.total() points in the open cube and then project the
/// n_b points nearest a face onto that face, where n_b is the boundary count
/// of the Uniform grid of the same shape.
[[nodiscard]] PointSet gen_cube(Shape3 shape, Distribution dist, std::uint64_t seed);

/// Points in the unit ball, interior first then boundary in flat order.
///
/// Uniform filters a Cartesian grid over [-1,1]^3 to radius 1 - h/2 (h the
/// grid spacing) and pads with a Fibonacci lattice on the sphere. Random and
/// Halton keep the same interior/boundary split and sample each part.
[[nodiscard]] PointSet gen_sphere(Shape3 shape, Distribution dist, std::uint64_t seed);

/// Hollow cylinder r in [1, 2.5], z in [-0.5, 0.5]: a small stand-in for the
/// pump casing geometry. Boundary points are spread over the four surfaces in
/// proportion to their area; the boundary count follows gen_cube. Uniform is
/// not supported for this geometry.
[[nodiscard]] PointSet gen_casing(Shape3 shape, Distribution dist, std::uint64_t seed);

/// Point file: line "M N P", then M*N*P lines "x y z kind [nx ny nz]" with
/// kind I or B. Lines starting with '#' are skipped.
[[nodiscard]] PointSet load_points(const std::filesystem::path& path);
void save_points(const PointSet& points, const std::filesystem::path& path);

}  // namespace rtk

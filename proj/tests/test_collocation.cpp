#include "rtk/collocation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace rtk;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rtk_test_" + name);
}

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

}  // namespace

TEST(Halton, RadicalInverse) {
  EXPECT_EQ(radical_inverse(1, 2), 0.5);
  EXPECT_EQ(radical_inverse(2, 2), 0.25);
  EXPECT_EQ(radical_inverse(3, 2), 0.75);
  EXPECT_DOUBLE_EQ(radical_inverse(1, 3), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(radical_inverse(5, 3), 7.0 / 9.0);
  const Vec3 h = halton3(1);
  EXPECT_EQ(h[0], 0.5);
  EXPECT_DOUBLE_EQ(h[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(h[2], 0.2);
}

TEST(UniformStream, DeterministicAndInRange) {
  UniformStream a(7), b(7), c(8);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(PointSet, RejectsCountMismatch) {
  std::vector<Point> pts(7);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].x = static_cast<double>(i);
  EXPECT_THROW(PointSet(Shape3(2, 2, 2), pts), PointSetError);
}

TEST(PointSet, RejectsDuplicates) {
  std::vector<Point> pts(2);
  pts[1].x = 1e-14;
  EXPECT_THROW(PointSet(Shape3(2, 1, 1), pts), PointSetError);
}

TEST(PointSet, RejectsBadNormals) {
  std::vector<Point> pts(2);
  pts[1].x = 1.0;
  pts[1].kind = PointKind::Boundary;
  pts[1].normal = Vec3{1.0, 1.0, 0.0};
  EXPECT_THROW(PointSet(Shape3(2, 1, 1), pts), PointSetError);
  // A boundary point may omit its normal; only Neumann assembly needs it.
  pts[1].normal.reset();
  EXPECT_NO_THROW(PointSet(Shape3(2, 1, 1), pts));
}

TEST(Cube, UniformGridLayout) {
  const PointSet ps = gen_cube(Shape3(3, 3, 3), Distribution::Uniform, 1);
  EXPECT_EQ(ps.size(), 27u);
  EXPECT_EQ(ps.n_interior(), 1u);
  const Point& centre = ps[Shape3(3, 3, 3).index(1, 1, 1)];
  EXPECT_EQ(centre.kind, PointKind::Interior);
  EXPECT_EQ(centre.x, 0.5);
  EXPECT_EQ(centre.y, 0.5);
  EXPECT_EQ(centre.z, 0.5);
  // A face centre has the face normal; a corner has the normalized diagonal.
  const Point& face = ps[Shape3(3, 3, 3).index(0, 1, 1)];
  EXPECT_EQ(face.kind, PointKind::Boundary);
  EXPECT_EQ(*face.normal, (Vec3{-1, 0, 0}));
  const Point& corner = ps[Shape3(3, 3, 3).index(2, 2, 2)];
  const double c = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR((*corner.normal)[0], c, 1e-15);
  EXPECT_NEAR((*corner.normal)[2], c, 1e-15);
}

TEST(Cube, TooSmallExtentRejected) {
  EXPECT_THROW((void)gen_cube(Shape3(1, 3, 3), Distribution::Uniform, 1), std::invalid_argument);
}

TEST(Cube, ScatteredDistributionsMatchGridBoundaryCount) {
  const Shape3 s(5, 4, 6);
  const std::size_t n_b = s.total() - 3 * 2 * 4;
  for (Distribution d : {Distribution::Random, Distribution::Halton}) {
    const PointSet ps = gen_cube(s, d, 3);
    EXPECT_EQ(ps.n_boundary(), n_b) << to_string(d);
    for (const Point& p : ps.points()) {
      for (double c : p.pos()) {
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
      }
      if (p.kind == PointKind::Boundary) {
        const Vec3 x = p.pos();
        bool on_face = false;
        for (double c : x) on_face = on_face || c == 0.0 || c == 1.0;
        EXPECT_TRUE(on_face);
        EXPECT_NEAR(norm(*p.normal), 1.0, 1e-12);
      }
    }
  }
}

TEST(Cube, RandomIsSeeded) {
  const Shape3 s(4, 4, 4);
  EXPECT_EQ(gen_cube(s, Distribution::Random, 5), gen_cube(s, Distribution::Random, 5));
  EXPECT_FALSE(gen_cube(s, Distribution::Random, 5) == gen_cube(s, Distribution::Random, 6));
}

TEST(Sphere, PointsInsideWithRadialNormals) {
  for (Distribution d : {Distribution::Uniform, Distribution::Random, Distribution::Halton}) {
    const PointSet ps = gen_sphere(Shape3(6, 6, 6), d, 2);
    EXPECT_EQ(ps.size(), 216u);
    EXPECT_GT(ps.n_interior(), 0u);
    EXPECT_GT(ps.n_boundary(), 0u);
    for (const Point& p : ps.points()) {
      const double r = norm(p.pos());
      if (p.kind == PointKind::Boundary) {
        EXPECT_NEAR(r, 1.0, 1e-12);
        const Vec3 n = *p.normal;
        for (int a = 0; a < 3; ++a) EXPECT_NEAR(n[a], p.pos()[a], 1e-12);
      } else {
        EXPECT_LT(r, 1.0);
      }
    }
  }
}

TEST(Casing, GeometryAndNormals) {
  const PointSet ps = gen_casing(Shape3(6, 6, 6), Distribution::Halton, 1);
  EXPECT_EQ(ps.n_boundary(), 216u - 64u);
  for (const Point& p : ps.points()) {
    const double r = std::hypot(p.x, p.y);
    EXPECT_GE(r, 1.0 - 1e-12);
    EXPECT_LE(r, 2.5 + 1e-12);
    EXPECT_GE(p.z, -0.5);
    EXPECT_LE(p.z, 0.5);
    if (p.kind == PointKind::Boundary) EXPECT_NEAR(norm(*p.normal), 1.0, 1e-12);
  }
  EXPECT_THROW((void)gen_casing(Shape3(6, 6, 6), Distribution::Uniform, 1), std::invalid_argument);
}

TEST(PointFile, RoundTripIsExact) {
  const auto path = temp_file("roundtrip.pts");
  for (Distribution d : {Distribution::Random, Distribution::Halton}) {
    const PointSet ps = gen_sphere(Shape3(4, 3, 5), d, 11);
    save_points(ps, path);
    EXPECT_EQ(load_points(path), ps);
  }
  std::filesystem::remove(path);
}

TEST(PointFile, ParseErrorsCarryLineNumbers) {
  const auto path = temp_file("bad.pts");
  {
    std::ofstream os(path);
    os << "# two points\n2 1 1\n0 0 0 I\n1 0 0 X\n";
  }
  try {
    (void)load_points(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  {
    std::ofstream os(path);
    os << "2 1 1\n0 0 0 I\n";
  }
  EXPECT_THROW((void)load_points(path), std::exception);
  std::filesystem::remove(path);
}

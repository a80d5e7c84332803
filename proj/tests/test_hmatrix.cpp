#include "oracles.hpp"
#include "rtk/hmatrix.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace rtk;

namespace {

PointSet line_points(std::size_t n) {
  std::vector<Point> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i].x = static_cast<double>(i);
  return {Shape3(n, 1, 1), pts};
}

PointSet random_cloud(std::size_t n, std::uint64_t seed, Vec3 offset = {0, 0, 0}, double scale = 1.0) {
  UniformStream r(seed);
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.x = offset[0] + scale * r.next();
    p.y = offset[1] + scale * r.next();
    p.z = offset[2] + scale * r.next();
  }
  return {Shape3(n, 1, 1), pts};
}

// Two clusters of n points each, the second shifted far along x.
PointSet two_clusters(std::size_t n, double gap) {
  const PointSet a = random_cloud(n, 1);
  const PointSet b = random_cloud(n, 2, {gap, 0, 0});
  std::vector<Point> pts = a.points();
  pts.insert(pts.end(), b.points().begin(), b.points().end());
  return {Shape3(2 * n, 1, 1), pts};
}

bool box_contains(const Box& b, const Vec3& x) {
  for (std::size_t a = 0; a < 3; ++a) {
    if (x[a] < b.lo[a] || x[a] > b.hi[a]) return false;
  }
  return true;
}

}  // namespace

TEST(ClusterTree, CollinearMedianSplits) {
  const ClusterTree t = build_cluster_tree(line_points(8), 2);
  EXPECT_EQ(t.depth(), 2u);
  std::size_t leaves = 0;
  for (const auto& n : t.nodes()) {
    if (n.is_leaf()) {
      ++leaves;
      EXPECT_EQ(n.size(), 2u);
    }
  }
  EXPECT_EQ(leaves, 4u);
}

TEST(ClusterTree, DegenerateSingleLeaf) {
  const ClusterTree t = build_cluster_tree(line_points(5), 5);
  EXPECT_EQ(t.nodes().size(), 1u);
  EXPECT_TRUE(t.root().is_leaf());
  EXPECT_THROW((void)build_cluster_tree(line_points(5), 0), std::invalid_argument);
}

TEST(ClusterTree, StructuralAudit) {
  const PointSet ps = random_cloud(512, 9);
  const ClusterTree t = build_cluster_tree(ps, 10);
  std::vector<std::size_t> sorted = t.permutation();
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> iota(512);
  std::iota(iota.begin(), iota.end(), 0u);
  EXPECT_EQ(sorted, iota);
  EXPECT_EQ(t.root().begin, 0u);
  EXPECT_EQ(t.root().end, 512u);
  for (const auto& n : t.nodes()) {
    for (std::size_t s = n.begin; s < n.end; ++s) EXPECT_TRUE(box_contains(n.bbox, ps[t.permutation()[s]].pos()));
    if (n.is_leaf()) {
      EXPECT_LE(n.size(), 10u);
    } else {
      const auto& l = t.node(n.left);
      const auto& r = t.node(n.right);
      EXPECT_EQ(l.begin, n.begin);
      EXPECT_EQ(l.end, r.begin);
      EXPECT_EQ(r.end, n.end);
      EXPECT_LE(std::max(l.size(), r.size()) - std::min(l.size(), r.size()), 1u);
    }
  }
}

TEST(Admissibility, Cases) {
  Box a{{0, 0, 0}, {1, 1, 1}};
  Box far{{11, 0, 0}, {12, 1, 1}};
  EXPECT_TRUE(admissible(a, far, 2.0));
  EXPECT_FALSE(admissible(a, a, 2.0));
  EXPECT_THROW((void)admissible(a, far, 0.0), std::invalid_argument);
}

TEST(Admissibility, MatchesDirectInequality) {
  for (int t = 0; t < 200; ++t) {
    Box a, b;
    for (std::size_t k = 0; k < 3; ++k) {
      a.lo[k] = oracle::uniform(-3, 3);
      a.hi[k] = a.lo[k] + oracle::uniform(0, 1);
      b.lo[k] = oracle::uniform(-3, 3);
      b.hi[k] = b.lo[k] + oracle::uniform(0, 1);
    }
    double d2 = 0.0, da = 0.0, db = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double gap = std::max({0.0, a.lo[k] - b.hi[k], b.lo[k] - a.hi[k]});
      d2 += gap * gap;
      da += (a.hi[k] - a.lo[k]) * (a.hi[k] - a.lo[k]);
      db += (b.hi[k] - b.lo[k]) * (b.hi[k] - b.lo[k]);
    }
    const double eta = oracle::uniform(0.5, 3);
    const bool want = d2 > 0 && std::max(std::sqrt(da), std::sqrt(db)) <= eta * std::sqrt(d2);
    EXPECT_EQ(admissible(a, b, eta), want);
  }
}

TEST(Aca, RecoversRankOne) {
  std::vector<std::size_t> rows(30), cols(20);
  std::iota(rows.begin(), rows.end(), 0u);
  std::iota(cols.begin(), cols.end(), 0u);
  const EntryFn f = [](std::size_t i, std::size_t j) { return (1.0 + i) * std::cos(0.3 * j); };
  const AcaResult r = aca(f, rows, cols, 1e-10, 20);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.block.rank(), 1u);
  const Eigen::MatrixXd d = r.block.dense();
  for (std::size_t i = 0; i < 30; ++i)
    for (std::size_t j = 0; j < 20; ++j)
      EXPECT_NEAR(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), f(i, j), 1e-12);
}

TEST(Aca, ZeroBlockHasRankZero) {
  std::vector<std::size_t> idx(10);
  std::iota(idx.begin(), idx.end(), 0u);
  const AcaResult r = aca([](std::size_t, std::size_t) { return 0.0; }, idx, idx, 1e-6, 10);
  EXPECT_EQ(r.block.rank(), 0u);
  EXPECT_THROW((void)aca([](std::size_t, std::size_t) { return 0.0; }, idx, idx, 0.0, 10), std::invalid_argument);
}

TEST(Aca, SeparatedKernelBlockMatchesDense) {
  const PointSet ps = two_clusters(50, 10.0);
  const MQKernel k(1.0);
  std::vector<std::size_t> rows(50), cols(50);
  std::iota(rows.begin(), rows.end(), 0u);
  std::iota(cols.begin(), cols.end(), 50u);
  const EntryFn f = [&](std::size_t i, std::size_t j) { return k(distance(ps[i], ps[j])); };
  const AcaResult r = aca(f, rows, cols, 1e-6, 50);
  Eigen::MatrixXd dense(50, 50);
  for (Eigen::Index i = 0; i < 50; ++i)
    for (Eigen::Index j = 0; j < 50; ++j) dense(i, j) = f(rows[i], cols[j]);
  EXPECT_LE((dense - r.block.dense()).norm() / dense.norm(), 1e-5);
  EXPECT_LT(r.block.rank(), 25u);
}

TEST(HOperator, SingleLeafEqualsDenseExactly) {
  const PointSet ps = random_cloud(40, 3);
  const MQKernel k(1.0);
  HParams hp;
  hp.leaf_threshold = 40;
  const HOperator h = assemble_h(ps, k, hp);
  EXPECT_EQ(h.blocks().size(), 1u);
  const Operator6 a = assemble_A(ps, k);
  const Tensor3 x = oracle::random_tensor(ps.shape());
  EXPECT_EQ(h.apply(x), a.apply(x));
  EXPECT_EQ(h.to_dense(), a.flat());
}

TEST(HOperator, SeparatedClustersGetLowRankBlocks) {
  const PointSet ps = two_clusters(100, 10.0);
  const MQKernel k(1.0);
  HParams hp;
  hp.leaf_threshold = 100;
  const HOperator h = assemble_h(ps, k, hp);
  const Operator6 a = assemble_A(ps, k);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.flat().block(0, 100, 100, 100));
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::Index svd_rank = 0;
  while (svd_rank < s.size() && s(svd_rank) > 1e-6 * s(0)) ++svd_rank;

  std::size_t low = 0;
  for (const auto& b : h.blocks()) {
    if (const auto* lr = std::get_if<LowRankBlock>(&b.payload)) {
      ++low;
      EXPECT_LT(lr->rank(), 20u);
      EXPECT_LE(lr->rank(), static_cast<std::size_t>(svd_rank) + 5);
    }
  }
  EXPECT_EQ(low, 2u);
}

TEST(HOperator, PartitionAndAdmissibilityInvariants) {
  const PointSet ps = gen_cube(Shape3(8, 8, 8), Distribution::Halton, 1);
  const MQKernel k(1.0);
  HParams hp;
  hp.leaf_threshold = 32;
  const HOperator h = assemble_h(ps, k, hp);
  const ClusterTree& t = h.tree();
  Eigen::MatrixXi cover = Eigen::MatrixXi::Zero(512, 512);
  for (const auto& b : h.blocks()) {
    const auto& r = t.node(b.row_node);
    const auto& c = t.node(b.col_node);
    cover.block(static_cast<Eigen::Index>(r.begin), static_cast<Eigen::Index>(c.begin),
                static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(c.size()))
        .array() += 1;
    if (std::holds_alternative<LowRankBlock>(b.payload)) {
      EXPECT_TRUE(admissible(r, c, hp.eta));
    } else if (!admissible(r, c, hp.eta)) {
      EXPECT_TRUE(r.is_leaf() && c.is_leaf());
    }
  }
  EXPECT_EQ(cover, Eigen::MatrixXi::Ones(512, 512));
}

TEST(HOperator, ApplyAndTransposeMatchDense) {
  const PointSet ps = gen_sphere(Shape3(8, 8, 8), Distribution::Random, 4);
  const MQKernel k(1.0);
  HelmholtzProblem pr;
  HParams hp;
  hp.leaf_threshold = 24;
  const HOperator h = assemble_h(ps, k, pr, hp);
  const Operator6 d = assemble_H(ps, k, pr);
  const Tensor3 x = oracle::random_tensor(ps.shape());
  const Tensor3 y = h_apply(h, x);
  const Tensor3 yd = d.apply(x);
  EXPECT_LE(fro_norm(y - yd) / fro_norm(yd), 1e-5);
  const Tensor3 z = h_apply_transpose(h, x);
  const Tensor3 zd = d.apply_transpose(x);
  EXPECT_LE(fro_norm(z - zd) / fro_norm(zd), 1e-5);
  EXPECT_THROW((void)h.apply(Tensor3(Shape3(2, 2, 2))), DimensionError);
}

TEST(HOperator, LargeCloudSavesMemory) {
  // Points spread over a long slab separate well, so compression pays off.
  const PointSet ps = random_cloud(1000, 5, {0, 0, 0}, 1.0);
  std::vector<Point> pts = ps.points();
  for (auto& p : pts) p.x *= 20.0;
  const PointSet slab(ps.shape(), pts);
  const HOperator h = assemble_h(slab, MQKernel(1.0), HParams{});
  EXPECT_LT(h.bytes(), h.stats().dense_bytes);
  EXPECT_GT(h.stats().lowrank_blocks, 0u);
}

TEST(HOperator, DefaultLeafThreshold) {
  EXPECT_EQ(default_leaf_threshold(Shape3(10, 10, 10)), 91u);
  EXPECT_EQ(default_leaf_threshold(Shape3(1, 1, 1)), 1u);
}

TEST(CompressionStats, ReportIsKeyValue) {
  const HOperator h = assemble_h(random_cloud(60, 2), MQKernel(1.0), HParams{});
  const std::string r = h.stats().report();
  EXPECT_NE(r.find("n_points = 60\n"), std::string::npos);
  EXPECT_NE(r.find("stored_bytes = "), std::string::npos);
}

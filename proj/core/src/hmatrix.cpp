#include "rtk/hmatrix.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rtk {

double Box::diameter() const noexcept {
  double s = 0.0;
  for (std::size_t a = 0; a < 3; ++a) s += (hi[a] - lo[a]) * (hi[a] - lo[a]);
  return std::sqrt(s);
}

Vec3 Box::center() const noexcept {
  return {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])};
}

double box_distance(const Box& a, const Box& b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double gap = std::max({0.0, a.lo[k] - b.hi[k], b.lo[k] - a.hi[k]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

bool admissible(const Box& a, const Box& b, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("admissible: eta must be positive");
  const double dist = box_distance(a, b);
  return dist > 0.0 && std::max(a.diameter(), b.diameter()) <= eta * dist;
}

std::size_t ClusterTree::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const ClusterNode& n = node(id);
    if (!n.is_leaf()) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

namespace {

Box bounding_box(const PointSet& pts, std::span<const std::size_t> idx) {
  Box b;
  b.lo = pts[idx.front()].pos();
  b.hi = b.lo;
  for (std::size_t i : idx) {
    const Vec3 x = pts[i].pos();
    for (std::size_t a = 0; a < 3; ++a) {
      b.lo[a] = std::min(b.lo[a], x[a]);
      b.hi[a] = std::max(b.hi[a], x[a]);
    }
  }
  return b;
}

int build_node(const PointSet& pts, std::vector<std::size_t>& perm, std::vector<ClusterNode>& nodes,
               std::size_t begin, std::size_t end, std::size_t leaf) {
  const int id = static_cast<int>(nodes.size());
  nodes.push_back({begin, end, bounding_box(pts, std::span(perm).subspan(begin, end - begin)), -1, -1});
  if (end - begin <= leaf) return id;

  const Box& box = nodes.back().bbox;
  std::size_t axis = 0;
  for (std::size_t a = 1; a < 3; ++a) {
    if (box.hi[a] - box.lo[a] > box.hi[axis] - box.lo[axis]) axis = a;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  const auto first = perm.begin() + static_cast<std::ptrdiff_t>(begin);
  std::nth_element(first, perm.begin() + static_cast<std::ptrdiff_t>(mid),
                   perm.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     const double xa = pts[a].pos()[axis];
                     const double xb = pts[b].pos()[axis];
                     return xa < xb || (xa == xb && a < b);
                   });
  const int left = build_node(pts, perm, nodes, begin, mid, leaf);
  const int right = build_node(pts, perm, nodes, mid, end, leaf);
  nodes[static_cast<std::size_t>(id)].left = left;
  nodes[static_cast<std::size_t>(id)].right = right;
  return id;
}

}  // namespace

ClusterTree build_cluster_tree(const PointSet& points, std::size_t leaf_threshold) {
  if (leaf_threshold < 1) throw std::invalid_argument("build_cluster_tree: leaf threshold must be at least 1");
  if (points.size() == 0) throw std::invalid_argument("build_cluster_tree: empty point set");
  std::vector<std::size_t> perm(points.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<ClusterNode> nodes;
  build_node(points, perm, nodes, 0, perm.size(), leaf_threshold);
  return {std::move(perm), std::move(nodes), leaf_threshold};
}

AcaResult aca(const EntryFn& entry, std::span<const std::size_t> rows, std::span<const std::size_t> cols, double tol,
              std::size_t max_rank, std::size_t first_row) {
  if (!(tol > 0.0)) throw std::invalid_argument("aca: tolerance must be positive");
  if (rows.empty() || cols.empty()) throw std::invalid_argument("aca: empty row or column span");
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(cols.size());
  max_rank = std::min({max_rank, rows.size(), cols.size()});

  std::vector<Eigen::VectorXd> us;
  std::vector<Eigen::VectorXd> vs;
  std::vector<bool> used(rows.size(), false);
  std::size_t next_unused = 0;
  double frob2 = 0.0;
  double scale = 0.0;
  auto pick_unused = [&]() -> std::ptrdiff_t {
    while (next_unused < used.size() && used[next_unused]) ++next_unused;
    return next_unused < used.size() ? static_cast<std::ptrdiff_t>(next_unused) : -1;
  };

  auto finish = [&](bool converged) {
    AcaResult res;
    res.converged = converged;
    res.block.u.resize(nr, static_cast<Eigen::Index>(us.size()));
    res.block.v.resize(nc, static_cast<Eigen::Index>(vs.size()));
    for (std::size_t l = 0; l < us.size(); ++l) {
      res.block.u.col(static_cast<Eigen::Index>(l)) = us[l];
      res.block.v.col(static_cast<Eigen::Index>(l)) = vs[l];
    }
    return res;
  };

  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::min(first_row, rows.size() - 1));
  while (us.size() < max_rank) {
    Eigen::VectorXd row(nc);
    Eigen::Index j = 0;
    for (;;) {
      const auto ii = static_cast<std::size_t>(i);
      for (Eigen::Index c = 0; c < nc; ++c) row(c) = entry(rows[ii], cols[static_cast<std::size_t>(c)]);
      scale = std::max(scale, row.cwiseAbs().maxCoeff());
      for (std::size_t l = 0; l < us.size(); ++l) row -= us[l](i) * vs[l];
      used[ii] = true;
      row.cwiseAbs().maxCoeff(&j);
      if (std::abs(row(j)) > 1e-14 * scale && scale > 0.0) break;
      i = pick_unused();
      if (i < 0) return finish(true);
    }

    Eigen::VectorXd v = row / row(j);
    Eigen::VectorXd u(nr);
    const std::size_t cj = cols[static_cast<std::size_t>(j)];
    for (Eigen::Index r = 0; r < nr; ++r) u(r) = entry(rows[static_cast<std::size_t>(r)], cj);
    for (std::size_t l = 0; l < us.size(); ++l) u -= vs[l](j) * us[l];

    double cross = 0.0;
    for (std::size_t l = 0; l < us.size(); ++l) cross += us[l].dot(u) * vs[l].dot(v);
    const double un = u.norm();
    const double vn = v.norm();
    frob2 = std::max(0.0, frob2 + 2.0 * cross + un * un * vn * vn);
    us.push_back(std::move(u));
    vs.push_back(std::move(v));
    if (un * vn <= tol * std::sqrt(frob2)) return finish(true);

    // Next pivot row: largest entry of the new column among unused rows.
    double best = -1.0;
    i = -1;
    for (Eigen::Index r = 0; r < nr; ++r) {
      if (!used[static_cast<std::size_t>(r)] && std::abs(us.back()(r)) > best) {
        best = std::abs(us.back()(r));
        i = r;
      }
    }
    if (i < 0) return finish(true);
  }
  return finish(false);
}

std::size_t default_leaf_threshold(const Shape3& shape) {
  const double s = std::log(static_cast<double>(shape.m)) + std::log(static_cast<double>(shape.n)) +
                   std::log(static_cast<double>(shape.p));
  const double t = std::ceil(5.0 * std::pow(s, 1.5));
  return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

std::string CompressionStats::report() const {
  std::ostringstream os;
  os.precision(17);
  os << "n_points = " << n_points << '\n'
     << "leaf_threshold = " << leaf_threshold << '\n'
     << "tree_depth = " << tree_depth << '\n'
     << "dense_blocks = " << dense_blocks << '\n'
     << "lowrank_blocks = " << lowrank_blocks << '\n'
     << "densified_blocks = " << densified_blocks << '\n'
     << "max_rank = " << max_rank << '\n'
     << "mean_rank = " << mean_rank << '\n'
     << "stored_bytes = " << stored_bytes << '\n'
     << "dense_bytes = " << dense_bytes << '\n'
     << "compression_ratio = "
     << (dense_bytes > 0 ? static_cast<double>(stored_bytes) / static_cast<double>(dense_bytes) : 0.0) << '\n'
     << "build_seconds = " << build_seconds << '\n';
  return os.str();
}

HOperator::HOperator(Shape3 shape, std::shared_ptr<const ClusterTree> tree, std::vector<Block> blocks,
                     HParams params, CompressionStats stats)
    : shape_(shape), tree_(std::move(tree)), blocks_(std::move(blocks)), params_(params), stats_(stats) {}

Tensor3 HOperator::apply_impl(const Tensor3& x, bool transpose) const {
  require_same_shape(shape_, x.shape(), transpose ? "h_apply_transpose" : "h_apply");
  const auto& perm = tree_->permutation();
  const auto n = static_cast<Eigen::Index>(perm.size());
  Eigen::VectorXd xp(n);
  for (Eigen::Index t = 0; t < n; ++t) xp(t) = x[perm[static_cast<std::size_t>(t)]];
  Eigen::VectorXd yp = Eigen::VectorXd::Zero(n);

  for (const Block& b : blocks_) {
    const ClusterNode& rn = tree_->node(b.row_node);
    const ClusterNode& cn = tree_->node(b.col_node);
    const auto r0 = static_cast<Eigen::Index>(rn.begin), rs = static_cast<Eigen::Index>(rn.size());
    const auto c0 = static_cast<Eigen::Index>(cn.begin), cs = static_cast<Eigen::Index>(cn.size());
    if (const auto* d = std::get_if<Eigen::MatrixXd>(&b.payload)) {
      if (transpose) {
        yp.segment(c0, cs).noalias() += d->transpose() * xp.segment(r0, rs);
      } else {
        yp.segment(r0, rs).noalias() += (*d) * xp.segment(c0, cs);
      }
    } else {
      const auto& lr = std::get<LowRankBlock>(b.payload);
      if (transpose) {
        const Eigen::VectorXd t = lr.u.transpose() * xp.segment(r0, rs);
        yp.segment(c0, cs).noalias() += lr.v * t;
      } else {
        const Eigen::VectorXd t = lr.v.transpose() * xp.segment(c0, cs);
        yp.segment(r0, rs).noalias() += lr.u * t;
      }
    }
  }

  Tensor3 y(shape_);
  for (Eigen::Index t = 0; t < n; ++t) y[perm[static_cast<std::size_t>(t)]] = yp(t);
  return y;
}

Tensor3 HOperator::apply(const Tensor3& x) const { return apply_impl(x, false); }

Tensor3 HOperator::apply_transpose(const Tensor3& x) const { return apply_impl(x, true); }

Eigen::MatrixXd HOperator::to_dense() const {
  const auto& perm = tree_->permutation();
  const auto n = static_cast<Eigen::Index>(perm.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (const Block& b : blocks_) {
    const ClusterNode& rn = tree_->node(b.row_node);
    const ClusterNode& cn = tree_->node(b.col_node);
    const Eigen::MatrixXd d = std::holds_alternative<Eigen::MatrixXd>(b.payload)
                                  ? std::get<Eigen::MatrixXd>(b.payload)
                                  : std::get<LowRankBlock>(b.payload).dense();
    for (std::size_t i = 0; i < rn.size(); ++i) {
      for (std::size_t j = 0; j < cn.size(); ++j) {
        out(static_cast<Eigen::Index>(perm[rn.begin + i]), static_cast<Eigen::Index>(perm[cn.begin + j])) =
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

namespace {

struct Builder {
  const PointSet& points;
  const EntryFn& entry;
  const ClusterTree& tree;
  HParams params;
  std::vector<HOperator::Block> blocks;
  CompressionStats stats;
  std::size_t rank_sum = 0;

  std::span<const std::size_t> span_of(const ClusterNode& n) const {
    return std::span(tree.permutation()).subspan(n.begin, n.size());
  }

  Eigen::MatrixXd dense_block(const ClusterNode& r, const ClusterNode& c) const {
    Eigen::MatrixXd d(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(c.size()));
    const auto rows = span_of(r);
    const auto cols = span_of(c);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entry(rows[i], cols[j]);
      }
    }
    return d;
  }

  std::size_t center_row(const ClusterNode& r) const {
    const Vec3 ctr = r.bbox.center();
    const auto rows = span_of(r);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Vec3 x = points[rows[i]].pos();
      const double d = (x[0] - ctr[0]) * (x[0] - ctr[0]) + (x[1] - ctr[1]) * (x[1] - ctr[1]) +
                       (x[2] - ctr[2]) * (x[2] - ctr[2]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  void add_dense(int rid, int cid) {
    const ClusterNode& r = tree.node(rid);
    const ClusterNode& c = tree.node(cid);
    blocks.push_back({rid, cid, dense_block(r, c)});
    ++stats.dense_blocks;
    stats.stored_bytes += r.size() * c.size() * sizeof(double);
  }

  void partition(int rid, int cid) {
    const ClusterNode& r = tree.node(rid);
    const ClusterNode& c = tree.node(cid);
    if (admissible(r, c, params.eta)) {
      AcaResult res = aca(entry, span_of(r), span_of(c), params.aca_tol, std::min(r.size(), c.size()), center_row(r));
      const std::size_t k = res.block.rank();
      if (!res.converged || k * (r.size() + c.size()) >= r.size() * c.size()) {
        ++stats.densified_blocks;
        add_dense(rid, cid);
        return;
      }
      stats.stored_bytes += k * (r.size() + c.size()) * sizeof(double);
      stats.max_rank = std::max(stats.max_rank, k);
      rank_sum += k;
      ++stats.lowrank_blocks;
      blocks.push_back({rid, cid, std::move(res.block)});
      return;
    }
    if (r.is_leaf() && c.is_leaf()) {
      add_dense(rid, cid);
      return;
    }
    if (r.is_leaf()) {
      partition(rid, c.left);
      partition(rid, c.right);
    } else if (c.is_leaf()) {
      partition(r.left, cid);
      partition(r.right, cid);
    } else {
      partition(r.left, c.left);
      partition(r.left, c.right);
      partition(r.right, c.left);
      partition(r.right, c.right);
    }
  }
};

}  // namespace

HOperator assemble_h(const PointSet& points, const EntryFn& entry, const HParams& params) {
  if (!(params.eta > 0.0)) throw std::invalid_argument("assemble_h: eta must be positive");
  if (!(params.aca_tol > 0.0)) throw std::invalid_argument("assemble_h: aca_tol must be positive");
  const auto start = std::chrono::steady_clock::now();
  HParams resolved = params;
  if (resolved.leaf_threshold == 0) resolved.leaf_threshold = default_leaf_threshold(points.shape());

  auto tree = std::make_shared<const ClusterTree>(build_cluster_tree(points, resolved.leaf_threshold));
  Builder b{points, entry, *tree, resolved, {}, {}, 0};
  b.partition(0, 0);

  CompressionStats stats = b.stats;
  stats.n_points = points.size();
  stats.leaf_threshold = resolved.leaf_threshold;
  stats.tree_depth = tree->depth();
  stats.mean_rank = stats.lowrank_blocks > 0
                        ? static_cast<double>(b.rank_sum) / static_cast<double>(stats.lowrank_blocks)
                        : 0.0;
  stats.dense_bytes = points.size() * points.size() * sizeof(double);
  stats.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {points.shape(), std::move(tree), std::move(b.blocks), resolved, stats};
}

HOperator assemble_h(const PointSet& points, const MQKernel& kernel, const HParams& params) {
  const EntryFn entry = [&](std::size_t i, std::size_t j) { return kernel(distance(points[i], points[j])); };
  return assemble_h(points, entry, params);
}

HOperator assemble_h(const PointSet& points, const MQKernel& kernel, const HelmholtzProblem& problem,
                     const HParams& params) {
  problem.validate();
  const EntryFn entry = [&](std::size_t i, std::size_t j) {
    return mq_helmholtz_row(kernel, problem, points[j], points[i]);
  };
  return assemble_h(points, entry, params);
}

}  // namespace rtk

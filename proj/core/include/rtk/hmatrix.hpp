#pragma once

#include "rtk/collocation.hpp"
#include "rtk/linear_map.hpp"
#include "rtk/rbf.hpp"
#include "rtk/tensor.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rtk {

/// Axis-parallel bounding box.
struct Box {
  Vec3 lo{0, 0, 0};
  Vec3 hi{0, 0, 0};

  [[nodiscard]] double diameter() const noexcept;
  [[nodiscard]] Vec3 center() const noexcept;
};

/// Euclidean distance between two boxes; zero when they intersect.
[[nodiscard]] double box_distance(const Box& a, const Box& b) noexcept;

/// Node of a binary cluster tree. [begin, end) indexes the tree permutation.
struct ClusterNode {
  std::size_t begin = 0;
  std::size_t end = 0;
  Box bbox;
  int left = -1;
  int right = -1;

  [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
  [[nodiscard]] bool is_leaf() const noexcept { return left < 0; }
};

/// Balanced binary cluster tree: median split along the longest box axis
/// until a cluster holds at most `leaf_threshold` points. Node 0 is the root.
class ClusterTree {
 public:
  ClusterTree(std::vector<std::size_t> permutation, std::vector<ClusterNode> nodes, std::size_t leaf_threshold)
      : perm_(std::move(permutation)), nodes_(std::move(nodes)), leaf_threshold_(leaf_threshold) {}

  /// perm[t] is the flat point index stored at tree position t.
  [[nodiscard]] const std::vector<std::size_t>& permutation() const noexcept { return perm_; }
  [[nodiscard]] const std::vector<ClusterNode>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const ClusterNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  [[nodiscard]] const ClusterNode& root() const { return nodes_.front(); }
  [[nodiscard]] std::size_t leaf_threshold() const noexcept { return leaf_threshold_; }
  [[nodiscard]] std::size_t depth() const;

 private:
  std::vector<std::size_t> perm_;
  std::vector<ClusterNode> nodes_;
  std::size_t leaf_threshold_;
};

[[nodiscard]] ClusterTree build_cluster_tree(const PointSet& points, std::size_t leaf_threshold);

/// max(diam a, diam b) <= eta * dist(a, b), with dist > 0.
[[nodiscard]] bool admissible(const Box& a, const Box& b, double eta);
[[nodiscard]] inline bool admissible(const ClusterNode& a, const ClusterNode& b, double eta) {
  return admissible(a.bbox, b.bbox, eta);
}

/// Block approximated as u * v^T.
struct LowRankBlock {
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;

  [[nodiscard]] std::size_t rank() const noexcept { return static_cast<std::size_t>(u.cols()); }
  [[nodiscard]] Eigen::MatrixXd dense() const { return u * v.transpose(); }
};

struct AcaResult {
  LowRankBlock block;
  /// False when max_rank crosses were taken without meeting the tolerance.
  bool converged = true;
};

using EntryFn = std::function<double(std::size_t row, std::size_t col)>;

/// Adaptive cross approximation with partial pivoting.
///
/// Entries are requested as entry(rows[i], cols[j]). Starting from local row
/// `first_row`, each step takes the residual row, pivots on its largest
/// entry, takes the matching residual column and appends the cross. Stops
/// when |u_k| |v_k| <= tol * |S_k|_F, with |S_k|_F tracked incrementally,
/// or when max_rank crosses exist. Rows whose residual vanishes are skipped.
[[nodiscard]] AcaResult aca(const EntryFn& entry, std::span<const std::size_t> rows,
                            std::span<const std::size_t> cols, double tol, std::size_t max_rank,
                            std::size_t first_row = 0);

struct HParams {
  double eta = 2.0;
  double aca_tol = 1e-6;
  /// 0 selects default_leaf_threshold(shape).
  std::size_t leaf_threshold = 0;
};

/// ceil(5 * (ln M + ln N + ln P)^{3/2}), at least 1.
[[nodiscard]] std::size_t default_leaf_threshold(const Shape3& shape);

struct CompressionStats {
  std::size_t n_points = 0;
  std::size_t leaf_threshold = 0;
  std::size_t tree_depth = 0;
  std::size_t dense_blocks = 0;
  std::size_t lowrank_blocks = 0;
  /// Admissible blocks stored dense because ACA did not converge or the
  /// factors would not save memory.
  std::size_t densified_blocks = 0;
  std::size_t max_rank = 0;
  double mean_rank = 0.0;
  std::size_t stored_bytes = 0;
  std::size_t dense_bytes = 0;
  double build_seconds = 0.0;

  /// Plain "key = value" lines.
  [[nodiscard]] std::string report() const;
};

/// Hierarchical operator over a cluster tree with dense and low-rank leaves.
class HOperator final : public LinearMap {
 public:
  struct Block {
    int row_node = 0;
    int col_node = 0;
    std::variant<Eigen::MatrixXd, LowRankBlock> payload;
  };

  HOperator(Shape3 shape, std::shared_ptr<const ClusterTree> tree, std::vector<Block> blocks, HParams params,
            CompressionStats stats);

  [[nodiscard]] Shape3 shape() const override { return shape_; }
  [[nodiscard]] Tensor3 apply(const Tensor3& x) const override;
  [[nodiscard]] Tensor3 apply_transpose(const Tensor3& x) const override;

  [[nodiscard]] const ClusterTree& tree() const noexcept { return *tree_; }
  [[nodiscard]] const std::vector<Block>& blocks() const noexcept { return blocks_; }
  [[nodiscard]] const HParams& params() const noexcept { return params_; }
  [[nodiscard]] const CompressionStats& stats() const noexcept { return stats_; }
  [[nodiscard]] std::size_t bytes() const noexcept { return stats_.stored_bytes; }

  /// Expand to the full flat matrix in tensor ordering (for testing).
  [[nodiscard]] Eigen::MatrixXd to_dense() const;

 private:
  Tensor3 apply_impl(const Tensor3& x, bool transpose) const;

  Shape3 shape_;
  std::shared_ptr<const ClusterTree> tree_;
  std::vector<Block> blocks_;
  HParams params_;
  CompressionStats stats_;
};

/// Compress an arbitrary kernel given by entry(target flat index, source flat index).
[[nodiscard]] HOperator assemble_h(const PointSet& points, const EntryFn& entry, const HParams& params);

/// Compressed system tensor A.
[[nodiscard]] HOperator assemble_h(const PointSet& points, const MQKernel& kernel, const HParams& params);

/// Compressed operator tensor H.
[[nodiscard]] HOperator assemble_h(const PointSet& points, const MQKernel& kernel, const HelmholtzProblem& problem,
                                   const HParams& params);

[[nodiscard]] inline Tensor3 h_apply(const HOperator& h, const Tensor3& x) { return h.apply(x); }
[[nodiscard]] inline Tensor3 h_apply_transpose(const HOperator& h, const Tensor3& x) {
  return h.apply_transpose(x);
}

}  // namespace rtk

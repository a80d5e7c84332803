#pragma once

#include "rtk/tensor.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rtk {

/// Order-4 tensor kept as an ordered list of equally shaped frontal slices.
/// Krylov bases (V_m, Q_m, P_{m+1}) are stored this way.
class SliceStack4 {
 public:
  SliceStack4() = default;
  explicit SliceStack4(Shape3 shape) : shape_(shape) {}
  SliceStack4(Shape3 shape, std::vector<Tensor3> slices);

  [[nodiscard]] const Shape3& shape() const noexcept { return shape_; }
  [[nodiscard]] std::size_t size() const noexcept { return slices_.size(); }
  [[nodiscard]] bool empty() const noexcept { return slices_.empty(); }

  [[nodiscard]] const Tensor3& operator[](std::size_t s) const { return slices_[s]; }
  [[nodiscard]] const std::vector<Tensor3>& slices() const noexcept { return slices_; }

  void push_back(Tensor3 slice);
  /// Keep the first `count` slices.
  void truncate(std::size_t count);

  /// Matrix of pairwise inner products <slice_i, slice_j>.
  [[nodiscard]] Eigen::MatrixXd gram() const;

 private:
  Shape3 shape_;
  std::vector<Tensor3> slices_;
};

/// 4-mode product: result slice r = sum_s w(r, s) * stack[s].
///
/// With this orientation the Arnoldi relation reads
/// H *_3 V_m = mode4_matmul(V_{m+1}, Htilde_m^T).
[[nodiscard]] SliceStack4 mode4_matmul(const SliceStack4& stack, const Eigen::MatrixXd& w);

/// 4-mode vector product: sum_s y(s) * stack[s].
[[nodiscard]] Tensor3 mode4_vecmul(const SliceStack4& stack, const Eigen::VectorXd& y);

}  // namespace rtk

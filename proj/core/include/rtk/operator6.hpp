#pragma once

#include "rtk/linear_map.hpp"
#include "rtk/tensor.hpp"

#include <Eigen/Dense>

namespace rtk {

/// Order-6 tensor in R^{M x N x P x M x N x P}, stored through its flattening.
///
/// flat(row(i,j,k), col(i',j',k')) holds a_{ijk i'j'k'}, where row/col are the
/// Tensor3 flattening. Under this isomorphism the Einstein product *_3 with an
/// order-3 tensor is a matrix-vector product and *_3 between two operators is
/// a matrix-matrix product.
class Operator6 final : public LinearMap {
 public:
  Operator6() = default;
  Operator6(Shape3 shape, Eigen::MatrixXd flat);

  static Operator6 identity(Shape3 shape);
  static Operator6 zeros(Shape3 shape);

  [[nodiscard]] Shape3 shape() const override { return shape_; }
  [[nodiscard]] const Eigen::MatrixXd& flat() const noexcept { return flat_; }

  /// Entry a_{ijk mnp}, 0-based.
  [[nodiscard]] double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t m, std::size_t n,
                                  std::size_t p) const;

  [[nodiscard]] Tensor3 apply(const Tensor3& x) const override;
  [[nodiscard]] Tensor3 apply_transpose(const Tensor3& x) const override;

  /// b_{mnp ijk} = a_{ijk mnp}
  [[nodiscard]] Operator6 transpose() const;

  /// Sum of the diagonal entries a_{ijk ijk}.
  [[nodiscard]] double trace() const;

  [[nodiscard]] std::size_t bytes() const noexcept {
    return static_cast<std::size_t>(flat_.size()) * sizeof(double);
  }

 private:
  Shape3 shape_;
  Eigen::MatrixXd flat_ = Eigen::MatrixXd::Zero(1, 1);
};

/// Einstein product op *_3 x.
[[nodiscard]] Tensor3 einstein_apply(const Operator6& op, const Tensor3& x);

/// Einstein product op^T *_3 x.
[[nodiscard]] Tensor3 einstein_apply_transpose(const Operator6& op, const Tensor3& x);

/// Einstein product a *_3 b of two order-6 operators.
[[nodiscard]] Operator6 compose(const Operator6& a, const Operator6& b);

}  // namespace rtk

#include "rtk/operator6.hpp"

namespace rtk {

Operator6::Operator6(Shape3 shape, Eigen::MatrixXd flat) : shape_(shape), flat_(std::move(flat)) {
  const auto side = static_cast<Eigen::Index>(shape_.total());
  if (flat_.rows() != side || flat_.cols() != side) {
    throw DimensionError("Operator6: flat matrix is " + std::to_string(flat_.rows()) + "x" +
                         std::to_string(flat_.cols()) + ", expected square of side " +
                         std::to_string(side) + " for shape " + shape_.str());
  }
}

Operator6 Operator6::identity(Shape3 shape) {
  const auto side = static_cast<Eigen::Index>(shape.total());
  return {shape, Eigen::MatrixXd::Identity(side, side)};
}

Operator6 Operator6::zeros(Shape3 shape) {
  const auto side = static_cast<Eigen::Index>(shape.total());
  return {shape, Eigen::MatrixXd::Zero(side, side)};
}

double Operator6::operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t m, std::size_t n,
                             std::size_t p) const {
  return flat_(static_cast<Eigen::Index>(shape_.index(i, j, k)),
               static_cast<Eigen::Index>(shape_.index(m, n, p)));
}

Tensor3 Operator6::apply(const Tensor3& x) const {
  require_same_shape(shape_, x.shape(), "einstein_apply");
  Tensor3 y(shape_);
  y.vec().noalias() = flat_ * x.vec();
  return y;
}

Tensor3 Operator6::apply_transpose(const Tensor3& x) const {
  require_same_shape(shape_, x.shape(), "einstein_apply_transpose");
  Tensor3 y(shape_);
  y.vec().noalias() = flat_.transpose() * x.vec();
  return y;
}

Operator6 Operator6::transpose() const { return {shape_, flat_.transpose()}; }

double Operator6::trace() const { return flat_.trace(); }

Tensor3 einstein_apply(const Operator6& op, const Tensor3& x) { return op.apply(x); }

Tensor3 einstein_apply_transpose(const Operator6& op, const Tensor3& x) { return op.apply_transpose(x); }

Operator6 compose(const Operator6& a, const Operator6& b) {
  require_same_shape(a.shape(), b.shape(), "compose");
  return {a.shape(), a.flat() * b.flat()};
}

}  // namespace rtk

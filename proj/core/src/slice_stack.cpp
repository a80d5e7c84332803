#include "rtk/slice_stack.hpp"

namespace rtk {

SliceStack4::SliceStack4(Shape3 shape, std::vector<Tensor3> slices) : shape_(shape) {
  slices_.reserve(slices.size());
  for (auto& s : slices) push_back(std::move(s));
}

void SliceStack4::push_back(Tensor3 slice) {
  require_same_shape(shape_, slice.shape(), "SliceStack4::push_back");
  slices_.push_back(std::move(slice));
}

void SliceStack4::truncate(std::size_t count) {
  if (count < slices_.size()) slices_.resize(count);
}

Eigen::MatrixXd SliceStack4::gram() const {
  const auto k = static_cast<Eigen::Index>(slices_.size());
  Eigen::MatrixXd g(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      g(i, j) = inner(slices_[i], slices_[j]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

SliceStack4 mode4_matmul(const SliceStack4& stack, const Eigen::MatrixXd& w) {
  if (static_cast<std::size_t>(w.cols()) != stack.size()) {
    throw DimensionError("mode4_matmul: matrix has " + std::to_string(w.cols()) + " columns but stack has " +
                         std::to_string(stack.size()) + " slices");
  }
  SliceStack4 out(stack.shape());
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    Tensor3 slice(stack.shape());
    for (std::size_t s = 0; s < stack.size(); ++s) {
      const double c = w(r, static_cast<Eigen::Index>(s));
      if (c != 0.0) slice.axpy(c, stack[s]);
    }
    out.push_back(std::move(slice));
  }
  return out;
}

Tensor3 mode4_vecmul(const SliceStack4& stack, const Eigen::VectorXd& y) {
  if (static_cast<std::size_t>(y.size()) != stack.size()) {
    throw DimensionError("mode4_vecmul: vector length " + std::to_string(y.size()) + " but stack has " +
                         std::to_string(stack.size()) + " slices");
  }
  Tensor3 out(stack.shape());
  for (std::size_t s = 0; s < stack.size(); ++s) out.axpy(y(static_cast<Eigen::Index>(s)), stack[s]);
  return out;
}

}  // namespace rtk

#pragma once

#include "rtk/tensor.hpp"

namespace rtk {

/// A linear operator on order-3 tensors of one fixed shape, together with
/// its transpose. Dense and hierarchical operators both implement it so the
/// Krylov solvers can run matrix-free.
class LinearMap {
 public:
  virtual ~LinearMap() = default;

  [[nodiscard]] virtual Shape3 shape() const = 0;
  [[nodiscard]] virtual Tensor3 apply(const Tensor3& x) const = 0;
  [[nodiscard]] virtual Tensor3 apply_transpose(const Tensor3& x) const = 0;

 protected:
  LinearMap() = default;
  LinearMap(const LinearMap&) = default;
  LinearMap& operator=(const LinearMap&) = default;
  LinearMap(LinearMap&&) = default;
  LinearMap& operator=(LinearMap&&) = default;
};

}  // namespace rtk

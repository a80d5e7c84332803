#include "rtk/tensor.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rtk {

Shape3::Shape3(std::size_t m_, std::size_t n_, std::size_t p_) : m(m_), n(n_), p(p_) {
  if (m == 0 || n == 0 || p == 0) {
    throw DimensionError("Shape3: extents must be positive, got " + str());
  }
  const std::size_t max = std::numeric_limits<std::size_t>::max();
  if (n > max / m || p > max / (m * n)) {
    throw DimensionError("Shape3: total size overflows the index range");
  }
}

std::string Shape3::str() const {
  std::ostringstream os;
  os << m << 'x' << n << 'x' << p;
  return os.str();
}

void require_same_shape(const Shape3& a, const Shape3& b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.str() + " vs " + b.str());
  }
}

Tensor3::Tensor3(Shape3 shape) : shape_(shape), data_(shape.total(), 0.0) {}

Tensor3::Tensor3(Shape3 shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.total()) {
    throw DimensionError("Tensor3: data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_.str());
  }
}

Tensor3 Tensor3::unit(Shape3 shape, std::size_t i, std::size_t j, std::size_t k) {
  if (i >= shape.m || j >= shape.n || k >= shape.p) {
    throw DimensionError("Tensor3::unit: index outside " + shape.str());
  }
  Tensor3 t(shape);
  t(i, j, k) = 1.0;
  return t;
}

bool Tensor3::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  require_same_shape(shape_, other.shape_, "Tensor3::operator+=");
  vec() += other.vec();
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  require_same_shape(shape_, other.shape_, "Tensor3::operator-=");
  vec() -= other.vec();
  return *this;
}

Tensor3& Tensor3::operator*=(double alpha) noexcept {
  vec() *= alpha;
  return *this;
}

Tensor3& Tensor3::axpy(double alpha, const Tensor3& x) {
  require_same_shape(shape_, x.shape_, "Tensor3::axpy");
  vec() += alpha * x.vec();
  return *this;
}

double inner(const Tensor3& x, const Tensor3& y) {
  require_same_shape(x.shape(), y.shape(), "inner");
  return x.vec().dot(y.vec());
}

double fro_norm(const Tensor3& x) { return std::sqrt(inner(x, x)); }

}  // namespace rtk

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtk {

/// Raised whenever two tensor-valued arguments disagree in shape.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Extents of an order-3 tensor. All three extents are at least one.
struct Shape3 {
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t p = 1;

  Shape3() = default;
  Shape3(std::size_t m_, std::size_t n_, std::size_t p_);

  [[nodiscard]] std::size_t total() const noexcept { return m * n * p; }

  /// Row-major flat position of the 0-based index (i, j, k).
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return (i * n + j) * p + k;
  }

  [[nodiscard]] std::string str() const;

  friend bool operator==(const Shape3&, const Shape3&) = default;
};

void require_same_shape(const Shape3& a, const Shape3& b, const char* what);

/// Dense order-3 array of doubles stored row-major over (i, j, k).
///
/// The flattening `index(i,j,k) = (i*n + j)*p + k` is the single bridge
/// between tensor and vector views; Operator6 rows and columns use it too.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Shape3 shape);
  Tensor3(Shape3 shape, std::vector<double> data);

  static Tensor3 zeros(Shape3 shape) { return Tensor3(shape); }
  /// Coordinate tensor with a single one at 0-based (i, j, k).
  static Tensor3 unit(Shape3 shape, std::size_t i, std::size_t j, std::size_t k);

  [[nodiscard]] const Shape3& shape() const noexcept { return shape_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<double> data() noexcept { return data_; }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[shape_.index(i, j, k)]; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[shape_.index(i, j, k)]; }
  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  [[nodiscard]] Eigen::Map<const Eigen::VectorXd> vec() const {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }
  [[nodiscard]] Eigen::Map<Eigen::VectorXd> vec() {
    return {data_.data(), static_cast<Eigen::Index>(data_.size())};
  }

  [[nodiscard]] bool all_finite() const noexcept;

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(double alpha) noexcept;
  /// this += alpha * x
  Tensor3& axpy(double alpha, const Tensor3& x);

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(double alpha, Tensor3 a) { return a *= alpha; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  Shape3 shape_;
  std::vector<double> data_ = std::vector<double>(1, 0.0);
};

/// Trace inner product <x, y> = sum_ijk x_ijk * y_ijk.
[[nodiscard]] double inner(const Tensor3& x, const Tensor3& y);

/// Frobenius norm sqrt(<x, x>).
[[nodiscard]] double fro_norm(const Tensor3& x);

}  // namespace rtk

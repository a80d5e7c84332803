#pragma once

#include "rtk/collocation.hpp"
#include "rtk/operator6.hpp"
#include "rtk/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rtk {

/// Multiquadric kernel phi(r) = sqrt(1 + eps^2 r^2).
class MQKernel {
 public:
  explicit MQKernel(double epsilon = 1.0);

  [[nodiscard]] double epsilon() const noexcept { return eps_; }

  [[nodiscard]] double operator()(double r) const noexcept { return std::sqrt(1.0 + eps2_ * r * r); }
  /// phi'(r) / r = eps^2 / phi(r); finite at r = 0.
  [[nodiscard]] double dphi_over_r(double r) const noexcept { return eps2_ / (*this)(r); }
  /// 3D Laplacian of phi(|x|): eps^2 (3 + 2 eps^2 r^2) / phi^3.
  [[nodiscard]] double laplacian(double r) const noexcept;

 private:
  double eps_;
  double eps2_;
};

[[nodiscard]] double mq_eval(const MQKernel& kernel, double r);

/// Sum of Gaussians u(x) = sum_j exp(-|x - c_j|^2 / sigma_j).
class ExactSolution {
 public:
  struct Term {
    Vec3 center;
    double sigma;
  };

  explicit ExactSolution(std::vector<Term> terms);

  [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }

  [[nodiscard]] double value(const Vec3& x) const;
  [[nodiscard]] Vec3 gradient(const Vec3& x) const;
  [[nodiscard]] double laplacian(const Vec3& x) const;

  /// exp(-((x-0.25)^2 + (y-0.25)^2 + z^2) / 20)
  static ExactSolution sphere_example();
  /// exp(-(x^2 + y^2 + z^2) / 20)
  static ExactSolution cube_example();
  /// exp(-((x-1.75)^2 + y^2 + (z-0.1)^2) / 0.5) + exp(-(x^2+y^2+z^2) / 0.5)
  static ExactSolution casing_example();

 private:
  std::vector<Term> terms_;
};

/// Helmholtz problem  Lap u + k^2 u = f  inside, a u + b du/dn = g on the
/// boundary, with data manufactured from `exact`.
struct HelmholtzProblem {
  double wavenumber = 1.0;
  double boundary_a = 1.0;
  double boundary_b = 0.0;
  ExactSolution exact = ExactSolution::sphere_example();

  void validate() const;
};

/// Entry of the collocation operator for one (target, source) pair:
/// (Lap + k^2) phi for interior targets, a phi + b dphi/dn for boundary ones.
[[nodiscard]] double mq_helmholtz_row(const MQKernel& kernel, const HelmholtzProblem& problem, const Point& source,
                                      const Point& target);

/// System tensor: A_{ijk mnp} = phi(|x_ijk - x_mnp|).
[[nodiscard]] Operator6 assemble_A(const PointSet& points, const MQKernel& kernel);

/// Operator tensor: H_{ijk mnp} = mq_helmholtz_row(source = x_mnp, target = x_ijk).
[[nodiscard]] Operator6 assemble_H(const PointSet& points, const MQKernel& kernel, const HelmholtzProblem& problem);

/// Right-hand side manufactured from the exact solution.
[[nodiscard]] Tensor3 assemble_F(const PointSet& points, const HelmholtzProblem& problem);

/// u_exact sampled at the collocation points.
[[nodiscard]] Tensor3 sample_exact(const PointSet& points, const ExactSolution& exact);

/// U = A *_3 Y.
[[nodiscard]] Tensor3 evaluate_U(const Operator6& A, const Tensor3& Y);

/// U = A *_3 Y with the kernel evaluated on the fly; O(n) memory.
[[nodiscard]] Tensor3 evaluate_U_direct(const PointSet& points, const MQKernel& kernel, const Tensor3& Y);

[[nodiscard]] inline double distance(const Point& a, const Point& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace rtk

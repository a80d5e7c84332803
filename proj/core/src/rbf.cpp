#include "rtk/rbf.hpp"

#include <cmath>

namespace rtk {

MQKernel::MQKernel(double epsilon) : eps_(epsilon), eps2_(epsilon * epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("MQKernel: shape parameter must be positive and finite");
  }
}

double MQKernel::laplacian(double r) const noexcept {
  const double phi = (*this)(r);
  return eps2_ * (3.0 + 2.0 * eps2_ * r * r) / (phi * phi * phi);
}

double mq_eval(const MQKernel& kernel, double r) { return kernel(r); }

ExactSolution::ExactSolution(std::vector<Term> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("ExactSolution: at least one Gaussian term is required");
  for (const auto& t : terms_) {
    if (!(t.sigma > 0.0)) throw std::invalid_argument("ExactSolution: sigma must be positive");
  }
}

double ExactSolution::value(const Vec3& x) const {
  double u = 0.0;
  for (const auto& t : terms_) {
    const double dx = x[0] - t.center[0], dy = x[1] - t.center[1], dz = x[2] - t.center[2];
    u += std::exp(-(dx * dx + dy * dy + dz * dz) / t.sigma);
  }
  return u;
}

Vec3 ExactSolution::gradient(const Vec3& x) const {
  Vec3 g{0, 0, 0};
  for (const auto& t : terms_) {
    const Vec3 d{x[0] - t.center[0], x[1] - t.center[1], x[2] - t.center[2]};
    const double e = std::exp(-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / t.sigma);
    for (std::size_t a = 0; a < 3; ++a) g[a] -= 2.0 * d[a] / t.sigma * e;
  }
  return g;
}

double ExactSolution::laplacian(const Vec3& x) const {
  double lap = 0.0;
  for (const auto& t : terms_) {
    const double dx = x[0] - t.center[0], dy = x[1] - t.center[1], dz = x[2] - t.center[2];
    const double r2 = dx * dx + dy * dy + dz * dz;
    lap += std::exp(-r2 / t.sigma) * (4.0 * r2 / (t.sigma * t.sigma) - 6.0 / t.sigma);
  }
  return lap;
}

ExactSolution ExactSolution::sphere_example() { return ExactSolution({{{0.25, 0.25, 0.0}, 20.0}}); }

ExactSolution ExactSolution::cube_example() { return ExactSolution({{{0.0, 0.0, 0.0}, 20.0}}); }

ExactSolution ExactSolution::casing_example() {
  return ExactSolution({{{1.75, 0.0, 0.1}, 0.5}, {{0.0, 0.0, 0.0}, 0.5}});
}

void HelmholtzProblem::validate() const {
  if (!(wavenumber >= 0.0)) throw std::invalid_argument("HelmholtzProblem: wavenumber must be nonnegative");
  if (boundary_a == 0.0 && boundary_b == 0.0) {
    throw std::invalid_argument("HelmholtzProblem: boundary operator a u + b du/dn needs (a, b) != (0, 0)");
  }
}

namespace {

const Vec3& require_normal(const Point& target) {
  if (!target.normal) {
    throw std::invalid_argument("boundary point without a normal, required when b != 0");
  }
  return *target.normal;
}

}  // namespace

double mq_helmholtz_row(const MQKernel& kernel, const HelmholtzProblem& problem, const Point& source,
                        const Point& target) {
  const double r = distance(target, source);
  if (target.kind == PointKind::Interior) {
    const double k2 = problem.wavenumber * problem.wavenumber;
    return kernel.laplacian(r) + k2 * kernel(r);
  }
  double value = problem.boundary_a * kernel(r);
  if (problem.boundary_b != 0.0) {
    const Vec3& n = require_normal(target);
    const double proj = (target.x - source.x) * n[0] + (target.y - source.y) * n[1] + (target.z - source.z) * n[2];
    value += problem.boundary_b * kernel.dphi_over_r(r) * proj;
  }
  return value;
}

Operator6 assemble_A(const PointSet& points, const MQKernel& kernel) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd flat(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    flat(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = kernel(distance(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]));
      flat(i, j) = v;
      flat(j, i) = v;
    }
  }
  return {points.shape(), std::move(flat)};
}

Operator6 assemble_H(const PointSet& points, const MQKernel& kernel, const HelmholtzProblem& problem) {
  problem.validate();
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd flat(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Point& source = points[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) {
      flat(i, j) = mq_helmholtz_row(kernel, problem, source, points[static_cast<std::size_t>(i)]);
    }
  }
  return {points.shape(), std::move(flat)};
}

Tensor3 assemble_F(const PointSet& points, const HelmholtzProblem& problem) {
  problem.validate();
  Tensor3 f(points.shape());
  const double k2 = problem.wavenumber * problem.wavenumber;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& pt = points[i];
    const Vec3 x = pt.pos();
    if (pt.kind == PointKind::Interior) {
      f[i] = problem.exact.laplacian(x) + k2 * problem.exact.value(x);
    } else {
      double g = problem.boundary_a * problem.exact.value(x);
      if (problem.boundary_b != 0.0) {
        const Vec3& n = require_normal(pt);
        const Vec3 grad = problem.exact.gradient(x);
        g += problem.boundary_b * (grad[0] * n[0] + grad[1] * n[1] + grad[2] * n[2]);
      }
      f[i] = g;
    }
  }
  return f;
}

Tensor3 sample_exact(const PointSet& points, const ExactSolution& exact) {
  Tensor3 u(points.shape());
  for (std::size_t i = 0; i < points.size(); ++i) u[i] = exact.value(points[i].pos());
  return u;
}

Tensor3 evaluate_U(const Operator6& A, const Tensor3& Y) { return einstein_apply(A, Y); }

Tensor3 evaluate_U_direct(const PointSet& points, const MQKernel& kernel, const Tensor3& Y) {
  require_same_shape(points.shape(), Y.shape(), "evaluate_U_direct");
  Tensor3 u(points.shape());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) acc += kernel(distance(points[i], points[j])) * Y[j];
    u[i] = acc;
  }
  return u;
}

}  // namespace rtk

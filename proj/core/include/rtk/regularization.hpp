#pragma once

#include <Eigen/Dense>

namespace rtk {

/// Singular values of a small projected matrix B (descending) and the
/// projected right-hand side gtilde = beta * U^T e_1 in the left singular basis.
struct GcvSpectrum {
  Eigen::VectorXd sigma;
  Eigen::VectorXd gtilde;
  double beta = 0.0;

  static GcvSpectrum from_projected(const Eigen::MatrixXd& projected, double beta);
};

/// GCV(lambda) = sum_i (g_i / (s_i^2 + lambda))^2 / (sum_i 1 / (s_i^2 + lambda))^2
///
/// lambda multiplies |y|^2 in the Tikhonov functional, so it stands for mu^2
/// in the GMRES formulation. The sum runs over the m singular triplets only.
[[nodiscard]] double gcv_value(const GcvSpectrum& spectrum, double lambda);

struct GcvChoice {
  double lambda = 0.0;
  double value = 0.0;
  /// GCV was flat over the whole search interval; lambda is its lower end.
  bool constant = false;
};

/// Minimize GCV over log(lambda) in [log max(s_min^2, 1e-16 s_max^2), log s_max^2]:
/// a 200-point log grid followed by golden-section refinement around the
/// best grid point.
[[nodiscard]] GcvChoice gcv_minimize(const GcvSpectrum& spectrum);
[[nodiscard]] GcvChoice gcv_minimize(const Eigen::MatrixXd& projected, double beta);

/// Norm of the projected Tikhonov residual |B y_lambda - beta e_1|, including
/// the component of beta e_1 outside range(B).
[[nodiscard]] double projected_residual(const GcvSpectrum& spectrum, double lambda);

/// Safety factor of the discrepancy principle.
inline constexpr double kDiscrepancySafety = 1.01;

struct DiscrepancyChoice {
  double lambda = 0.0;
  /// False when the target residual lies outside the reachable range; lambda
  /// is then the nearer end of the search interval.
  bool attained = true;
};

/// Choose lambda so that |B y_lambda - beta e_1| = 1.01 * noise_level * beta,
/// by bisection on log(lambda) over [1e-16 s_max^2, 1e8 s_max^2].
[[nodiscard]] DiscrepancyChoice discrepancy_select(const Eigen::MatrixXd& projected, double beta, double noise_level);

}  // namespace rtk

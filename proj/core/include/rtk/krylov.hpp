#pragma once

#include "rtk/linear_map.hpp"
#include "rtk/slice_stack.hpp"
#include "rtk/tensor.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace rtk {

/// A norm counts as zero (breakdown) when it is at most this fraction of the
/// norm of the same tensor before orthogonalization.
inline constexpr double kBreakdownTolerance = 1e-14;

/// A second Gram-Schmidt pass runs when orthogonalization shrinks a tensor
/// below this fraction of its original norm.
inline constexpr double kReorthogonalizationRatio = 0.7;

/// (k+1) x k upper Hessenberg matrix from k global Arnoldi steps.
struct HessenbergFactor {
  Eigen::MatrixXd h;

  [[nodiscard]] std::size_t steps() const noexcept { return static_cast<std::size_t>(h.cols()); }
};

struct ArnoldiResult {
  /// V_1 ... V_{k+1}; only V_1 ... V_k when the process broke down.
  SliceStack4 basis;
  HessenbergFactor hessenberg;
  double beta = 0.0;
  bool breakdown = false;
};

/// Global Arnoldi process with the Einstein product: builds an orthonormal
/// basis of K_m(op, v) under the trace inner product and the Hessenberg
/// matrix with op *_3 V_m = V_{m+1} x_4 Htilde_m^T.
[[nodiscard]] ArnoldiResult etga(const LinearMap& op, const Tensor3& v, std::size_t m);

/// Lower bidiagonal factor of the global Golub-Kahan process.
///
/// rho holds rho_1..rho_k (diagonal) and sigma holds sigma_1..sigma_{k+1};
/// sigma_1 = |f| and sigma_2..sigma_{k+1} are the subdiagonal.
struct BidiagFactor {
  Eigen::VectorXd rho;
  Eigen::VectorXd sigma;

  [[nodiscard]] std::size_t steps() const noexcept { return static_cast<std::size_t>(rho.size()); }
  /// C_k, k x k lower bidiagonal.
  [[nodiscard]] Eigen::MatrixXd square() const;
  /// Ctilde_k = [C_k; sigma_{k+1} e_k^T], (k+1) x k.
  [[nodiscard]] Eigen::MatrixXd tilde() const;
};

/// Incremental global Golub-Kahan bidiagonalization of op started from f.
///
///   sigma_1 P_1 = f
///   rho_j Q_j = op^T *_3 P_j - sigma_j Q_{j-1}
///   sigma_{j+1} P_{j+1} = op *_3 Q_j - rho_j P_j
///
/// so that op *_3 Q_k = P_{k+1} x_4 Ctilde_k and op^T *_3 P_k = Q_k x_4 C_k^T.
/// Each new slice is reorthogonalized against all earlier slices of its family.
class GolubKahanProcess {
 public:
  GolubKahanProcess(const LinearMap& op, const Tensor3& f);

  /// Advance one step. Returns false when no new Q slice could be formed
  /// (rho breakdown); the factorization is left unchanged in that case.
  bool step();

  [[nodiscard]] std::size_t steps() const noexcept { return q_.size(); }
  /// True once either recurrence produced a zero norm.
  [[nodiscard]] bool broken_down() const noexcept { return broken_down_; }
  [[nodiscard]] const SliceStack4& q() const noexcept { return q_; }
  [[nodiscard]] const SliceStack4& p() const noexcept { return p_; }
  [[nodiscard]] BidiagFactor bidiag() const;
  [[nodiscard]] double sigma1() const noexcept { return sigma_.front(); }

 private:
  const LinearMap* op_;
  SliceStack4 q_;
  SliceStack4 p_;
  std::vector<double> rho_;
  std::vector<double> sigma_;
  bool broken_down_ = false;
};

struct GolubKahanResult {
  SliceStack4 q;
  SliceStack4 p;
  BidiagFactor bidiag;
  bool breakdown = false;
};

/// Run m steps of the global Golub-Kahan process (fewer on breakdown).
[[nodiscard]] GolubKahanResult ggkb(const LinearMap& op, const Tensor3& f, std::size_t m);

struct ReducedSolution {
  Eigen::VectorXd y;
  /// lambda = 0 and the projected matrix is rank deficient.
  bool singular = false;
};

/// argmin |Htilde y - beta e_1|^2 + lambda |y|^2 through the stacked
/// least-squares problem [Htilde; sqrt(lambda) I] y = [beta e_1; 0].
[[nodiscard]] ReducedSolution solve_reduced_gmres(const HessenbergFactor& h, double beta, double lambda);

/// argmin |Ctilde y - sigma_1 e_1|^2 + lambda |y|^2, by Givens elimination of
/// the damped bidiagonal [Ctilde; sqrt(lambda) I].
[[nodiscard]] ReducedSolution solve_reduced_lsqr(const BidiagFactor& c, double sigma1, double lambda);

/// How the Tikhonov parameter of each projected problem is chosen.
struct MuStrategy {
  enum class Kind { Gcv, Fixed, Discrepancy };
  Kind kind = Kind::Gcv;
  /// Fixed: lambda itself. Discrepancy: relative noise level nu.
  double value = 0.0;

  static MuStrategy gcv() { return {Kind::Gcv, 0.0}; }
  static MuStrategy fixed(double lambda) { return {Kind::Fixed, lambda}; }
  static MuStrategy discrepancy(double noise) { return {Kind::Discrepancy, noise}; }

  /// Parses "gcv", "fixed:V" or "discrepancy:NU".
  static MuStrategy parse(const std::string& text);
  [[nodiscard]] std::string str() const;
};

struct SolverConfig {
  /// Krylov dimension between GMRES restarts.
  std::size_t restart = 10;
  /// Relative-change stopping tolerance.
  double tau = 1e-12;
  /// Residual stopping tolerance; 0 disables the test.
  double tol = 1e-6;
  /// GMRES: outer cycles. LSQR: Golub-Kahan steps.
  std::size_t maxit = 10;
  MuStrategy mu = MuStrategy::gcv();
  /// When nonempty, lambda for iteration i is schedule[min(i, size-1)] and
  /// `mu` is ignored.
  std::vector<double> lambda_schedule;
  /// Called with (iteration, iterate) after every outer iteration.
  std::function<void(std::size_t, const Tensor3&)> on_iterate;

  void validate() const;

  static SolverConfig gmres_defaults();
  static SolverConfig lsqr_defaults();
};

enum class Termination { RelChange, Residual, MaxIter, Breakdown };

[[nodiscard]] std::string to_string(Termination t);

struct SolveReport {
  Tensor3 solution;
  std::size_t outer_iterations = 0;
  std::size_t inner_steps = 0;
  /// Internal Tikhonov weight per iteration.
  std::vector<double> lambda_history;
  /// The same weight in the conventional parametrization: sqrt(lambda) for
  /// GMRES, lambda for LSQR.
  std::vector<double> mu_history;
  std::vector<double> residual_history;
  std::vector<double> relchange_history;
  double wall_time = 0.0;
  Termination termination = Termination::MaxIter;
};

/// Restarted global GMRES with Tikhonov regularization of each projected
/// problem. Each cycle: R = f - op *_3 X, Arnoldi on (op, R), choose lambda,
/// X <- X + V y. Stops on relative change <= tau, true residual <= tol, or
/// maxit cycles.
[[nodiscard]] SolveReport gmres_tikhonov(const LinearMap& op, const Tensor3& f, const Tensor3& x0,
                                         const SolverConfig& cfg);

/// Global LSQR with Tikhonov regularization. The Golub-Kahan basis grows one
/// step at a time; at step k lambda is chosen on Ctilde_k and X_k = Q_k x_4 y_k.
/// Stops on relative change between successive iterates <= tau, projected
/// residual <= tol, breakdown, or maxit steps.
[[nodiscard]] SolveReport lsqr_tikhonov(const LinearMap& op, const Tensor3& f, const SolverConfig& cfg);

}  // namespace rtk

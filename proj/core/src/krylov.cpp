#include "rtk/krylov.hpp"

#include "rtk/regularization.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rtk {

namespace {

// One classical Gram-Schmidt pass of w against every slice of `basis`,
// repeated once if w shrank below kReorthogonalizationRatio of its norm.
// The removed coefficients are accumulated into `coef` when given.
void reorthogonalize(Tensor3& w, const SliceStack4& basis, Eigen::VectorXd* coef = nullptr) {
  for (int pass = 0; pass < 2; ++pass) {
    const double before = fro_norm(w);
    Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t s = 0; s < basis.size(); ++s) c(static_cast<Eigen::Index>(s)) = inner(basis[s], w);
    for (std::size_t s = 0; s < basis.size(); ++s) w.axpy(-c(static_cast<Eigen::Index>(s)), basis[s]);
    if (coef != nullptr) *coef += c;
    if (fro_norm(w) >= kReorthogonalizationRatio * before) break;
  }
}

bool is_breakdown(double after, double before) { return before == 0.0 || after <= kBreakdownTolerance * before; }

double relative_change(const Tensor3& next, const Tensor3& prev) {
  const double diff = fro_norm(next - prev);
  const double scale = fro_norm(prev);
  if (scale == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / scale;
}

double select_lambda(const SolverConfig& cfg, std::size_t iter, const Eigen::MatrixXd& projected, double beta) {
  if (!cfg.lambda_schedule.empty()) {
    return cfg.lambda_schedule[std::min(iter, cfg.lambda_schedule.size() - 1)];
  }
  switch (cfg.mu.kind) {
    case MuStrategy::Kind::Fixed: return cfg.mu.value;
    case MuStrategy::Kind::Discrepancy: return discrepancy_select(projected, beta, cfg.mu.value).lambda;
    case MuStrategy::Kind::Gcv: break;
  }
  return gcv_minimize(projected, beta).lambda;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ArnoldiResult etga(const LinearMap& op, const Tensor3& v, std::size_t m) {
  require_same_shape(op.shape(), v.shape(), "etga");
  if (m == 0) throw std::invalid_argument("etga: m must be at least 1");
  const double beta = fro_norm(v);
  if (beta == 0.0) throw std::invalid_argument("etga: zero start tensor");

  ArnoldiResult out;
  out.beta = beta;
  out.basis = SliceStack4(v.shape());
  out.basis.push_back((1.0 / beta) * v);

  const auto mm = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(mm + 1, mm);
  Eigen::Index steps = mm;
  for (Eigen::Index j = 0; j < mm; ++j) {
    Tensor3 w = op.apply(out.basis[static_cast<std::size_t>(j)]);
    const double before = fro_norm(w);
    // Modified Gram-Schmidt over V_1 .. V_{j+1}.
    for (Eigen::Index i = 0; i <= j; ++i) {
      const Tensor3& vi = out.basis[static_cast<std::size_t>(i)];
      h(i, j) = inner(vi, w);
      w.axpy(-h(i, j), vi);
    }
    if (fro_norm(w) < kReorthogonalizationRatio * before) {
      Eigen::VectorXd corr = Eigen::VectorXd::Zero(j + 1);
      reorthogonalize(w, out.basis, &corr);
      h.col(j).head(j + 1) += corr;
    }
    const double hn = fro_norm(w);
    if (is_breakdown(hn, before)) {
      out.breakdown = true;
      steps = j + 1;
      break;
    }
    h(j + 1, j) = hn;
    out.basis.push_back((1.0 / hn) * w);
  }
  out.hessenberg.h = h.topLeftCorner(steps + 1, steps);
  return out;
}

Eigen::MatrixXd BidiagFactor::square() const {
  const auto k = rho.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    c(i, i) = rho(i);
    if (i + 1 < k) c(i + 1, i) = sigma(i + 1);
  }
  return c;
}

Eigen::MatrixXd BidiagFactor::tilde() const {
  const auto k = rho.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k + 1, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    c(i, i) = rho(i);
    c(i + 1, i) = sigma(i + 1);
  }
  return c;
}

GolubKahanProcess::GolubKahanProcess(const LinearMap& op, const Tensor3& f)
    : op_(&op), q_(f.shape()), p_(f.shape()) {
  require_same_shape(op.shape(), f.shape(), "ggkb");
  const double s1 = fro_norm(f);
  if (s1 == 0.0) throw std::invalid_argument("ggkb: zero right-hand side");
  sigma_.push_back(s1);
  p_.push_back((1.0 / s1) * f);
}

bool GolubKahanProcess::step() {
  if (broken_down_) return false;
  const std::size_t j = q_.size();

  Tensor3 w = op_->apply_transpose(p_[j]);
  double before = fro_norm(w);
  if (j > 0) w.axpy(-sigma_[j], q_[j - 1]);
  reorthogonalize(w, q_);
  const double rho = fro_norm(w);
  if (is_breakdown(rho, before)) {
    broken_down_ = true;
    return false;
  }
  q_.push_back((1.0 / rho) * w);
  rho_.push_back(rho);

  Tensor3 z = op_->apply(q_[j]);
  before = fro_norm(z);
  z.axpy(-rho, p_[j]);
  reorthogonalize(z, p_);
  const double sigma = fro_norm(z);
  if (is_breakdown(sigma, before)) {
    sigma_.push_back(0.0);
    broken_down_ = true;
    return true;
  }
  sigma_.push_back(sigma);
  p_.push_back((1.0 / sigma) * z);
  return true;
}

BidiagFactor GolubKahanProcess::bidiag() const {
  BidiagFactor c;
  c.rho = Eigen::Map<const Eigen::VectorXd>(rho_.data(), static_cast<Eigen::Index>(rho_.size()));
  // sigma_{k+1} belongs to the factor only once Q_k exists.
  const auto ns = static_cast<Eigen::Index>(rho_.size() + 1);
  c.sigma = Eigen::Map<const Eigen::VectorXd>(sigma_.data(), ns);
  return c;
}

GolubKahanResult ggkb(const LinearMap& op, const Tensor3& f, std::size_t m) {
  if (m == 0) throw std::invalid_argument("ggkb: m must be at least 1");
  GolubKahanProcess gk(op, f);
  for (std::size_t j = 0; j < m; ++j) {
    if (!gk.step() || gk.broken_down()) break;
  }
  return {gk.q(), gk.p(), gk.bidiag(), gk.broken_down()};
}

ReducedSolution solve_reduced_gmres(const HessenbergFactor& h, double beta, double lambda) {
  if (!(beta > 0.0)) throw std::invalid_argument("solve_reduced_gmres: beta must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("solve_reduced_gmres: lambda must be nonnegative");
  const Eigen::Index rows = h.h.rows();
  const Eigen::Index k = h.h.cols();

  ReducedSolution out;
  if (lambda > 0.0) {
    Eigen::MatrixXd a(rows + k, k);
    a.topRows(rows) = h.h;
    a.bottomRows(k) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows + k);
    b(0) = beta;
    out.y = a.householderQr().solve(b);
    return out;
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  b(0) = beta;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(h.h);
  out.singular = qr.rank() < k;
  out.y = qr.solve(b);
  return out;
}

ReducedSolution solve_reduced_lsqr(const BidiagFactor& c, double sigma1, double lambda) {
  if (!(sigma1 > 0.0)) throw std::invalid_argument("solve_reduced_lsqr: sigma1 must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("solve_reduced_lsqr: lambda must be nonnegative");
  const Eigen::Index k = c.rho.size();
  const double damp = std::sqrt(lambda);

  // Upper bidiagonal R (diag r, superdiag theta) and rotated rhs phi.
  Eigen::VectorXd r(k), theta = Eigen::VectorXd::Zero(k), phi(k);
  double rhobar = k > 0 ? c.rho(0) : 0.0;
  double phibar = sigma1;
  bool singular = false;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (damp > 0.0) {
      const double rr = std::hypot(rhobar, damp);
      phibar *= rhobar / rr;
      rhobar = rr;
    }
    const double sub = c.sigma(j + 1);
    const double rj = std::hypot(rhobar, sub);
    if (rj == 0.0) {
      singular = true;
      break;
    }
    const double cs = rhobar / rj;
    const double sn = sub / rj;
    r(j) = rj;
    phi(j) = cs * phibar;
    phibar = -sn * phibar;
    if (j + 1 < k) {
      theta(j) = sn * c.rho(j + 1);
      rhobar = cs * c.rho(j + 1);
    }
  }

  ReducedSolution out;
  if (singular) {
    Eigen::MatrixXd a(2 * k + 1, k);
    a.topRows(k + 1) = c.tilde();
    a.bottomRows(k) = damp * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * k + 1);
    b(0) = sigma1;
    out.y = a.colPivHouseholderQr().solve(b);
    out.singular = true;
    return out;
  }
  out.y.resize(k);
  for (Eigen::Index j = k - 1; j >= 0; --j) {
    const double next = (j + 1 < k) ? theta(j) * out.y(j + 1) : 0.0;
    out.y(j) = (phi(j) - next) / r(j);
  }
  return out;
}

MuStrategy MuStrategy::parse(const std::string& text) {
  if (text == "gcv") return gcv();
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text.substr(colon + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used > 0 && used == text.size() - colon - 1) {
      if (head == "fixed" && v >= 0.0) return fixed(v);
      if (head == "discrepancy" && v > 0.0) return discrepancy(v);
    }
  }
  throw std::invalid_argument("invalid mu strategy '" + text + "' (expected gcv, fixed:V or discrepancy:NU)");
}

std::string MuStrategy::str() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Gcv: return "gcv";
    case Kind::Fixed: os << "fixed:" << value; break;
    case Kind::Discrepancy: os << "discrepancy:" << value; break;
  }
  return os.str();
}

void SolverConfig::validate() const {
  if (restart < 1) throw std::invalid_argument("SolverConfig: restart must be at least 1");
  if (!(tau > 0.0)) throw std::invalid_argument("SolverConfig: tau must be positive");
  if (!(tol >= 0.0)) throw std::invalid_argument("SolverConfig: tol must be nonnegative");
  if (maxit < 1) throw std::invalid_argument("SolverConfig: maxit must be at least 1");
  if (mu.kind == MuStrategy::Kind::Fixed && !(mu.value >= 0.0)) {
    throw std::invalid_argument("SolverConfig: fixed lambda must be nonnegative");
  }
  if (mu.kind == MuStrategy::Kind::Discrepancy && !(mu.value > 0.0)) {
    throw std::invalid_argument("SolverConfig: noise level must be positive");
  }
  for (double l : lambda_schedule) {
    if (!(l >= 0.0)) throw std::invalid_argument("SolverConfig: scheduled lambda must be nonnegative");
  }
}

SolverConfig SolverConfig::gmres_defaults() {
  SolverConfig cfg;
  cfg.restart = 10;
  cfg.maxit = 10;
  cfg.tol = 1e-6;
  cfg.tau = 1e-12;
  return cfg;
}

SolverConfig SolverConfig::lsqr_defaults() {
  SolverConfig cfg;
  cfg.maxit = 200;
  cfg.tol = 0.0;
  cfg.tau = 1e-12;
  return cfg;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::RelChange: return "relchange";
    case Termination::Residual: return "residual";
    case Termination::MaxIter: return "maxiter";
    case Termination::Breakdown: return "breakdown";
  }
  return "unknown";
}

SolveReport gmres_tikhonov(const LinearMap& op, const Tensor3& f, const Tensor3& x0, const SolverConfig& cfg) {
  cfg.validate();
  require_same_shape(op.shape(), f.shape(), "gmres_tikhonov");
  require_same_shape(op.shape(), x0.shape(), "gmres_tikhonov");
  const auto start = std::chrono::steady_clock::now();

  SolveReport rep;
  rep.solution = x0;
  Tensor3 residual = f - op.apply(rep.solution);
  rep.termination = Termination::MaxIter;
  for (std::size_t cycle = 0; cycle < cfg.maxit; ++cycle) {
    const double beta = fro_norm(residual);
    if (beta == 0.0 || beta <= cfg.tol) {
      rep.termination = Termination::Residual;
      break;
    }
    const ArnoldiResult arn = etga(op, residual, cfg.restart);
    if (arn.hessenberg.h.cwiseAbs().maxCoeff() == 0.0) {
      rep.termination = Termination::Breakdown;
      break;
    }
    const double lambda = select_lambda(cfg, cycle, arn.hessenberg.h, beta);
    const ReducedSolution red = solve_reduced_gmres(arn.hessenberg, beta, lambda);

    SliceStack4 basis = arn.basis;
    basis.truncate(arn.hessenberg.steps());
    Tensor3 next = rep.solution + mode4_vecmul(basis, red.y);
    const double change = relative_change(next, rep.solution);
    rep.solution = std::move(next);
    residual = f - op.apply(rep.solution);
    const double rnorm = fro_norm(residual);

    ++rep.outer_iterations;
    rep.inner_steps += arn.hessenberg.steps();
    rep.lambda_history.push_back(lambda);
    rep.mu_history.push_back(std::sqrt(lambda));
    rep.residual_history.push_back(rnorm);
    rep.relchange_history.push_back(change);
    if (cfg.on_iterate) cfg.on_iterate(rep.outer_iterations, rep.solution);

    if (rnorm <= cfg.tol) {
      rep.termination = Termination::Residual;
      break;
    }
    if (change <= cfg.tau) {
      rep.termination = Termination::RelChange;
      break;
    }
  }
  rep.wall_time = seconds_since(start);
  return rep;
}

SolveReport lsqr_tikhonov(const LinearMap& op, const Tensor3& f, const SolverConfig& cfg) {
  cfg.validate();
  require_same_shape(op.shape(), f.shape(), "lsqr_tikhonov");
  const auto start = std::chrono::steady_clock::now();

  SolveReport rep;
  rep.solution = Tensor3(f.shape());
  if (fro_norm(f) == 0.0) {
    rep.termination = Termination::Residual;
    rep.wall_time = seconds_since(start);
    return rep;
  }

  GolubKahanProcess gk(op, f);
  const double sigma1 = gk.sigma1();
  rep.termination = Termination::MaxIter;
  for (std::size_t k = 0; k < cfg.maxit; ++k) {
    if (!gk.step()) {
      rep.termination = Termination::Breakdown;
      break;
    }
    const BidiagFactor c = gk.bidiag();
    const Eigen::MatrixXd ct = c.tilde();
    const double lambda = select_lambda(cfg, k, ct, sigma1);
    const ReducedSolution red = solve_reduced_lsqr(c, sigma1, lambda);

    Tensor3 next = mode4_vecmul(gk.q(), red.y);
    const double change = relative_change(next, rep.solution);
    rep.solution = std::move(next);

    Eigen::VectorXd r = ct * red.y;
    r(0) -= sigma1;
    const double rnorm = r.norm();

    ++rep.outer_iterations;
    rep.inner_steps = gk.steps();
    rep.lambda_history.push_back(lambda);
    rep.mu_history.push_back(lambda);
    rep.residual_history.push_back(rnorm);
    rep.relchange_history.push_back(change);
    if (cfg.on_iterate) cfg.on_iterate(rep.outer_iterations, rep.solution);

    if (gk.broken_down()) {
      rep.termination = Termination::Breakdown;
      break;
    }
    if (cfg.tol > 0.0 && rnorm <= cfg.tol) {
      rep.termination = Termination::Residual;
      break;
    }
    if (change <= cfg.tau) {
      rep.termination = Termination::RelChange;
      break;
    }
  }
  rep.wall_time = seconds_since(start);
  return rep;
}

}  // namespace rtk

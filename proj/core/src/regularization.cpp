#include "rtk/regularization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace rtk {

namespace {

constexpr int kGridPoints = 200;
constexpr int kGoldenIterations = 100;

}  // namespace

GcvSpectrum GcvSpectrum::from_projected(const Eigen::MatrixXd& projected, double beta) {
  if (projected.size() == 0 || projected.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("GCV: projected matrix is empty or all zero");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("GCV: beta must be positive");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(projected, Eigen::ComputeThinU);
  GcvSpectrum s;
  s.sigma = svd.singularValues();
  s.gtilde = beta * svd.matrixU().row(0).transpose();
  s.beta = beta;
  return s;
}

double gcv_value(const GcvSpectrum& spectrum, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("gcv_value: lambda must be positive");
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < spectrum.sigma.size(); ++i) {
    const double w = 1.0 / (spectrum.sigma(i) * spectrum.sigma(i) + lambda);
    const double g = spectrum.gtilde(i) * w;
    num += g * g;
    den += w;
  }
  return num / (den * den);
}

GcvChoice gcv_minimize(const GcvSpectrum& spectrum) {
  const double smax = spectrum.sigma.maxCoeff();
  const double smin = spectrum.sigma.minCoeff();
  if (!(smax > 0.0)) throw std::invalid_argument("gcv_minimize: projected matrix is all zero");

  const double lo = std::log(std::max(smin * smin, 1e-16 * smax * smax));
  const double hi = std::log(smax * smax);
  if (!(hi > lo)) {
    const double lambda = std::exp(lo);
    return {lambda, gcv_value(spectrum, lambda), true};
  }

  std::array<double, kGridPoints> t{};
  std::array<double, kGridPoints> v{};
  for (int i = 0; i < kGridPoints; ++i) {
    t[i] = lo + (hi - lo) * i / (kGridPoints - 1);
    v[i] = gcv_value(spectrum, std::exp(t[i]));
  }
  const auto [vmin_it, vmax_it] = std::minmax_element(v.begin(), v.end());
  if (*vmax_it - *vmin_it <= 1e-12 * std::abs(*vmax_it)) {
    return {std::exp(t[0]), v[0], true};
  }
  const auto best = static_cast<int>(vmin_it - v.begin());

  // Golden-section search on the bracket around the best grid point.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = t[std::max(best - 1, 0)];
  double b = t[std::min(best + 1, kGridPoints - 1)];
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = gcv_value(spectrum, std::exp(c));
  double fd = gcv_value(spectrum, std::exp(d));
  for (int it = 0; it < kGoldenIterations && (b - a) > 1e-12 * std::max(1.0, std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = gcv_value(spectrum, std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = gcv_value(spectrum, std::exp(d));
    }
  }
  const double tref = fc < fd ? c : d;
  const double fref = std::min(fc, fd);
  if (fref <= v[best]) return {std::exp(tref), fref, false};
  return {std::exp(t[best]), v[best], false};
}

GcvChoice gcv_minimize(const Eigen::MatrixXd& projected, double beta) {
  return gcv_minimize(GcvSpectrum::from_projected(projected, beta));
}

double projected_residual(const GcvSpectrum& spectrum, double lambda) {
  double in_range = 0.0;
  double filtered = 0.0;
  for (Eigen::Index i = 0; i < spectrum.sigma.size(); ++i) {
    const double g = spectrum.gtilde(i);
    const double f = lambda / (spectrum.sigma(i) * spectrum.sigma(i) + lambda);
    in_range += g * g;
    filtered += f * f * g * g;
  }
  const double outside = std::max(0.0, spectrum.beta * spectrum.beta - in_range);
  return std::sqrt(filtered + outside);
}

DiscrepancyChoice discrepancy_select(const Eigen::MatrixXd& projected, double beta, double noise_level) {
  if (!(noise_level > 0.0)) throw std::invalid_argument("discrepancy_select: noise level must be positive");
  const GcvSpectrum spectrum = GcvSpectrum::from_projected(projected, beta);
  const double smax = spectrum.sigma.maxCoeff();
  const double target = kDiscrepancySafety * noise_level * beta;

  double lo = std::log(1e-16 * smax * smax);
  double hi = std::log(1e8 * smax * smax);
  const double r_lo = projected_residual(spectrum, std::exp(lo));
  const double r_hi = projected_residual(spectrum, std::exp(hi));
  if (r_lo >= target) return {std::exp(lo), false};
  if (r_hi <= target) return {std::exp(hi), false};

  double r_prev_lo = r_lo;
  double r_prev_hi = r_hi;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = projected_residual(spectrum, std::exp(mid));
    // The residual is non-decreasing in lambda.
    if (r < r_prev_lo * (1 - 1e-12) || r > r_prev_hi * (1 + 1e-12)) {
      throw std::logic_error("discrepancy_select: projected residual is not monotone in lambda");
    }
    if (r < target) {
      lo = mid;
      r_prev_lo = r;
    } else {
      hi = mid;
      r_prev_hi = r;
    }
  }
  return {std::exp(0.5 * (lo + hi)), true};
}

}  // namespace rtk

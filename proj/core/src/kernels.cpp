#include "kfp/kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kfp/errors.hpp"

namespace kfp::kernels {
namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("time must be positive and finite, got " + std::to_string(t));
  }
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b || a == 0) throw DomainError("kernel arguments must share a non-zero dimension");
}

// sigma(t) = t - 2 tanh(t/2) = sum_{k>=2} -4 (2^{2k} - 1) B_{2k} t^{2k-1} / (2k)!
double sigma_series(double t) {
  static constexpr double kCoeff[] = {
      1.0 / 12.0,                          // t^3
      -1.0 / 120.0,                        // t^5
      17.0 / 20160.0,                      // t^7
      -31.0 / 362880.0,                    // t^9
      691.0 / 79833600.0,                  // t^11
      -5461.0 / 6227020800.0,              // t^13
      1859138.0 / 20922789888000.0,        // t^15
  };
  const double t2 = t * t;
  double acc = 0.0;
  for (int k = static_cast<int>(std::size(kCoeff)) - 1; k >= 0; --k) acc = acc * t2 + kCoeff[k];
  return acc * t2 * t;
}

// log sinh(t), valid for every t > 0
double log_sinh(double t) { return t - std::numbers::ln2 + std::log(-std::expm1(-2.0 * t)); }

double cosech(double t) { return 2.0 * std::exp(-t) / (-std::expm1(-2.0 * t)); }

}  // namespace

TimeProfile time_profiles(double t) {
  require_positive_time(t);
  TimeProfile p;
  p.t = t;
  p.omega = std::tanh(0.5 * t);
  p.sigma = t < kSmallTimeSeriesCutoff ? sigma_series(t) : t - 2.0 * p.omega;
  p.theta = -2.0 * kPi * std::expm1(-2.0 * t);
  p.gamma = p.sigma * p.theta;
  return p;
}

double log_harmonic_kernel_1d(double v, double vp, const TimeProfile& tp) {
  const double d = v - vp;
  const double quad = cosech(tp.t) * d * d + tp.omega * (v * v + vp * vp);
  return 0.5 * tp.t - 0.5 * (std::log(4.0 * kPi) + log_sinh(tp.t)) - 0.25 * quad;
}

double harmonic_kernel_1d(double v, double vp, const TimeProfile& tp) {
  return std::exp(log_harmonic_kernel_1d(v, vp, tp));
}

double log_harmonic_kernel(std::span<const double> v, std::span<const double> vp, double t) {
  require_same_dim(v.size(), vp.size());
  const TimeProfile tp = time_profiles(t);
  double acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) acc += log_harmonic_kernel_1d(v[j], vp[j], tp);
  return acc;
}

double harmonic_kernel(std::span<const double> v, std::span<const double> vp, double t) {
  return std::exp(log_harmonic_kernel(v, vp, t));
}

double ho_heat_kernel_reference(std::span<const double> x, std::span<const double> y, double t) {
  require_positive_time(t);
  require_same_dim(x.size(), y.size());
  const double n = static_cast<double>(x.size());
  const double s2 = std::sinh(2.0 * t);
  const double coth2 = 1.0 / std::tanh(2.0 * t);
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    xx += x[j] * x[j];
    yy += y[j] * y[j];
    xy += x[j] * y[j];
  }
  const double expo = -0.5 * coth2 * (xx + yy) + xy / s2 - 0.5 * n * std::log(2.0 * kPi * s2);
  return std::exp(expo);
}

double log_free_kernel(const KernelPoint& p) {
  const std::size_t n = p.x.size();
  require_same_dim(n, p.xp.size());
  require_same_dim(n, p.v.size());
  require_same_dim(n, p.vp.size());
  const TimeProfile tp = time_profiles(p.t);
  double acc = -0.5 * static_cast<double>(n) * std::log(4.0 * kPi * tp.sigma);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = p.x[j] - p.xp[j] - tp.omega * (p.v[j] + p.vp[j]);
    acc += -d * d / (4.0 * tp.sigma) + log_harmonic_kernel_1d(p.v[j], p.vp[j], tp);
  }
  return acc;
}

double free_kernel(const KernelPoint& p) { return std::exp(log_free_kernel(p)); }

double free_kernel_supremum(double t, int n) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  const TimeProfile tp = time_profiles(t);
  return std::pow(4.0 * kPi * tp.gamma, -0.5 * n);
}

std::complex<double> fourier_factor(std::span<const double> v, std::span<const double> vp,
                                    std::span<const double> xi, double t) {
  require_same_dim(v.size(), vp.size());
  require_same_dim(v.size(), xi.size());
  const TimeProfile tp = time_profiles(t);
  double phase = 0.0, xi2 = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    phase += (v[j] + vp[j]) * xi[j];
    xi2 += xi[j] * xi[j];
  }
  return std::polar(std::exp(-xi2 * tp.sigma), -tp.omega * phase);
}

}  // namespace kfp::kernels

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "kfp/errors.hpp"
#include "kfp/kernels.hpp"
#include "oracles.hpp"

using namespace kfp;
using namespace kfp::kernels;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
double k1(double v, double vp, double t) { return harmonic_kernel(std::span(&v, 1), std::span(&vp, 1), t); }
double e1(double x, double y, double t) { return ho_heat_kernel_reference(std::span(&x, 1), std::span(&y, 1), t); }
}  // namespace

TEST_CASE("time profiles at t = 1 match the extended-precision oracle") {
  const TimeProfile p = time_profiles(1.0);
  CHECK(rel(p.sigma, oracle::sigma(1.0)) < 1e-14);
  CHECK(rel(p.theta, oracle::theta(1.0)) < 1e-14);
  CHECK(rel(p.omega, oracle::omega(1.0)) < 1e-14);
  CHECK(p.sigma == doctest::Approx(0.075766).epsilon(1e-5));
  CHECK(p.theta == doctest::Approx(5.432849).epsilon(1e-5));
  CHECK(p.omega == doctest::Approx(0.462117).epsilon(1e-5));
  CHECK(p.gamma == p.sigma * p.theta);
}

TEST_CASE("time profiles stay accurate across scales") {
  for (double t : {1e-6, 1e-5, 1e-4, 3e-4, 1e-3, 0.05, 0.0999, 0.1, 0.1001, 0.3, 2.0, 10.0, 50.0}) {
    CAPTURE(t);
    const TimeProfile p = time_profiles(t);
    CHECK(rel(p.sigma, oracle::sigma(t)) < 1e-12);
    CHECK(rel(p.omega, oracle::omega(t)) < 1e-13);
    CHECK(rel(p.theta, oracle::theta(t)) < 1e-13);
    CHECK(p.sigma > 0.0);
    CHECK(p.theta > 0.0);
    CHECK(p.omega > 0.0);
    CHECK(p.omega <= 1.0);
    CHECK(rel(p.omega, std::tanh(t / 2)) < 1e-13);
  }
}

TEST_CASE("naive subtraction loses the small-time sigma") {
  const double t = 1e-4;
  const double naive = t - 2.0 / std::tanh(t) + 2.0 / std::sinh(t);
  CHECK(rel(naive, oracle::sigma(t)) > 1e-6);
  CHECK(rel(time_profiles(t).sigma, oracle::sigma(t)) < 1e-12);
}

TEST_CASE("time profile asymptotics") {
  const TimeProfile big = time_profiles(40.0);
  CHECK(big.theta == doctest::Approx(2 * std::numbers::pi).epsilon(1e-12));
  CHECK(big.omega == doctest::Approx(1.0).epsilon(1e-12));
  for (double t : {20.0, 30.0, 50.0}) CHECK(rel(time_profiles(t).gamma / t, 2 * std::numbers::pi) < 0.15);
  double lo = 1e300, hi = 0;
  for (double t = 1e-4; t <= 0.1; t *= 1.5) {
    const double r = time_profiles(t).gamma / std::pow(t, 4);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo > 0.1);
  CHECK(hi < 10.0);
  // sigma / t^3 tends to 1/12
  CHECK(time_profiles(1e-3).sigma / 1e-9 == doctest::Approx(1.0 / 12).epsilon(1e-6));
}

TEST_CASE("time profiles reject bad t") {
  CHECK_THROWS_AS(time_profiles(0.0), DomainError);
  CHECK_THROWS_AS(time_profiles(-1.0), DomainError);
  CHECK_THROWS_AS(time_profiles(std::nan("")), DomainError);
  CHECK_THROWS_AS(time_profiles(INFINITY), DomainError);
  CHECK_THROWS_AS(k1(0, 0, 0.0), DomainError);
  CHECK_THROWS_AS(e1(0, 0, -1.0), DomainError);
}

TEST_CASE("harmonic kernel at the origin is theta^{-n/2}") {
  for (double t : {0.1, 1.0, 5.0}) {
    CHECK(rel(k1(0, 0, t), std::pow(oracle::theta(t), -0.5)) < 1e-13);
    const std::vector<double> z(3, 0.0);
    CHECK(rel(harmonic_kernel(z, z, t), std::pow(oracle::theta(t), -1.5)) < 1e-13);
  }
}

TEST_CASE("harmonic kernel symmetry and scaling identity with the oscillator heat kernel") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4, 4), ut(0.1, 5);
  for (int i = 0; i < 200; ++i) {
    const double v = u(rng), vp = u(rng), t = ut(rng);
    CHECK(k1(v, vp, t) == k1(vp, v, t));
    const double scaled = std::exp(t / 2) * std::pow(2.0, -0.5) * e1(v / std::sqrt(2.0), vp / std::sqrt(2.0), t / 2);
    CHECK(rel(k1(v, vp, t), scaled) < 1e-12);
  }
  // n = 2
  const double v[2] = {0.3, -1.2}, vp[2] = {2.0, 0.7};
  const double xs[2] = {v[0] / std::sqrt(2.0), v[1] / std::sqrt(2.0)}, ys[2] = {vp[0] / std::sqrt(2.0), vp[1] / std::sqrt(2.0)};
  CHECK(rel(harmonic_kernel(v, vp, 0.7), std::exp(0.7) * 0.5 * ho_heat_kernel_reference(xs, ys, 0.35)) < 1e-12);
}

TEST_CASE("log kernel stays finite where the kernel underflows") {
  CHECK(k1(60, -60, 1.0) == 0.0);
  const double v = 60, vp = -60;
  CHECK(std::isfinite(log_harmonic_kernel(std::span(&v, 1), std::span(&vp, 1), 1.0)));
  CHECK(std::isfinite(k1(1e3, 1e3, 20.0)));
}

TEST_CASE("oscillator heat kernel reference") {
  CHECK(e1(0.4, -1.1, 0.3) == e1(-1.1, 0.4, 0.3));
  const double t = 1e-3;
  CHECK(e1(0, 0, t) * std::sqrt(4 * std::numbers::pi * t) == doctest::Approx(1.0).epsilon(1e-2));
  // ground state exp(-x^2/2) of -d^2 + x^2 has eigenvalue 1
  const double h = 0.02, T = 0.4;
  for (double x : {0.0, 0.7, -1.5}) {
    double s = 0;
    for (double y = -12; y <= 12; y += h) s += e1(x, y, T) * std::exp(-y * y / 2) * h;
    CHECK(s == doctest::Approx(std::exp(-T) * std::exp(-x * x / 2)).epsilon(1e-8));
  }
}

TEST_CASE("free kernel supremum and factorisation") {
  CHECK(free_kernel_supremum(1.0, 1) == doctest::Approx(0.4396884).epsilon(1e-6));
  CHECK(rel(free_kernel_supremum(1.0, 1), oracle::free_norm(1.0, 1)) < 1e-13);
  CHECK(rel(free_kernel_supremum(0.3, 3), std::pow(free_kernel_supremum(0.3, 1), 3)) < 1e-13);

  const double t = 0.8;
  const double x[3] = {0.2, -0.5, 1.0}, xp[3] = {0.0, 0.3, -0.4}, v[3] = {1.0, 0.1, -0.6}, vp[3] = {-0.2, 0.5, 0.9};
  double prod = 1;
  for (int j = 0; j < 3; ++j) prod *= free_kernel({std::span(&x[j], 1), std::span(&xp[j], 1), std::span(&v[j], 1), std::span(&vp[j], 1), t});
  CHECK(rel(free_kernel({x, xp, v, vp, t}), prod) < 1e-12);
  CHECK(free_kernel({x, xp, v, vp, t}) > 0.0);
}

TEST_CASE("grid search locates the kernel maximum at the stationary point") {
  const double t = 1.0, w = time_profiles(t).omega;
  double best = 0, bx = 0, bv = 0, bvp = 0;
  const double xp = 0.0;
  for (double x = -2; x <= 2; x += 0.05)
    for (double v = -2; v <= 2; v += 0.1)
      for (double vp = -2; vp <= 2; vp += 0.1) {
        const double f = free_kernel({std::span(&x, 1), std::span(&xp, 1), std::span(&v, 1), std::span(&vp, 1), t});
        if (f > best) best = f, bx = x, bv = v, bvp = vp;
      }
  CHECK(std::abs(bv) < 0.11);
  CHECK(std::abs(bvp) < 0.11);
  CHECK(std::abs(bx - w * (bv + bvp)) < 0.06);
  CHECK(best <= free_kernel_supremum(t, 1) * (1 + 1e-10));
}

TEST_CASE("fourier factor") {
  const double v = 0.7, vp = -1.3, zero = 0.0;
  CHECK(fourier_factor(std::span(&v, 1), std::span(&vp, 1), std::span(&zero, 1), 1.0) == std::complex<double>(1.0));
  const double xi = 1.7, t = 0.6, s = time_profiles(t).sigma, w = time_profiles(t).omega;
  for (double a : {-2.0, 0.0, 3.0}) {
    CHECK(std::abs(fourier_factor(std::span(&a, 1), std::span(&vp, 1), std::span(&xi, 1), t)) ==
          doctest::Approx(std::exp(-xi * xi * s)).epsilon(1e-14));
  }
  // inverse transform in xi reproduces the x-Gaussian
  for (double x : {0.0, 0.3, -0.4}) {
    std::complex<double> acc = 0;
    const double h = 0.005;
    for (double k = -80; k <= 80; k += h) acc += fourier_factor(std::span(&v, 1), std::span(&vp, 1), std::span(&k, 1), t) * std::polar(1.0, k * x) * h;
    acc /= 2 * std::numbers::pi;
    const double g = std::exp(-std::pow(x - w * (v + vp), 2) / (4 * s)) / std::sqrt(4 * std::numbers::pi * s);
    CHECK(std::abs(acc - g) < 1e-8 * g + 1e-12);
  }
}

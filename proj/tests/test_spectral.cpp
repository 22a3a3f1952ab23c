#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "kfp/errors.hpp"
#include "kfp/phase_space.hpp"
#include "kfp/propagator.hpp"
#include "kfp/spectral.hpp"

using namespace kfp;
using namespace kfp::spectral;

namespace {
// F_j by differentiating e^{-s^2/2} symbolically: coefficients of p_j with d^j e^{-s^2/2} = p_j e^{-s^2/2}
std::vector<double> derivative_poly(int j) {
  std::vector<double> p{1.0};
  for (int k = 0; k < j; ++k) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i > 0) q[i - 1] += i * p[i];
      q[i + 1] -= p[i];
    }
    p = q;
  }
  return p;
}
double eval(const std::vector<double>& p, double s) {
  double r = 0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * s + p[i];
  return r;
}
}  // namespace

TEST_CASE("Hermite polynomials follow the defining derivative formula") {
  for (double s : {-2.0, 0.0, 0.5, 1.0, 2.0}) {
    CHECK(hermite_polynomial(0, s) == 1.0);
    CHECK(hermite_polynomial(1, s) == s);
  }
  CHECK(hermite_polynomial(2, 0.0) == -1.0);
  CHECK(hermite_polynomial(2, 1.0) == 0.0);
  CHECK(hermite_polynomial(2, 2.0) == 3.0);
  for (int j = 0; j <= 6; ++j) {
    const std::vector<double> p = derivative_poly(j);
    for (double s : {-1.7, 0.3, 2.2}) CHECK(hermite_polynomial(j, s) == doctest::Approx((j % 2 ? -1 : 1) * eval(p, s)).epsilon(1e-13));
  }
  for (int j = 1; j < 20; ++j)
    for (double s = -6; s <= 6; s += 0.75) {
      const double lhs = hermite_polynomial(j + 1, s), rhs = s * hermite_polynomial(j, s) - j * hermite_polynomial(j - 1, s);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("Hermite degree cap") {
  CHECK_THROWS_AS(hermite_polynomial(31, 0.1), CapabilityError);
  CHECK_NOTHROW(hermite_polynomial(40, 0.1, Caps{40, 2.0}));
  CHECK_THROWS_AS(hermite_function(-1, 0.1), DomainError);
}

TEST_CASE("Hermite functions are orthonormal and match the polynomial form") {
  const double h = 0.05;
  for (int j = 0; j <= 8; ++j) {
    for (int k = 0; k <= 8; ++k) {
      double s = 0;
      for (double x = -14; x <= 14; x += h) s += hermite_function(j, x) * hermite_function(k, x) * h;
      CHECK(std::abs(s - (j == k ? 1.0 : 0.0)) < 1e-9);
    }
  }
  for (int j = 0; j <= 12; ++j) {
    double fact = 1;
    for (int i = 2; i <= j; ++i) fact *= i;
    for (double s : {-3.0, 0.2, 1.5}) {
      const double direct = std::exp(-s * s / 4) * hermite_polynomial(j, s) / std::sqrt(fact * std::sqrt(2 * std::numbers::pi));
      CHECK(hermite_function(j, s) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("oscillator eigenrelation for real Hermite functions") {
  const VelocityGrid g(1, Axis{12.0, 480});
  const double zero = 0.0;
  for (int j = 0; j <= 6; ++j) {
    const ShiftedEigenfunction psi = shifted_eigenfunction(HermiteIndex{{j}}, std::span(&zero, 1), g);
    CHECK(eigen_residual(psi) < 1e-6);
  }
}

TEST_CASE("shifted eigenfunctions") {
  const VelocityGrid g(1, Axis{12.0, 480});
  const double zero = 0.0, half = 0.5;
  const ShiftedEigenfunction real = shifted_eigenfunction(HermiteIndex{{3}}, std::span(&zero, 1), g);
  for (const cplx& v : real.values.values()) CHECK(v.imag() == 0.0);
  const ShiftedEigenfunction psi = shifted_eigenfunction(HermiteIndex{{1}}, std::span(&half, 1), g);
  CHECK(psi.eigenvalue() == doctest::Approx(1.25));
  CHECK(eigen_residual(psi) < 1e-6);
  const double big = 2.5;
  CHECK_THROWS_AS(shifted_eigenfunction(HermiteIndex{{1}}, std::span(&big, 1), g), CapabilityError);
  CHECK_THROWS_AS(shifted_eigenfunction(HermiteIndex{{40}}, std::span(&half, 1), g), CapabilityError);
}

TEST_CASE("eigenrelation in two dimensions") {
  const VelocityGrid g(2, Axis{10.0, 400});
  const double xi[2] = {0.6, -0.4};
  for (const HermiteIndex& a : multi_indices(2, 3)) {
    const ShiftedEigenfunction psi = shifted_eigenfunction(a, xi, g);
    CHECK(psi.eigenvalue() == doctest::Approx(a.degree() + 0.52));
    CHECK(eigen_residual(psi) < 1e-5);
  }
}

TEST_CASE("apply_p0_hat is linear and refuses coarse grids") {
  const VelocityGrid g(1, Axis{8.0, 64});
  const double xi = 0.3;
  const VelocityField f = VelocityField::sample(g, [](auto v) { return std::exp(-v[0] * v[0] / 3); });
  const VelocityField k = VelocityField::sample(g, [](auto v) { return v[0] * std::exp(-v[0] * v[0] / 2); });
  const cplx a(1.5, -0.5), b(-2.0, 0.25);
  const VelocityField lhs = apply_p0_hat(std::span(&xi, 1), a * f + b * k);
  const VelocityField rhs = a * apply_p0_hat(std::span(&xi, 1), f) + b * apply_p0_hat(std::span(&xi, 1), k);
  CHECK(lp_norm(lhs - rhs, kInfinity) < 1e-12 * lp_norm(rhs, kInfinity));
  const VelocityGrid coarse(1, Axis{12.0, 40});
  CHECK_THROWS_AS(apply_p0_hat(std::span(&xi, 1), VelocityField(coarse)), GridError);
  CHECK_THROWS_AS(apply_p0_hat(std::span(&xi, 1), f, 5), CapabilityError);
}

TEST_CASE("multi-indices in graded order") {
  const auto idx = multi_indices(2, 2);
  CHECK(idx.size() == 6);
  for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i - 1].degree() <= idx[i].degree());
  CHECK(multi_indices(3, 6).size() == 84);
}

TEST_CASE("biorthogonality") {
  const VelocityGrid g = default_spectral_grid(1);
  const double zero = 0.0, half = 0.5, one = 1.0;
  const BiorthogonalityMatrix m0 = biorthogonality_matrix(std::span(&zero, 1), 8, g);
  CHECK(m0.max_deviation < 1e-9);
  const BiorthogonalityMatrix mh = biorthogonality_matrix(std::span(&half, 1), 6, g);
  CHECK(mh.max_deviation < 1e-8);
  const BiorthogonalityMatrix m1 = biorthogonality_matrix(std::span(&one, 1), 6, g);
  CHECK(m1.max_deviation < 1e-8);
  const BiorthogonalityMatrix same = biorthogonality_matrix(std::span(&half, 1), 6, g, ShiftPairing::same);
  CHECK(std::abs(same.at(0, 0) - 1.0) > 0.01);
  CHECK_THROWS_AS(biorthogonality_matrix(std::span(&half, 1), 6, VelocityGrid(1, Axis{4.0, 80})), GridError);
}

TEST_CASE("biorthogonality in three dimensions") {
  const VelocityGrid g = default_spectral_grid(3);
  const double xi[3] = {0.5, -0.3, 0.6};
  CHECK(biorthogonality_matrix(xi, 4, g).max_deviation < 1e-8);
}

TEST_CASE("oscillator semigroup decays shifted eigenfunctions along their eigenvalue") {
  // e^{-tP0^(xi)} restricted to velocity: K-quadrature sandwiched by the xi-phases
  const double xi = 0.5, t = 0.7;
  const VelocityGrid g(1, Axis{12.0, 480});
  const ShiftedEigenfunction psi = shifted_eigenfunction(HermiteIndex{{2}}, std::span(&xi, 1), g);
  const PhaseGrid pg(1, Axis{std::numbers::pi / xi * 8, 32}, Axis{12.0, 480});
  // f(x, v) = e^{i xi x} psi(v), xi on the frequency grid (k = 8)
  Field f(pg, false);
  std::vector<std::size_t> idx(2);
  for (std::size_t c = 0; c < pg.cell_count(); ++c) {
    pg.unravel(c, idx);
    f[c] = std::polar(1.0, xi * pg.x_axis(0).coord(idx[0])) * psi.values[idx[1]];
  }
  const Field out = free_step_fourier(f, t);
  Field expect = f;
  expect *= std::exp(-t * psi.eigenvalue());
  CHECK(lp_norm(out - expect, 2) < 1e-8 * lp_norm(expect, 2));
}

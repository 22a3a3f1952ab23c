#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "kfp/errors.hpp"
#include "kfp/phase_space.hpp"
#include "kfp/propagator.hpp"
#include "kfp/spectral.hpp"

using namespace kfp;

namespace {
double rel2(const Field& a, const Field& b) { return lp_norm(a - b, 2) / lp_norm(b, 2); }

// sum of random Gaussian bumps
Field smooth_field(const PhaseGrid& g, std::uint64_t seed, int bumps = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-1.5, 1.5), w(0.7, 1.3), a(0.2, 1.0);
  Field f(g);
  for (int b = 0; b < bumps; ++b) {
    const double cx = c(rng), cv = c(rng), wx = w(rng), wv = w(rng), amp = a(rng);
    f += Field::sample(g, [&](auto z) {
      return amp * std::exp(-std::pow(z[0] - cx, 2) / (2 * wx * wx) - std::pow(z[1] - cv, 2) / (2 * wv * wv));
    });
  }
  return f;
}

const Potential kV = Potential::inverse_power(0.5, 2.0);
}  // namespace

TEST_CASE("plan parsing and validation") {
  CHECK(parse_backend("direct_kernel") == Backend::direct_kernel);
  CHECK(parse_splitting("lie") == Splitting::lie);
  CHECK(parse_interpolation("cubic") == Interpolation::cubic);
  CHECK_THROWS_AS(parse_backend("spectral"), InputError);
  PropagatorPlan p;
  p.dt = 0.0;
  CHECK_THROWS_AS(p.validate(PhaseGrid(1, Axis{4, 16}, Axis{4, 16})), DomainError);
  p.dt = 0.1;
  p.backend = Backend::direct_kernel;
  CHECK_THROWS_AS(p.validate(PhaseGrid(2, Axis{4, 16}, Axis{4, 16})), CapabilityError);
  CHECK_THROWS_AS(free_step_direct(Field(PhaseGrid(2, Axis{4, 16}, Axis{4, 16})), 0.5), CapabilityError);
  CHECK_THROWS_AS(free_step_fourier(Field(PhaseGrid(1, Axis{4, 16}, Axis{4, 16})), 0.0), DomainError);
}

TEST_CASE("free Maxwellian is stationary under both backends") {
  const PhaseGrid g(1, Axis{4.0, 32}, Axis{10.0, 128});
  const Field m = maxwellian_field(g, Potential::zero());
  for (double t : {0.3, 1.0, 4.0}) {
    CHECK(rel2(free_step_fourier(m, t), m) < 1e-6);
    CHECK(rel2(free_step_direct(m, t), m) < 1e-6);
  }
}

TEST_CASE("backends agree on smooth fields") {
  // x spacing resolves the x-Gaussian at t = 0.2, so the direct backend samples it pointwise
  const PhaseGrid g(1, Axis{6.0, 512}, Axis{8.0, 64});
  const Field f = smooth_field(g, 21);
  for (double t : {0.2, 1.0}) {
    CHECK(FreePropagator(g, t, Backend::direct_kernel).direct_pointwise());
    CHECK(rel2(free_step_direct(f, t), free_step_fourier(f, t)) < 1e-6);
  }
}

TEST_CASE("direct backend semigroup and spike response") {
  const PhaseGrid g(1, Axis{6.0, 256}, Axis{8.0, 64});
  const Field f = smooth_field(g, 3);
  CHECK(rel2(free_step_direct(free_step_direct(f, 0.5), 0.5), free_step_direct(f, 1.0)) < 1e-5);

  Field spike(g);
  const std::size_t i0 = 128, j0 = 34;
  spike[i0 * 64 + j0] = 1.0;
  const Field out = free_step_direct(spike, 1.0);
  const double vol = g.cell_volume();
  double worst = 0, peak = 0;
  for (std::size_t i = 0; i < 256; ++i)
    for (std::size_t j = 0; j < 64; ++j) {
      const double x = g.x_axis(0).coord(i), v = g.v_axis(0).coord(j), xp = g.x_axis(0).coord(i0), vp = g.v_axis(0).coord(j0);
      const double F = kernels::free_kernel({std::span(&x, 1), std::span(&xp, 1), std::span(&v, 1), std::span(&vp, 1), 1.0});
      worst = std::max(worst, std::abs(out[i * 64 + j].real() / vol - F));
      peak = std::max(peak, F);
    }
  CHECK(worst < 1e-9 * peak);
}

TEST_CASE("small-time continuity") {
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{8.0, 128});
  const Field f = smooth_field(g, 8);
  CHECK(rel2(free_step_fourier(f, 1e-3), f) < 0.02);
}

TEST_CASE("free step contracts L2 and preserves positivity") {
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{8.0, 96});
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  Field r(g);
  for (cplx& v : r.values()) v = u(rng);
  for (double t : {0.01, 0.3, 2.0}) {
    CHECK(lp_norm(free_step_fourier(r, t), 2) <= lp_norm(r, 2) * (1 + 1e-6));
    CHECK(lp_norm(free_step_direct(r, t), 2) <= lp_norm(r, 2) * (1 + 1e-6));
    CHECK(free_step_direct(r, t).min_real() >= 0.0);
  }
}

TEST_CASE("free step contracts L1 and Linf on ground-state velocity profiles") {
  // h(x) phi_0(v): the velocity part is invariant, so L1 and Linf cannot grow
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{10.0, 128});
  const Field f = Field::sample(g, [](auto z) { return (1.0 + std::cos(z[0])) * std::exp(-z[0] * z[0] / 8) * std::exp(-z[1] * z[1] / 4); });
  for (double t : {0.1, 1.0, 5.0}) {
    for (Backend b : {Backend::fourier_factorized, Backend::direct_kernel}) {
      const Field u = free_step(f, t, b);
      CHECK(lp_norm(u, 1) <= lp_norm(f, 1) * (1 + 1e-6));
      CHECK(lp_norm(u, kInfinity) <= lp_norm(f, kInfinity) * (1 + 1e-6));
    }
  }
}

TEST_CASE("free step can increase the L1 norm of narrow velocity data") {
  // int K(v, v'; t) dv = e^{t/2} cosh(t)^{-1/2} exp(-v'^2 tanh(t) / 4) exceeds 1 near v' = 0
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{10.0, 256});
  const double s = 0.3;
  const Field f = Field::sample(g, [&](auto z) { return std::exp(-z[0] * z[0] / 2) * std::exp(-z[1] * z[1] / (2 * s * s)); });
  const double t = 2.0;
  const double ratio = lp_norm(free_step_fourier(f, t), 1) / lp_norm(f, 1);
  double expect = 0;
  const double h = 0.001;
  for (double v = -6; v <= 6; v += h)
    expect += std::exp(t / 2) / std::sqrt(std::cosh(t)) * std::exp(-v * v * std::tanh(t) / 4) * std::exp(-v * v / (2 * s * s)) * h;
  expect /= s * std::sqrt(2 * std::numbers::pi);
  CHECK(ratio > 1.2);
  CHECK(ratio == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("duality through velocity reflection") {
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{8.0, 96});
  const Field f = smooth_field(g, 30), h = smooth_field(g, 31);
  for (double t : {0.4, 1.5}) {
    const cplx lhs = pairing(h, free_step_fourier(f, t));
    const cplx rhs = pairing(reflect_v(free_step_fourier(reflect_v(h), t)), f);
    CHECK(std::abs(lhs - rhs) < 1e-8 * std::abs(lhs));
  }
}

TEST_CASE("marginal identity") {
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{8.0, 96});
  const Field f = smooth_field(g, 40);
  for (double t : {0.5, 2.0})
    for (Backend b : {Backend::fourier_factorized, Backend::direct_kernel}) {
      const VelocityField lhs = x_marginal(free_step(f, t, b)), rhs = harmonic_step(x_marginal(f), t);
      CHECK(lp_norm(lhs - rhs, 1) < 1e-6 * lp_norm(rhs, 1));
    }
}

TEST_CASE("harmonic step on Hermite functions") {
  const VelocityGrid g(1, Axis{12.0, 240});
  for (int j = 0; j <= 4; ++j) {
    const VelocityField phi = VelocityField::sample(g, [&](auto v) { return spectral::hermite_function(j, v[0]); });
    const VelocityField out = harmonic_step(phi, 1.0);
    VelocityField expect = phi;
    expect *= std::exp(-1.0 * j);
    CHECK(lp_norm(out - expect, 2) < (j == 0 ? 1e-8 : 1e-7));
  }
  CHECK_THROWS_AS(harmonic_step(VelocityField(g), 0.0), DomainError);
}

TEST_CASE("harmonic step is not an L1 contraction") {
  // a narrow bump at v = 0 gains mass; non-negative data keeps L2 contraction
  const VelocityGrid g(1, Axis{10.0, 400});
  const VelocityField narrow = VelocityField::sample(g, [](auto v) { return std::exp(-v[0] * v[0] / 0.02); });
  const double t = 1.0;
  const VelocityField out = harmonic_step(narrow, t);
  CHECK(lp_norm(out, 1) / lp_norm(narrow, 1) == doctest::Approx(std::exp(t / 2) / std::sqrt(std::cosh(t))).epsilon(0.01));
  CHECK(lp_norm(out, 2) <= lp_norm(narrow, 2));
}

TEST_CASE("drift step") {
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{8.0, 128});
  const Field f = smooth_field(g, 50);
  PropagatorPlan plan;
  const Field same = drift_step(f, 0.3, Potential::zero(), plan);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(same[i] == f[i]);

  Diagnostics d;
  const Field lin = drift_step(f, 0.7, kV, plan, &d);
  CHECK(lp_norm(lin, kInfinity) <= lp_norm(f, kInfinity));
  CHECK(lin.min_real() >= 0.0);
  CHECK(d.shifted_out_mass < 1e-6);

  for (Interpolation ip : {Interpolation::linear, Interpolation::cubic}) {
    plan.interpolation = ip;
    const Field back = drift_step(drift_step(f, 0.1, kV, plan), -0.1, kV, plan);
    CHECK(rel2(back, f) < (ip == Interpolation::linear ? 5e-3 : 1e-4));
  }

  // exact for a field linear in v away from the box edge
  plan.interpolation = Interpolation::cubic;
  const Field lv = Field::sample(g, [](auto z) { return std::abs(z[1]) < 6 ? z[1] * z[1] * z[1] : 0.0; });
  const Field sh = drift_step(lv, 0.4, kV, plan);
  std::vector<std::size_t> idx(2);
  double worst = 0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    g.unravel(c, idx);
    const double x = g.x_axis(0).coord(idx[0]), v = g.v_axis(0).coord(idx[1]);
    if (std::abs(v) > 5) continue;
    double gr = 0;
    kV.gradient(std::span(&x, 1), std::span(&gr, 1));
    worst = std::max(worst, std::abs(sh[c].real() - std::pow(v + 0.4 * gr, 3)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("drift reports mass pushed out of the box") {
  const PhaseGrid g(1, Axis{4.0, 32}, Axis{2.0, 32});
  const Field f = Field::sample(g, [](auto) { return 1.0; });
  Diagnostics d;
  PropagatorPlan plan;
  (void)drift_step(f, 10.0, Potential::inverse_power(1.0, 1.0), plan, &d);
  CHECK(d.shifted_out_mass > 0.1);
}

TEST_CASE("evolve without potential matches the free step") {
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{8.0, 96});
  const Field f = smooth_field(g, 60);
  PropagatorPlan plan;
  plan.dt = 0.1;
  const std::vector<double> ts{0.5, 1.0};
  const auto snaps = evolve(f, 1.0, Potential::zero(), plan, ts);
  REQUIRE(snaps.size() == 2);
  CHECK(rel2(snaps[0], free_step_fourier(f, 0.5)) < 1e-8);
  CHECK(rel2(snaps[1], free_step_fourier(f, 1.0)) < 1e-8);
}

TEST_CASE("evolve validates its sampling schedule") {
  const PhaseGrid g(1, Axis{4.0, 16}, Axis{4.0, 16});
  const Field f(g);
  PropagatorPlan plan;
  plan.dt = 0.1;
  const std::vector<double> late{1.5}, off{0.25}, zero{0.0};
  CHECK_THROWS_AS(evolve(f, 1.0, kV, plan, late), InputError);
  CHECK_THROWS_AS(evolve(f, 1.0, kV, plan, off), InputError);
  CHECK_THROWS_AS(evolve(f, 1.0, kV, plan, zero), InputError);
  CHECK_THROWS_AS(evolve(f, 1.05, kV, plan, std::vector<double>{}), InputError);
  // unsorted requests come back in request order
  const std::vector<double> ts{0.3, 0.1};
  const auto snaps = evolve(Field::sample(g, [](auto z) { return std::exp(-z[0] * z[0] - z[1] * z[1]); }), 0.3, kV, plan, ts);
  CHECK(lp_norm(snaps[0], 2) < lp_norm(snaps[1], 2));
}

TEST_CASE("evolve keeps non-negative data non-negative with linear drift") {
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{8.0, 128});
  const Field f = Field::sample(g, [](auto z) { return std::exp(-z[0] * z[0] / 2 - z[1] * z[1] / 4); });
  PropagatorPlan plan;
  plan.backend = Backend::direct_kernel;
  plan.dt = 0.01;
  const auto snaps = evolve(f, 0.5, kV, plan, std::vector<double>{0.1, 0.5});
  for (const Field& s : snaps) CHECK(s.min_real() >= -1e-14);
}

TEST_CASE("Strang splitting converges at second order") {
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{8.0, 128});
  const Field f = smooth_field(g, 70);
  const Potential V = Potential::inverse_power(1.0, 2.0);
  PropagatorPlan plan;
  plan.interpolation = Interpolation::cubic;
  const std::vector<double> t1{1.0};
  plan.dt = 0.00625;
  const Field ref = evolve(f, 1.0, V, plan, t1)[0];
  std::vector<double> err;
  for (double dt : {0.1, 0.05, 0.025}) {
    plan.dt = dt;
    err.push_back(rel2(evolve(f, 1.0, V, plan, t1)[0], ref));
  }
  CHECK(err[0] / err[1] > 3.0);
  CHECK(err[1] / err[2] > 3.0);
  plan.splitting = Splitting::lie;
  plan.dt = 0.05;
  const double lie05 = rel2(evolve(f, 1.0, V, plan, t1)[0], ref);
  plan.dt = 0.025;
  const double lie025 = rel2(evolve(f, 1.0, V, plan, t1)[0], ref);
  CHECK(lie05 / lie025 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("mass functional is conserved") {
  const PhaseGrid g(1, Axis{8.0, 64}, Axis{8.0, 160});
  const Field m = maxwellian_field(g, kV);
  const Field f = smooth_field(g, 80);
  PropagatorPlan plan;
  plan.interpolation = Interpolation::cubic;
  const std::vector<double> ts{0.5, 1.0, 2.0};
  const double m0 = pairing(m, f).real();
  for (const Field& s : evolve(f, 2.0, kV, plan, ts)) CHECK(std::abs(pairing(m, s).real() - m0) < 1e-4 * std::abs(m0));
}

TEST_CASE("Born term") {
  const PhaseGrid g(1, Axis{8.0, 32}, Axis{8.0, 64});
  const Field f = smooth_field(g, 90);
  CHECK(lp_norm(born_term(f, 1.0, Potential::zero(), 8), kInfinity) == 0.0);
  CHECK_THROWS_AS(born_term(f, 1.0, kV, 3), DomainError);
  CHECK_THROWS_AS(born_term(f, 0.0, kV, 8), DomainError);
  // W f = -grad V . grad_v f
  const Field lin = Field::sample(g, [](auto z) { return std::abs(z[1]) < 7 ? z[1] : 0.0; });
  const Field w = apply_w(lin, kV);
  const double x = g.x_axis(0).coord(20);
  double gr = 0;
  kV.gradient(std::span(&x, 1), std::span(&gr, 1));
  CHECK(w[20 * 64 + 32].real() == doctest::Approx(-gr).epsilon(1e-12));
}

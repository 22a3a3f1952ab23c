#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "kfp/errors.hpp"
#include "kfp/grid.hpp"
#include "kfp/kernels.hpp"
#include "kfp/potential.hpp"

namespace kfp {

enum class Backend { direct_kernel, fourier_factorized };
enum class Splitting { lie, strang };
enum class Interpolation { linear, cubic };
enum class Boundary { zero_fill };

Backend parse_backend(std::string_view s);
Splitting parse_splitting(std::string_view s);
Interpolation parse_interpolation(std::string_view s);
std::string_view to_string(Backend b);
std::string_view to_string(Splitting s);
std::string_view to_string(Interpolation i);

struct PropagatorPlan {
  Backend backend = Backend::fourier_factorized;
  Splitting splitting = Splitting::strang;
  double dt = 0.01;
  Interpolation interpolation = Interpolation::linear;
  Boundary boundary = Boundary::zero_fill;

  /// dt > 0 and direct_kernel only for n = 1.
  void validate(const PhaseGrid& grid) const;
};

/// e^{-t P0} discretised on a fixed grid, with everything that depends only on
/// (grid, t) precomputed so repeated application is cheap.
///
/// x is treated periodically by both backends.
///
/// fourier_factorized: transform in x, then per frequency xi apply
///   diag(e^{-i omega xi v}) K diag(e^{-i omega xi v'}) e^{-sigma xi^2}
/// along each velocity axis (trapezoid in v'), then transform back. Any n.
///
/// direct_kernel (n = 1): u(x, v) = sum_{x', v'} F(x, v, x', v') f(x', v') with
/// trapezoid weights in v'. In x' the Gaussian factor is sampled pointwise when the
/// grid resolves it (aliasing below e^{-36}); otherwise it is integrated exactly
/// against the piecewise-linear interpolant of f. Every weight is non-negative, so
/// the step maps non-negative data to non-negative data.
class FreePropagator {
 public:
  FreePropagator(const PhaseGrid& grid, double t, Backend backend);
  ~FreePropagator();
  FreePropagator(FreePropagator&&) noexcept;
  FreePropagator& operator=(FreePropagator&&) noexcept;

  Field apply(const Field& f, Diagnostics* diag = nullptr) const;

  double time() const { return profile_.t; }
  Backend backend() const { return backend_; }
  const kernels::TimeProfile& profile() const { return profile_; }
  /// True when the direct backend samples the x-Gaussian pointwise.
  bool direct_pointwise() const;

  struct Impl;

 private:
  PhaseGrid grid_;
  kernels::TimeProfile profile_;
  Backend backend_;
  std::unique_ptr<Impl> impl_;
};

Field free_step_direct(const Field& f, double t, Diagnostics* diag = nullptr);
Field free_step_fourier(const Field& f, double t, Diagnostics* diag = nullptr);
Field free_step(const Field& f, double t, Backend backend, Diagnostics* diag = nullptr);

/// e^{-tH} on velocity fields: Mehler kernel by trapezoid quadrature along each axis.
VelocityField harmonic_step(const VelocityField& g, double t);

/// x-integral of a phase-space field, g(v) = int f(x, v) dx.
VelocityField x_marginal(const Field& f);

/// Exact drift map e^{-tW} f(x, v) = f(x, v + t grad V(x)), interpolated along v with
/// zero fill outside the box. Mass pushed out of the box is added to diag->shifted_out_mass.
Field drift_step(const Field& f, double t, const Potential& V, const PropagatorPlan& plan,
                 Diagnostics* diag = nullptr);

/// W f = -grad V(x) . grad_v f, centred fourth-order differences in v (zero outside the box).
Field apply_w(const Field& f, const Potential& V);

/// Snapshots of the split evolution at the requested times (sorted, multiples of dt, in (0, t_total]).
/// Strang per step: drift(dt/2), free(dt), drift(dt/2). Lie: drift(dt), free(dt).
std::vector<Field> evolve(const Field& f, double t_total, const Potential& V, const PropagatorPlan& plan,
                          std::span<const double> sample_times, Diagnostics* diag = nullptr);

/// First Duhamel term I(t) f = int_0^t e^{-(t-s)P0} W e^{-sP0} f ds, midpoint rule in s.
Field born_term(const Field& f, double t, const Potential& V, int quadrature_steps,
                Backend backend = Backend::fourier_factorized);

}  // namespace kfp

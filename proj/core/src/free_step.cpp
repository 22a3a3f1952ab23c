#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "fourier_plan.hpp"
#include "kfp/phase_space.hpp"
#include "kfp/propagator.hpp"

namespace kfp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegligibleWeight = 1e-30;
// direct backend keeps the mass-exact hat rule until the x aliasing error is below exp(-36)
constexpr double kDirectResolvedExponent = 36.0;

// Standard-normal style helpers for the hat-integrated Gaussian
double normal_pdf(double u, double tau) { return std::exp(-0.5 * u * u / (tau * tau)) / (tau * std::sqrt(2.0 * kPi)); }
double normal_cdf(double u, double tau) { return 0.5 * std::erfc(-u / (tau * std::sqrt(2.0))); }
// second antiderivative of the N(0, tau^2) density
double ramp(double u, double tau) { return u * normal_cdf(u, tau) + tau * tau * normal_pdf(u, tau); }

// int N(z - y; tau) Lambda_h(y) dy with Lambda_h the unit hat of half-width h
double hat_gaussian(double z, double h, double tau) {
  const double w = (ramp(z + h, tau) - 2.0 * ramp(z, tau) + ramp(z - h, tau)) / h;
  return w > 0.0 ? w : 0.0;
}

// Trapezoid aliasing error exp(-2 pi^2 tau^2 / h^2) below the O(h^2 / 12) error of the hat rule.
bool trapezoid_resolved(double tau, double h) {
  return 2.0 * kPi * kPi * tau * tau / (h * h) >= std::log(12.0 / (h * h));
}

// Mehler matrix along one axis, K(v_a, v_b) h_b. A kernel too narrow for the
// trapezoid rule is integrated against the hat basis in v_b instead.
std::vector<double> mehler_matrix(const Axis& ax, const kernels::TimeProfile& tp) {
  const std::size_t N = ax.points;
  std::vector<double> k(N * N);
  const double h = ax.spacing();
  const double csch = 1.0 / std::sinh(tp.t);
  const double tau = std::sqrt(2.0 / (csch + tp.omega));
  const bool resolved = trapezoid_resolved(tau, h);
  for (std::size_t a = 0; a < N; ++a) {
    const double m = csch * ax.coord(a) / (csch + tp.omega);
    const double scale = kernels::harmonic_kernel_1d(ax.coord(a), m, tp) * tau * std::sqrt(2.0 * kPi);
    for (std::size_t b = 0; b < N; ++b)
      k[a * N + b] = resolved ? kernels::harmonic_kernel_1d(ax.coord(a), ax.coord(b), tp) * h : scale * hat_gaussian(ax.coord(b) - m, h, tau);
  }
  return k;
}

struct Tap {
  int offset;
  double weight;
};

}  // namespace

struct FreePropagator::Impl {
  // fourier
  std::vector<std::vector<double>> mehler;  // per velocity axis
  std::optional<std::vector<cplx>> scratch;
  // direct (n = 1)
  bool pointwise = false;
  std::vector<std::vector<Tap>> taps;  // per (v_out, v_in) pair, weight includes K h_v
};

FreePropagator::FreePropagator(const PhaseGrid& grid, double t, Backend backend)
    : grid_(grid), profile_(kernels::time_profiles(t)), backend_(backend), impl_(std::make_unique<Impl>()) {
  if (backend == Backend::fourier_factorized) {
    for (int j = 0; j < grid.dim(); ++j) impl_->mehler.push_back(mehler_matrix(grid.v_axis(j), profile_));
    return;
  }
  if (grid.dim() != 1) throw CapabilityError("direct_kernel backend supports n = 1 only");

  const Axis& ax = grid.x_axis(0);
  const Axis& av = grid.v_axis(0);
  const std::size_t Nx = ax.points, Nv = av.points;
  const double hx = ax.spacing();
  const double period = 2.0 * ax.half_width;
  const double tau = std::sqrt(2.0 * profile_.sigma);
  impl_->pointwise = 2.0 * kPi * kPi * tau * tau / (hx * hx) >= kDirectResolvedExponent;
  const std::vector<double> K = mehler_matrix(av, profile_);
  double kmax = 0.0;
  for (double k : K) kmax = std::max(kmax, k);

  impl_->taps.resize(Nv * Nv);
  const int half = static_cast<int>(Nx / 2);
  for (std::size_t a = 0; a < Nv; ++a) {
    for (std::size_t b = 0; b < Nv; ++b) {
      const double kw = K[a * Nv + b];
      if (kw < kNegligibleWeight * kmax) continue;
      const double shift = profile_.omega * (av.coord(a) + av.coord(b));
      std::vector<Tap>& taps = impl_->taps[a * Nv + b];
      for (int d = -half; d < half; ++d) {
        double w = 0.0;
        for (int m = -2; m <= 2; ++m) {
          const double z = d * hx - shift + m * period;
          w += impl_->pointwise ? normal_pdf(z, tau) * hx : hat_gaussian(z, hx, tau);
        }
        w *= kw;
        if (w > kNegligibleWeight * kmax) taps.push_back({d, w});
      }
    }
  }
}

FreePropagator::~FreePropagator() = default;
FreePropagator::FreePropagator(FreePropagator&&) noexcept = default;
FreePropagator& FreePropagator::operator=(FreePropagator&&) noexcept = default;

bool FreePropagator::direct_pointwise() const { return impl_->pointwise; }

Field FreePropagator::apply(const Field& f, Diagnostics* diag) const {
  if (!(f.grid() == grid_)) throw GridError("FreePropagator: field grid differs from the plan grid");
  if (f.representation() != Representation::physical) throw InputError("FreePropagator expects a physical-space field");

  if (backend_ == Backend::direct_kernel) {
    const std::size_t Nx = grid_.x_axis(0).points, Nv = grid_.v_axis(0).points;
    Field out(grid_, f.is_real());
    const auto nx = static_cast<long long>(Nx);
    for (std::size_t a = 0; a < Nv; ++a) {
      for (std::size_t b = 0; b < Nv; ++b) {
        const std::vector<Tap>& taps = impl_->taps[a * Nv + b];
        if (taps.empty()) continue;
        for (std::size_t i = 0; i < Nx; ++i) {
          cplx acc = 0.0;
          for (const Tap& tp : taps) {
            long long k = static_cast<long long>(i) - tp.offset;
            k = ((k % nx) + nx) % nx;
            acc += tp.weight * f[static_cast<std::size_t>(k) * Nv + b];
          }
          out[i * Nv + a] += acc;
        }
      }
    }
    return out;
  }

  // fourier_factorized
  Field work = f;
  detail::XFourierPlan plan(grid_, work.values());
  if (diag != nullptr) (void)partial_fourier_x(f, diag);  // boundary diagnostics only
  plan.forward(work.values());

  const int n = grid_.dim();
  const double omega = profile_.omega;
  std::vector<cplx> line, tmp, acc;
  for (int j = 0; j < n; ++j) {
    const Axis& ax = grid_.x_axis(j);
    const Axis& av = grid_.v_axis(j);
    const std::size_t Nv = av.points;
    const std::size_t vstride = grid_.stride(static_cast<std::size_t>(n + j));
    const std::size_t xstride = grid_.stride(static_cast<std::size_t>(j));
    const std::vector<double>& K = impl_->mehler[j];
    line.resize(Nv);
    tmp.resize(Nv);
    acc.resize(Nv);
    grid_.for_each_line(static_cast<std::size_t>(n + j), [&](std::size_t base) {
      const std::size_t k = (base / xstride) % ax.points;
      const bool nyquist = k == ax.points / 2;
      const double xi = ax.frequency(k);
      for (std::size_t a = 0; a < Nv; ++a) line[a] = work[base + a * vstride];
      std::fill(acc.begin(), acc.end(), cplx(0.0));
      for (int pass = 0; pass < (nyquist ? 2 : 1); ++pass) {
        const double x = pass == 0 ? xi : -xi;
        for (std::size_t b = 0; b < Nv; ++b) tmp[b] = std::polar(1.0, -omega * x * av.coord(b)) * line[b];
        for (std::size_t a = 0; a < Nv; ++a) {
          cplx s = 0.0;
          const double* row = K.data() + a * Nv;
          for (std::size_t b = 0; b < Nv; ++b) s += row[b] * tmp[b];
          acc[a] += std::polar(1.0, -omega * x * av.coord(a)) * s;
        }
      }
      const double w = (nyquist ? 0.5 : 1.0) * std::exp(-profile_.sigma * xi * xi);
      for (std::size_t a = 0; a < Nv; ++a) work[base + a * vstride] = w * acc[a];
    });
  }
  plan.backward(work.values());
  work.set_real(f.is_real());
  work.enforce_real_tag();
  return work;
}

Field free_step(const Field& f, double t, Backend backend, Diagnostics* diag) {
  return FreePropagator(f.grid(), t, backend).apply(f, diag);
}

Field free_step_direct(const Field& f, double t, Diagnostics* diag) {
  return free_step(f, t, Backend::direct_kernel, diag);
}

Field free_step_fourier(const Field& f, double t, Diagnostics* diag) {
  return free_step(f, t, Backend::fourier_factorized, diag);
}

VelocityField harmonic_step(const VelocityField& g, double t) {
  const kernels::TimeProfile tp = kernels::time_profiles(t);
  const VelocityGrid& grid = g.grid();
  VelocityField out = g;
  std::vector<cplx> line;
  for (int j = 0; j < grid.dim(); ++j) {
    const Axis& av = grid.axis(static_cast<std::size_t>(j));
    const std::size_t N = av.points, stride = grid.stride(static_cast<std::size_t>(j));
    const std::vector<double> K = mehler_matrix(av, tp);
    line.resize(N);
    grid.for_each_line(static_cast<std::size_t>(j), [&](std::size_t base) {
      for (std::size_t b = 0; b < N; ++b) line[b] = out[base + b * stride];
      for (std::size_t a = 0; a < N; ++a) {
        cplx s = 0.0;
        for (std::size_t b = 0; b < N; ++b) s += K[a * N + b] * line[b];
        out[base + a * stride] = s;
      }
    });
  }
  return out;
}

VelocityField x_marginal(const Field& f) {
  const PhaseGrid& g = f.grid();
  VelocityField out(velocity_part(g), f.is_real());
  const std::size_t vc = g.v_cells();
  double hx = 1.0;
  for (int j = 0; j < g.dim(); ++j) hx *= g.x_axis(j).spacing();
  for (std::size_t c = 0; c < g.cell_count(); ++c) out[c % vc] += f[c] * hx;
  return out;
}

}  // namespace kfp

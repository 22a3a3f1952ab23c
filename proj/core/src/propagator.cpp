#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kfp/phase_space.hpp"
#include "kfp/propagator.hpp"

namespace kfp {

Backend parse_backend(std::string_view s) {
  if (s == "direct_kernel") return Backend::direct_kernel;
  if (s == "fourier_factorized") return Backend::fourier_factorized;
  throw InputError("unknown backend '" + std::string(s) + "'");
}

Splitting parse_splitting(std::string_view s) {
  if (s == "lie") return Splitting::lie;
  if (s == "strang") return Splitting::strang;
  throw InputError("unknown splitting '" + std::string(s) + "'");
}

Interpolation parse_interpolation(std::string_view s) {
  if (s == "linear") return Interpolation::linear;
  if (s == "cubic") return Interpolation::cubic;
  throw InputError("unknown interpolation '" + std::string(s) + "'");
}

std::string_view to_string(Backend b) { return b == Backend::direct_kernel ? "direct_kernel" : "fourier_factorized"; }
std::string_view to_string(Splitting s) { return s == Splitting::lie ? "lie" : "strang"; }
std::string_view to_string(Interpolation i) { return i == Interpolation::linear ? "linear" : "cubic"; }

void PropagatorPlan::validate(const PhaseGrid& grid) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("plan: dt must be positive and finite");
  if (backend == Backend::direct_kernel && grid.dim() != 1)
    throw CapabilityError("plan: direct_kernel backend supports n = 1 only");
}

namespace {

// Interpolation weights at fractional offset a in [0, 1) relative to node k0.
// Linear uses nodes k0, k0+1; cubic uses k0-1..k0+2.
int stencil(Interpolation interp, double a, double* w) {
  if (interp == Interpolation::linear) {
    w[0] = 1.0 - a;
    w[1] = a;
    return 2;
  }
  w[0] = -a * (a - 1.0) * (a - 2.0) / 6.0;
  w[1] = (a + 1.0) * (a - 1.0) * (a - 2.0) / 2.0;
  w[2] = -(a + 1.0) * a * (a - 2.0) / 2.0;
  w[3] = (a + 1.0) * a * (a - 1.0) / 6.0;
  return 4;
}

// grad V at every x node, gradients[xc * n + j]
std::vector<double> gradients(const PhaseGrid& g, const Potential& V) {
  const int n = g.dim();
  std::vector<double> out(g.x_cells() * static_cast<std::size_t>(n));
  std::vector<std::size_t> idx(g.rank());
  std::vector<double> x(static_cast<std::size_t>(n));
  const std::size_t vc = g.v_cells();
  for (std::size_t xc = 0; xc < g.x_cells(); ++xc) {
    g.unravel(xc * vc, idx);
    for (int j = 0; j < n; ++j) x[j] = g.x_axis(j).coord(idx[j]);
    V.gradient(x, std::span<double>(out.data() + xc * n, static_cast<std::size_t>(n)));
  }
  return out;
}

}  // namespace

Field drift_step(const Field& f, double t, const Potential& V, const PropagatorPlan& plan, Diagnostics* diag) {
  if (f.representation() != Representation::physical) throw InputError("drift_step expects a physical-space field");
  if (t == 0.0 || V.is_zero()) return f;
  const PhaseGrid& g = f.grid();
  const int n = g.dim();
  const std::size_t vc = g.v_cells();
  const std::vector<double> grad = gradients(g, V);

  Field cur = f;
  std::vector<cplx> line, shifted;
  double lost = 0.0;
  for (int j = 0; j < n; ++j) {
    const Axis& av = g.v_axis(j);
    const std::size_t N = av.points;
    const std::size_t stride = g.stride(static_cast<std::size_t>(n + j));
    const double h = av.spacing();
    line.resize(N);
    shifted.resize(N);
    Field next = cur;
    g.for_each_line(static_cast<std::size_t>(n + j), [&](std::size_t base) {
      const double s = t * grad[(base / vc) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] / h;
      if (s == 0.0) return;
      for (std::size_t a = 0; a < N; ++a) line[a] = cur[base + a * stride];
      const double fl = std::floor(s);
      const long long k0 = static_cast<long long>(fl);
      double w[4];
      const int m = stencil(plan.interpolation, s - fl, w);
      const long long first = plan.interpolation == Interpolation::linear ? 0 : -1;
      double before = 0.0, after = 0.0;
      for (std::size_t a = 0; a < N; ++a) {
        before += std::abs(line[a]);
        cplx acc = 0.0;
        for (int q = 0; q < m; ++q) {
          const long long src = static_cast<long long>(a) + k0 + first + q;
          if (src >= 0 && src < static_cast<long long>(N)) acc += w[q] * line[static_cast<std::size_t>(src)];
        }
        shifted[a] = acc;
        after += std::abs(acc);
      }
      for (std::size_t a = 0; a < N; ++a) next[base + a * stride] = shifted[a];
      if (after < before) lost += (before - after) * g.cell_volume();
    });
    cur = std::move(next);
  }
  if (diag != nullptr) diag->shifted_out_mass += lost;
  cur.set_real(f.is_real());
  cur.enforce_real_tag();
  return cur;
}

Field apply_w(const Field& f, const Potential& V) {
  const PhaseGrid& g = f.grid();
  const int n = g.dim();
  const std::size_t vc = g.v_cells();
  const std::vector<double> grad = gradients(g, V);
  Field out(g, f.is_real());
  std::vector<std::size_t> idx(g.rank());
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    g.unravel(c, idx);
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const std::size_t a = static_cast<std::size_t>(n + j);
      const Axis& av = g.axis(a);
      const std::size_t st = g.stride(a);
      auto at = [&](long long d) {
        const long long i = static_cast<long long>(idx[a]) + d;
        return i >= 0 && i < static_cast<long long>(av.points) ? f[static_cast<std::size_t>(static_cast<long long>(c) + d * static_cast<long long>(st))] : cplx(0.0);
      };
      const cplx d1 = (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * av.spacing());
      acc += grad[(c / vc) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] * d1;
    }
    out[c] = -acc;
  }
  return out;
}

std::vector<Field> evolve(const Field& f, double t_total, const Potential& V, const PropagatorPlan& plan,
                          std::span<const double> sample_times, Diagnostics* diag) {
  plan.validate(f.grid());
  if (!(t_total > 0.0) || !std::isfinite(t_total)) throw DomainError("evolve: t_total must be positive");
  auto steps_for = [&](double t) {
    const double r = t / plan.dt;
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-9 * std::max(1.0, k)) return -1LL;
    return static_cast<long long>(k);
  };
  const long long total = steps_for(t_total);
  if (total <= 0) throw InputError("evolve: t_total must be a positive multiple of dt");
  std::vector<long long> marks;
  for (double s : sample_times) {
    const long long k = steps_for(s);
    if (!(s > 0.0) || k <= 0 || k > total) throw InputError("evolve: sample time " + std::to_string(s) + " is not a multiple of dt in (0, t_total]");
    marks.push_back(k);
  }
  std::vector<std::size_t> order(marks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return marks[a] < marks[b]; });

  if (diag != nullptr) (void)partial_fourier_x(f, diag);
  const FreePropagator free(f.grid(), plan.dt, plan.backend);
  const double drift_t = plan.splitting == Splitting::strang ? 0.5 * plan.dt : plan.dt;

  std::vector<Field> snaps(marks.size());
  Field cur = f;
  std::size_t next = 0;
  for (long long step = 1; step <= total && next < order.size(); ++step) {
    cur = drift_step(cur, drift_t, V, plan, diag);
    cur = free.apply(cur);
    if (plan.splitting == Splitting::strang) cur = drift_step(cur, drift_t, V, plan, diag);
    while (next < order.size() && marks[order[next]] == step) snaps[order[next++]] = cur;
  }
  return snaps;
}

Field born_term(const Field& f, double t, const Potential& V, int quadrature_steps, Backend backend) {
  if (!(t > 0.0)) throw DomainError("born_term: t must be positive");
  if (quadrature_steps < 4) throw DomainError("born_term: at least 4 quadrature steps are required");
  const double ds = t / quadrature_steps;
  Field acc(f.grid(), f.is_real());
  for (int k = 0; k < quadrature_steps; ++k) {
    const double s = (k + 0.5) * ds;
    const Field inner = FreePropagator(f.grid(), s, backend).apply(f);
    const Field term = FreePropagator(f.grid(), t - s, backend).apply(apply_w(inner, V));
    acc += term;
  }
  acc *= ds;
  return acc;
}

}  // namespace kfp

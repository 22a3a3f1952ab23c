#include "kfp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "kfp/kernels.hpp"
#include "kfp/phase_space.hpp"

namespace kfp::analysis {

Regime parse_regime(const std::string& s) {
  if (s == "short_time") return Regime::short_time;
  if (s == "long_time") return Regime::long_time;
  throw InputError("unknown regime '" + s + "'");
}

std::string to_string(Regime r) { return r == Regime::short_time ? "short_time" : "long_time"; }

std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::operator_norm_exact: return "operator_norm_exact";
    case NormKind::operator_norm_lower_bound: return "operator_norm_lower_bound";
    case NormKind::field_norm: return "field_norm";
  }
  return "";
}

double free_norm_1_to_inf(double t, int n) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("free_norm_1_to_inf: t must be positive");
  return kernels::free_kernel_supremum(t, n);
}

double expected_exponent(double p, double q, int n, Regime regime) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw DomainError("expected_exponent: p, q must be >= 1");
  if (p > q) throw DomainError("expected_exponent: p must not exceed q");
  const double d = 1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q);
  return (regime == Regime::long_time ? 0.5 : 2.0) * n * d;
}

DecayFit fit_decay_exponent(const std::vector<NormRecord>& records, std::pair<double, double> window, Regime regime,
                            int n) {
  const auto [t_min, t_max] = window;
  if (!(t_min < t_max)) throw InputError("fit_decay_exponent: empty time window");
  std::vector<double> lx, ly;
  double p = 0.0, q = 0.0;
  for (const NormRecord& r : records) {
    if (r.t < t_min || r.t > t_max) continue;
    if (!(r.value > 0.0) || !std::isfinite(r.value)) throw InputError("fit_decay_exponent: non-positive norm value");
    if (lx.empty()) {
      p = r.p;
      q = r.q;
    } else if (r.p != p || r.q != q) {
      throw InputError("fit_decay_exponent: records mix (p, q) pairs");
    }
    lx.push_back(std::log(r.t));
    ly.push_back(std::log(r.value));
  }
  if (lx.size() < 5) throw InputError("fit_decay_exponent: fewer than 5 records inside the window");

  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw InputError("fit_decay_exponent: all records share one time");
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - my - slope * (lx[i] - mx);
    ss_res += e * e;
  }

  DecayFit fit;
  fit.regime = regime;
  fit.p = p;
  fit.q = q;
  fit.fitted_exponent = slope;
  fit.expected_exponent = -expected_exponent(p, q, n, regime);
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.time_window = window;
  fit.samples = lx.size();
  return fit;
}

std::vector<double> log_spaced(double t_min, double t_max, std::size_t count) {
  if (!(t_min > 0.0) || !(t_max > t_min) || count < 2) throw InputError("log_spaced: need 0 < t_min < t_max, count >= 2");
  std::vector<double> out(count);
  const double a = std::log(t_min), b = std::log(t_max);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = t_min;
  out.back() = t_max;
  return out;
}

std::vector<Field> default_test_family(const PhaseGrid& grid, bool with_spikes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  const int n = grid.dim();
  std::vector<Field> family;
  const double widths[] = {0.5, 1.0, 2.0};
  const double centres[] = {0.0, 1.0, -1.5};
  for (double w : widths) {
    for (double c : centres) {
      std::vector<double> cx(static_cast<std::size_t>(n)), cv(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        cx[j] = c + jitter(rng);
        cv[j] = 0.5 * c + jitter(rng);
      }
      family.push_back(Field::sample(grid, [&](std::span<const double> z) {
        double e = 0.0;
        for (int j = 0; j < n; ++j) {
          const double dx = z[j] - cx[j], dv = z[n + j] - cv[j];
          e += (dx * dx + dv * dv) / (2.0 * w * w);
        }
        return std::exp(-e);
      }));
    }
  }
  if (with_spikes) {
    // spikes at x = 0 and a few velocities around 0
    std::vector<std::size_t> idx(grid.rank());
    for (int dv = -2; dv <= 2; ++dv) {
      Field s(grid, true);
      std::size_t flat = 0;
      for (std::size_t a = 0; a < grid.rank(); ++a) {
        std::size_t i = grid.extent(a) / 2;
        if (a == static_cast<std::size_t>(n)) i = static_cast<std::size_t>(static_cast<long long>(i) + dv);
        flat += i * grid.stride(a);
      }
      s[flat] = 1.0;
      family.push_back(std::move(s));
    }
  }
  return family;
}

NormRecord norm_lower_bound(const Propagate& propagate, double t, double p, double q, const std::vector<Field>& family,
                            Diagnostics* diag) {
  if (family.empty()) throw InputError("norm_lower_bound: empty test family");
  NormRecord rec{t, p, q, 0.0, NormKind::operator_norm_lower_bound};
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double np = lp_norm(family[i], p);
    if (!(np > 0.0) || !std::isfinite(np)) {
      if (diag != nullptr) diag->warn("norm_lower_bound: skipped degenerate family member " + std::to_string(i));
      continue;
    }
    rec.value = std::max(rec.value, lp_norm(propagate(family[i]), q) / np);
  }
  return rec;
}

PotentialReport potential_condition_check(const Potential& V, double rho_claimed, double probe_radius, int n) {
  if (!(probe_radius > 0.0)) throw DomainError("potential_condition_check: probe_radius must be positive");
  if (n < 1) throw DomainError("potential_condition_check: n must be >= 1");
  PotentialReport rep;
  constexpr int kSamples = 400;
  // rays: +-e_j and the normalised diagonal
  std::vector<std::vector<double>> rays;
  for (int j = 0; j < n; ++j) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> e(static_cast<std::size_t>(n), 0.0);
      e[j] = s;
      rays.push_back(e);
    }
  }
  if (n > 1) rays.emplace_back(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));

  std::vector<double> outer_r, outer_g(kSamples + 1, 0.0);
  std::vector<double> x(static_cast<std::size_t>(n)), g(static_cast<std::size_t>(n));
  for (const auto& e : rays) {
    for (int i = 0; i <= kSamples; ++i) {
      const double r = probe_radius * static_cast<double>(i) / kSamples;
      for (int j = 0; j < n; ++j) x[j] = r * e[j];
      V.gradient(x, g);
      double gn = 0.0;
      for (double gj : g) gn += gj * gj;
      const double br = japanese_bracket(x);
      const double val = std::pow(br, rho_claimed) * (std::abs(V.value(x)) + br * std::sqrt(gn));
      if (!std::isfinite(val)) {
        std::ostringstream os;
        os << "non-finite sample at radius " << r;
        rep.pass = false;
        rep.message = os.str();
        rep.c_measured = val;
        return rep;
      }
      rep.c_measured = std::max(rep.c_measured, val);
      outer_g[i] = std::max(outer_g[i], val);
    }
  }
  // slope of log(max over rays) against log<r> on [R/4, R]
  std::vector<NormRecord> recs;
  for (int i = kSamples / 4; i <= kSamples; ++i) {
    const double r = probe_radius * static_cast<double>(i) / kSamples;
    if (outer_g[i] > 0.0) recs.push_back({std::sqrt(1.0 + r * r), 1.0, 1.0, outer_g[i], NormKind::field_norm});
  }
  if (recs.size() >= 5) {
    rep.outer_slope = fit_decay_exponent(recs, {recs.front().t, recs.back().t}, Regime::long_time, 1).fitted_exponent;
  }
  rep.pass = rep.outer_slope <= kBoundedSlopeTolerance;
  std::ostringstream os;
  os << (rep.pass ? "bounded" : "unbounded") << ": C_meas = " << rep.c_measured << ", outer log-log slope = " << rep.outer_slope;
  rep.message = os.str();
  return rep;
}

BootstrapTrace bootstrap_exponents(double rho, std::size_t max_iter) {
  if (!(rho > 1.0) || !std::isfinite(rho)) throw DomainError("bootstrap_exponents: rho must exceed 1");
  if (max_iter < 1) throw DomainError("bootstrap_exponents: max_iter must be >= 1");
  BootstrapTrace tr;
  tr.rho = rho;
  if (rho < 1.5) tr.fixed_point = rho / (3.0 - 2.0 * rho);
  double r = 2.0 * rho * rho / 3.0;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    if (k > 1) r = rho * (1.0 + 2.0 * r) / 3.0;
    tr.sequence.push_back(r);
    if (r > 1.0) {
      tr.terminated_at = k;
      return tr;
    }
  }
  tr.diverged = true;
  return tr;
}

Field apply_p_centered(const Field& f, const Potential& V) {
  const PhaseGrid& g = f.grid();
  const int n = g.dim();
  Field out(g, f.is_real());
  std::vector<std::size_t> idx(g.rank());
  std::vector<double> x(static_cast<std::size_t>(n)), grad(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    g.unravel(c, idx);
    for (int j = 0; j < n; ++j) x[j] = g.x_axis(j).coord(idx[j]);
    V.gradient(x, grad);
    cplx acc = -0.5 * n * f[c];
    for (int j = 0; j < n; ++j) {
      const std::size_t ax = static_cast<std::size_t>(j), av = static_cast<std::size_t>(n + j);
      // x: periodic
      const Axis& X = g.axis(ax);
      const std::size_t sx = g.stride(ax);
      const std::size_t ixp = (idx[ax] + 1) % X.points, ixm = (idx[ax] + X.points - 1) % X.points;
      const cplx fxp = f[c + ixp * sx - idx[ax] * sx], fxm = f[c + ixm * sx - idx[ax] * sx];
      // v: zero outside
      const Axis& W = g.axis(av);
      const std::size_t sv = g.stride(av);
      const cplx fvp = idx[av] + 1 < W.points ? f[c + sv] : cplx(0.0);
      const cplx fvm = idx[av] > 0 ? f[c - sv] : cplx(0.0);
      const double hv = W.spacing(), hx = X.spacing();
      const double v = W.coord(idx[av]);
      acc += -(fvp - 2.0 * f[c] + fvm) / (hv * hv);
      acc += 0.25 * v * v * f[c];
      acc += v * (fxp - fxm) / (2.0 * hx);
      acc += -grad[j] * (fvp - fvm) / (2.0 * hv);
    }
    out[c] = acc;
  }
  return out;
}

double operator_residual(const Field& f, const Potential& V) {
  const double nf = lp_norm(f, 2.0);
  if (!(nf > 0.0)) throw InputError("operator_residual: zero field");
  return lp_norm(apply_p_centered(f, V), 2.0) / nf;
}

double stationarity_residual(const Potential& V, const PhaseGrid& grid) {
  for (int j = 0; j < grid.dim(); ++j) {
    if (grid.v_axis(j).spacing() > kMaxStationaritySpacing)
      throw GridError("stationarity_residual: velocity spacing above 0.1 does not resolve the Maxwellian");
  }
  return operator_residual(maxwellian_field(grid, V), V);
}

}  // namespace kfp::analysis

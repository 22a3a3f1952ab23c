#include <cmath>
#include <vector>

#include "kfp/phase_space.hpp"

namespace kfp {

template <class Grid>
double lp_norm(const BasicField<Grid>& f, double p) {
  if (std::isnan(p) || p < 1.0) throw DomainError("L^p exponent must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  // scale by the max to keep |f|^p representable
  double m = 0.0;
  for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  if (p == 2.0) {
    for (const cplx& v : f.values()) acc += std::norm(v / m);
  } else if (p == 1.0) {
    for (const cplx& v : f.values()) acc += std::abs(v) / m;
  } else {
    for (const cplx& v : f.values()) acc += std::pow(std::abs(v) / m, p);
  }
  return m * std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

template double lp_norm(const BasicField<PhaseGrid>&, double);
template double lp_norm(const BasicField<VelocityGrid>&, double);

double weighted_l2s_norm(const Field& f, double s) {
  const PhaseGrid& g = f.grid();
  const std::size_t vc = g.v_cells();
  std::vector<std::size_t> idx(g.rank());
  std::vector<double> x(static_cast<std::size_t>(g.dim()));
  double acc = 0.0;
  for (std::size_t base = 0; base < g.cell_count(); base += vc) {
    g.unravel(base, idx);
    for (int j = 0; j < g.dim(); ++j) x[j] = g.x_axis(j).coord(idx[j]);
    const double w = s == 0.0 ? 1.0 : std::pow(japanese_bracket(x), 2.0 * s);
    double row = 0.0;
    for (std::size_t k = 0; k < vc; ++k) row += std::norm(f[base + k]);
    acc += w * row;
  }
  return std::sqrt(acc * g.cell_volume());
}

template <class Grid>
cplx pairing(const BasicField<Grid>& f, const BasicField<Grid>& g) {
  if (!(f.grid() == g.grid())) throw GridError("pairing: grids differ");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += std::conj(f[i]) * g[i];
  return acc * f.grid().cell_volume();
}

template cplx pairing(const BasicField<PhaseGrid>&, const BasicField<PhaseGrid>&);
template cplx pairing(const BasicField<VelocityGrid>&, const BasicField<VelocityGrid>&);

Field reflect_v(const Field& f) {
  const PhaseGrid& g = f.grid();
  for (int j = 0; j < g.dim(); ++j) {
    const Axis& ax = g.v_axis(j);
    for (std::size_t i = 1; i < ax.points; ++i) {
      if (ax.coord(ax.mirror(i)) != -ax.coord(i)) throw GridError("reflect_v: velocity axis is not symmetric about 0");
    }
  }
  Field out(g, f.is_real());
  out.set_representation(f.representation());
  std::vector<std::size_t> idx(g.rank());
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    g.unravel(c, idx);
    std::size_t target = 0;
    for (std::size_t a = 0; a < g.rank(); ++a) {
      const std::size_t ia = a >= static_cast<std::size_t>(g.dim()) ? g.axis(a).mirror(idx[a]) : idx[a];
      target += ia * g.stride(a);
    }
    out[target] = f[c];
  }
  return out;
}

Field maxwellian_field(const PhaseGrid& grid, const Potential& V) {
  const auto n = static_cast<std::size_t>(grid.dim());
  return Field::sample(grid, [&](std::span<const double> c) {
    return maxwellian_sqrt(c.subspan(0, n), c.subspan(n, n), V);
  });
}

}  // namespace kfp

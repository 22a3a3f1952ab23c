#include "kfp/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kfp/errors.hpp"
#include "kfp/phase_space.hpp"

namespace kfp::spectral {
namespace {

void check_degree(int j, const Caps& caps) {
  if (j < 0) throw DomainError("Hermite degree must be non-negative");
  if (j > caps.max_degree) {
    throw CapabilityError("Hermite degree " + std::to_string(j) + " exceeds cap " + std::to_string(caps.max_degree));
  }
}

void check_shift(std::span<const double> xi, const Caps& caps) {
  double r2 = 0.0;
  for (double x : xi) r2 += x * x;
  if (std::sqrt(r2) > caps.xi_max) {
    throw CapabilityError("shift |xi| = " + std::to_string(std::sqrt(r2)) + " exceeds cap " +
                          std::to_string(caps.xi_max) + " (values grow like e^{|xi|^2})");
  }
}

std::vector<double> second_derivative_stencil(int order) {
  switch (order) {
    case 2: return {1.0, -2.0, 1.0};
    case 4: return {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
    case 6: return {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
    case 8:
      return {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};
    default: throw CapabilityError("finite-difference order must be 2, 4, 6 or 8");
  }
}

}  // namespace

std::vector<cplx> hermite_functions(int jmax, cplx s, const Caps& caps) {
  check_degree(jmax, caps);
  std::vector<cplx> phi(static_cast<std::size_t>(jmax) + 1);
  phi[0] = std::pow(2.0 * std::numbers::pi, -0.25) * std::exp(-0.25 * s * s);
  if (jmax >= 1) phi[1] = s * phi[0];
  for (int j = 1; j < jmax; ++j) {
    phi[j + 1] = (s * phi[j] - std::sqrt(double(j)) * phi[j - 1]) / std::sqrt(double(j + 1));
  }
  return phi;
}

double hermite_polynomial(int j, double s, const Caps& caps) {
  check_degree(j, caps);
  if (j == 0) return 1.0;
  double prev = 1.0, cur = s;
  for (int k = 1; k < j; ++k) {
    const double next = s * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_function(int j, double s, const Caps& caps) { return hermite_functions(j, s, caps)[j].real(); }

cplx hermite_function(int j, cplx s, const Caps& caps) { return hermite_functions(j, s, caps)[j]; }

int HermiteIndex::degree() const {
  int d = 0;
  for (int a : alpha) d += a;
  return d;
}

std::vector<HermiteIndex> multi_indices(int n, int max_degree) {
  if (n < 1) throw DomainError("dimension must be >= 1");
  std::vector<HermiteIndex> out;
  for (int deg = 0; deg <= max_degree; ++deg) {
    // compositions of deg into n non-negative parts, lexicographically descending
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    const auto emit = [&](auto&& self, int pos, int remaining) -> void {
      if (pos == n - 1) {
        a[pos] = remaining;
        out.push_back({a});
        return;
      }
      for (int k = remaining; k >= 0; --k) {
        a[pos] = k;
        self(self, pos + 1, remaining - k);
      }
    };
    emit(emit, 0, deg);
  }
  return out;
}

double ShiftedEigenfunction::eigenvalue() const {
  double x2 = 0.0;
  for (double x : xi) x2 += x * x;
  return alpha.degree() + x2;
}

ShiftedEigenfunction shifted_eigenfunction(const HermiteIndex& alpha, std::span<const double> xi,
                                           const VelocityGrid& grid, const Caps& caps) {
  const auto n = static_cast<std::size_t>(grid.dim());
  if (alpha.alpha.size() != n || xi.size() != n) throw DomainError("multi-index and shift must match the grid dimension");
  check_shift(xi, caps);
  for (int a : alpha.alpha) check_degree(a, caps);

  // per-axis tables, then tensor product
  std::vector<std::vector<cplx>> tables(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Axis& ax = grid.axis(j);
    tables[j].resize(ax.points);
    for (std::size_t i = 0; i < ax.points; ++i) {
      tables[j][i] = hermite_function(alpha.alpha[j], cplx(ax.coord(i), 2.0 * xi[j]), caps);
    }
  }
  VelocityField values(grid, true);
  bool real = true;
  for (double x : xi) real = real && x == 0.0;
  values.set_real(real);
  std::vector<std::size_t> idx(n);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    grid.unravel(c, idx);
    cplx v = 1.0;
    for (std::size_t j = 0; j < n; ++j) v *= tables[j][idx[j]];
    values[c] = v;
  }
  return {alpha, std::vector<double>(xi.begin(), xi.end()), std::move(values)};
}

VelocityField apply_p0_hat(std::span<const double> xi, const VelocityField& f, int fd_order) {
  const VelocityGrid& g = f.grid();
  const auto n = static_cast<std::size_t>(g.dim());
  if (xi.size() != n) throw DomainError("shift dimension does not match the grid");
  for (std::size_t j = 0; j < n; ++j) {
    if (g.axis(j).spacing() > kMaxSpectralSpacing) {
      throw GridError("apply_p0_hat: grid spacing " + std::to_string(g.axis(j).spacing()) +
                      " exceeds 0.5; the finite-difference Laplacian would be meaningless");
    }
  }
  const std::vector<double> stencil = second_derivative_stencil(fd_order);
  const int half = static_cast<int>(stencil.size() / 2);

  VelocityField out(g, false);
  double xi2 = 0.0;
  for (double x : xi) xi2 += x * x;
  std::vector<std::size_t> idx(n);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    g.unravel(c, idx);
    cplx potential = -0.5 * double(n) + xi2;
    cplx lap = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Axis& ax = g.axis(j);
      const cplx z(ax.coord(idx[j]), 2.0 * xi[j]);
      potential += 0.25 * z * z;
      const double inv_h2 = 1.0 / (ax.spacing() * ax.spacing());
      cplx acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        const long long i = static_cast<long long>(idx[j]) + k;
        if (i < 0 || i >= static_cast<long long>(ax.points)) continue;
        acc += stencil[static_cast<std::size_t>(k + half)] * f[c + static_cast<std::size_t>(k) * g.stride(j)];
      }
      lap += acc * inv_h2;
    }
    out[c] = -lap + potential * f[c];
  }
  return out;
}

double eigen_residual(const ShiftedEigenfunction& psi, int fd_order) {
  VelocityField r = apply_p0_hat(psi.xi, psi.values, fd_order);
  const double lambda = psi.eigenvalue();
  for (std::size_t c = 0; c < r.size(); ++c) r[c] -= lambda * psi.values[c];
  return lp_norm(r, 2.0) / lp_norm(psi.values, 2.0);
}

BiorthogonalityMatrix biorthogonality_matrix(std::span<const double> xi, int max_degree, const VelocityGrid& grid,
                                             ShiftPairing pairing, const Caps& caps) {
  const auto n = static_cast<std::size_t>(grid.dim());
  if (xi.size() != n) throw DomainError("shift dimension does not match the grid");
  if (max_degree < 0) throw DomainError("max_degree must be >= 0");
  check_shift(xi, caps);
  check_degree(max_degree, caps);

  const auto D = static_cast<std::size_t>(max_degree) + 1;
  const double sign = pairing == ShiftPairing::opposite ? -1.0 : 1.0;
  // tables[j][a * D + b] = sum_i conj(phi_a(v_i + 2 i xi_j)) phi_b(v_i + sign 2 i xi_j) h
  std::vector<std::vector<cplx>> tables(n, std::vector<cplx>(D * D, 0.0));
  double tail = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Axis& ax = grid.axis(j);
    const double h = ax.spacing();
    for (std::size_t i = 0; i < ax.points; ++i) {
      const double v = ax.coord(i);
      const auto left = hermite_functions(max_degree, cplx(v, 2.0 * xi[j]), caps);
      const auto right = hermite_functions(max_degree, cplx(v, sign * 2.0 * xi[j]), caps);
      for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b) tables[j][a * D + b] += std::conj(left[a]) * right[b] * h;
      if (i == 0) {
        // Gaussian tail beyond |v| = L: int_L^inf e^{-v^2/2} ~ e^{-L^2/2} / L, both ends
        double edge = 0.0;
        for (std::size_t a = 0; a < D; ++a)
          for (std::size_t b = 0; b < D; ++b) edge = std::max(edge, std::abs(left[a] * right[b]));
        tail = std::max(tail, 2.0 * edge / ax.half_width);
      }
    }
  }
  if (tail > kBiorthogonalityTailLimit) {
    throw GridError("biorthogonality_matrix: grid truncates the integrand; estimated tail mass " +
                    std::to_string(tail) + " exceeds 1e-14 (widen the velocity box)");
  }

  BiorthogonalityMatrix m;
  m.indices = multi_indices(static_cast<int>(n), max_degree);
  m.tail_estimate = tail;
  const std::size_t M = m.indices.size();
  m.entries.assign(M * M, 0.0);
  for (std::size_t r = 0; r < M; ++r) {
    for (std::size_t c = 0; c < M; ++c) {
      cplx v = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        v *= tables[j][static_cast<std::size_t>(m.indices[r].alpha[j]) * D + static_cast<std::size_t>(m.indices[c].alpha[j])];
      }
      m.entries[r * M + c] = v;
      const double dev = std::abs(v - (r == c ? 1.0 : 0.0));
      if (dev > m.max_deviation) {
        m.max_deviation = dev;
        m.worst_row = r;
        m.worst_col = c;
      }
    }
  }
  return m;
}

VelocityGrid default_spectral_grid(int n) { return VelocityGrid(n, Axis{12.0, 480}); }

}  // namespace kfp::spectral

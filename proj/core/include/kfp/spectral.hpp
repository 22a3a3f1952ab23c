#pragma once

#include <span>
#include <vector>

#include "kfp/grid.hpp"

namespace kfp::spectral {

/// Degree and shift caps. Shifted Hermite functions grow like e^{|xi|^2}, so
/// the shift cap is a numerical choice rather than a mathematical limit.
struct Caps {
  int max_degree = 30;
  double xi_max = 2.0;
};

/// Probabilists' Hermite polynomial F_j(s) = (-1)^j e^{s^2/2} d^j/ds^j e^{-s^2/2},
/// via F_{j+1} = s F_j - j F_{j-1}.
double hermite_polynomial(int j, double s, const Caps& caps = {});

/// Normalised Hermite function phi_j(s) = (j! sqrt(2 pi))^{-1/2} e^{-s^2/4} F_j(s).
/// Eigenfunction of -d^2/ds^2 + s^2/4 - 1/2 with eigenvalue j.
double hermite_function(int j, double s, const Caps& caps = {});
cplx hermite_function(int j, cplx s, const Caps& caps = {});

/// phi_0..phi_jmax at one point, from the normalised recurrence
///   phi_{j+1} = (s phi_j - sqrt(j) phi_{j-1}) / sqrt(j+1).
std::vector<cplx> hermite_functions(int jmax, cplx s, const Caps& caps = {});

struct HermiteIndex {
  std::vector<int> alpha;
  int degree() const;
  bool operator==(const HermiteIndex&) const = default;
};

/// All multi-indices in dimension n with |alpha| <= max_degree, graded order.
std::vector<HermiteIndex> multi_indices(int n, int max_degree);

/// psi_alpha^xi(v) = prod_j phi_{alpha_j}(v_j + 2 i xi_j) sampled on a velocity grid.
struct ShiftedEigenfunction {
  HermiteIndex alpha;
  std::vector<double> xi;
  VelocityField values;

  /// |alpha| + |xi|^2
  double eigenvalue() const;
};

ShiftedEigenfunction shifted_eigenfunction(const HermiteIndex& alpha, std::span<const double> xi,
                                           const VelocityGrid& grid, const Caps& caps = {});

inline constexpr double kMaxSpectralSpacing = 0.5;

/// Complex harmonic operator
///   P0^(xi) = -Delta_v + 1/4 sum_j (v_j + 2 i xi_j)^2 - n/2 + |xi|^2,
/// Laplacian by centred differences of the given even order (2, 4, 6 or 8),
/// zero outside the grid. Refuses grids with spacing above kMaxSpectralSpacing.
VelocityField apply_p0_hat(std::span<const double> xi, const VelocityField& f, int fd_order = 8);

/// ||P0^(xi) psi - (|alpha| + |xi|^2) psi||_2 / ||psi||_2
double eigen_residual(const ShiftedEigenfunction& psi, int fd_order = 8);

enum class ShiftPairing { opposite, same };

struct BiorthogonalityMatrix {
  std::vector<HermiteIndex> indices;
  /// row-major, entry (a, b) = < psi_a^xi, psi_b^{-xi} > (or psi_b^{xi} for ShiftPairing::same)
  std::vector<cplx> entries;
  double max_deviation = 0.0;  // max |entry - delta_ab|
  std::size_t worst_row = 0;
  std::size_t worst_col = 0;
  double tail_estimate = 0.0;  // estimated integrand mass beyond the grid

  cplx at(std::size_t a, std::size_t b) const { return entries[a * indices.size() + b]; }
};

inline constexpr double kBiorthogonalityTailLimit = 1e-14;

/// Pairings <psi_alpha^xi, psi_beta^{-xi}> over all |alpha|, |beta| <= max_degree by
/// trapezoid quadrature, one 1-D table per coordinate. Throws GridError (with the
/// estimated tail mass) when the grid truncates more than kBiorthogonalityTailLimit.
BiorthogonalityMatrix biorthogonality_matrix(std::span<const double> xi, int max_degree,
                                             const VelocityGrid& grid,
                                             ShiftPairing pairing = ShiftPairing::opposite,
                                             const Caps& caps = {});

/// Default quadrature grid: half-width 12, spacing 0.05.
VelocityGrid default_spectral_grid(int n);

}  // namespace kfp::spectral

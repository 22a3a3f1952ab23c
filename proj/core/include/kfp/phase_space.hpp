#pragma once

#include <complex>
#include <iosfwd>
#include <limits>
#include <string>

#include "kfp/errors.hpp"
#include "kfp/grid.hpp"
#include "kfp/potential.hpp"

namespace kfp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Discrete L^p norm (sum |f|^p cellvol)^{1/p}; p = infinity gives the grid max,
/// which is a lower bound of the continuum sup-norm.
template <class Grid>
double lp_norm(const BasicField<Grid>& f, double p);

/// L^2 norm with weight <x>^{2s} in the position variables.
double weighted_l2s_norm(const Field& f, double s);

/// sum conj(f) g cellvol
template <class Grid>
cplx pairing(const BasicField<Grid>& f, const BasicField<Grid>& g);

/// J f(x, v) = f(x, -v)
Field reflect_v(const Field& f);

/// Partial Fourier transform in x with the continuum convention
///   f^(xi, v) = int e^{-i x.xi} f(x, v) dx,
/// on the frequency grid xi_k = pi k / L (FFT order along each x axis).
/// Boundary mass above 1e-12 is reported through the diagnostics sink.
Field partial_fourier_x(const Field& f, Diagnostics* diag = nullptr);
Field inverse_partial_fourier_x(const Field& fhat);

/// Free or potential-dressed Maxwellian square root sampled on the grid.
Field maxwellian_field(const PhaseGrid& grid, const Potential& V);

// --- Field files -----------------------------------------------------------
//
// Binary layout (all little-endian):
//   uint64 n
//   2n x { uint64 points, float64 half_width }   axes in (x_1..x_n, v_1..v_n) order
//   cell_count x { float64 re, float64 im }       row-major, last axis fastest
void write_field_binary(const Field& f, std::ostream& out);
Field read_field_binary(std::istream& in);
void write_field_binary(const Field& f, const std::string& path);
Field read_field_binary(const std::string& path);

/// CSV for n = 1 only: header "x,v,re,im", one row per node.
void write_field_csv(const Field& f, std::ostream& out);

}  // namespace kfp

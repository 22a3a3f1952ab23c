#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kfp {

using cplx = std::complex<double>;

/// Uniform, node-centred axis: points x_i = (i - N/2) h, i = 0..N-1, h = 2 L / N.
/// Covers [-L, L - h]; x = 0 is a node and i <-> (N - i) mod N is the reflection.
struct Axis {
  double half_width = 0.0;
  std::size_t points = 0;

  double spacing() const { return 2.0 * half_width / static_cast<double>(points); }
  double coord(std::size_t i) const {
    return (static_cast<double>(i) - 0.5 * static_cast<double>(points)) * spacing();
  }
  /// Angular frequency of FFT index k (standard order), xi_k = pi k' / L.
  double frequency(std::size_t k) const;
  std::size_t mirror(std::size_t i) const { return (points - i) % points; }

  bool operator==(const Axis&) const = default;
};

inline constexpr std::size_t kMaxCells = std::size_t{1} << 28;
inline constexpr std::size_t kMinPointsPerAxis = 16;

/// Dense row-major tensor of axes (last axis fastest).
class TensorShape {
 public:
  TensorShape() = default;
  explicit TensorShape(std::vector<Axis> axes);

  std::size_t rank() const { return axes_.size(); }
  const Axis& axis(std::size_t a) const { return axes_[a]; }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t extent(std::size_t a) const { return axes_[a].points; }
  std::size_t stride(std::size_t a) const { return strides_[a]; }
  std::size_t cell_count() const { return cells_; }
  double cell_volume() const { return cell_volume_; }
  double volume() const;

  /// Decompose a flat index into per-axis indices (out.size() == rank()).
  void unravel(std::size_t flat, std::span<std::size_t> out) const;

  /// Calls fn(base) for the first element of every line running along `axis`.
  void for_each_line(std::size_t axis, const std::function<void(std::size_t)>& fn) const;

  bool operator==(const TensorShape& o) const { return axes_ == o.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t cells_ = 0;
  double cell_volume_ = 0.0;
};

/// Grid on the truncated phase space R^n_x x R^n_v; axes ordered (x_1..x_n, v_1..v_n).
class PhaseGrid : public TensorShape {
 public:
  PhaseGrid() = default;
  PhaseGrid(int n, Axis x_axis, Axis v_axis);
  PhaseGrid(int n, std::vector<Axis> axes);

  int dim() const { return n_; }
  const Axis& x_axis(int j) const { return axis(static_cast<std::size_t>(j)); }
  const Axis& v_axis(int j) const { return axis(static_cast<std::size_t>(n_ + j)); }
  std::size_t x_cells() const;
  std::size_t v_cells() const;

  bool operator==(const PhaseGrid& o) const { return n_ == o.n_ && TensorShape::operator==(o); }

 private:
  int n_ = 0;
};

/// Grid on R^n_v alone (velocity-only fields for the oscillator and spectral checks).
class VelocityGrid : public TensorShape {
 public:
  VelocityGrid() = default;
  VelocityGrid(int n, Axis v_axis);
  VelocityGrid(int n, std::vector<Axis> axes);

  int dim() const { return n_; }
  bool operator==(const VelocityGrid& o) const { return n_ == o.n_ && TensorShape::operator==(o); }

 private:
  int n_ = 0;
};

/// Velocity part of a phase grid.
VelocityGrid velocity_part(const PhaseGrid& g);

enum class Representation { physical, x_frequency };

/// Complex samples over a grid. Real-valued fields carry a tag that operations
/// preserve where the continuum operation maps real data to real data.
template <class Grid>
class BasicField {
 public:
  BasicField() = default;
  explicit BasicField(Grid grid, bool real_valued = true)
      : grid_(std::move(grid)), values_(grid_.cell_count()), real_(real_valued) {}
  BasicField(Grid grid, std::vector<cplx> values, bool real_valued);

  /// Samples fn(coords) at every node; coords has one entry per axis.
  template <class Fn>
  static BasicField sample(const Grid& grid, Fn&& fn);

  const Grid& grid() const { return grid_; }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  bool is_real() const { return real_; }
  void set_real(bool r) { real_ = r; }
  Representation representation() const { return repr_; }
  void set_representation(Representation r) { repr_ = r; }

  /// Drops imaginary parts when the tag says the field is real.
  void enforce_real_tag();
  double min_real() const;

  BasicField& operator+=(const BasicField& o);
  BasicField& operator-=(const BasicField& o);
  BasicField& operator*=(cplx s);

 private:
  Grid grid_;
  std::vector<cplx> values_;
  bool real_ = true;
  Representation repr_ = Representation::physical;
};

using Field = BasicField<PhaseGrid>;
using VelocityField = BasicField<VelocityGrid>;

template <class Grid>
BasicField<Grid> operator+(BasicField<Grid> a, const BasicField<Grid>& b) { return a += b; }
template <class Grid>
BasicField<Grid> operator-(BasicField<Grid> a, const BasicField<Grid>& b) { return a -= b; }
template <class Grid>
BasicField<Grid> operator*(cplx s, BasicField<Grid> a) { return a *= s; }

template <class Grid>
template <class Fn>
BasicField<Grid> BasicField<Grid>::sample(const Grid& grid, Fn&& fn) {
  BasicField f(grid, true);
  std::vector<std::size_t> idx(grid.rank());
  std::vector<double> coords(grid.rank());
  bool real = true;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    grid.unravel(c, idx);
    for (std::size_t a = 0; a < grid.rank(); ++a) coords[a] = grid.axis(a).coord(idx[a]);
    const cplx v = cplx(fn(std::span<const double>(coords)));
    if (v.imag() != 0.0) real = false;
    f.values_[c] = v;
  }
  f.real_ = real;
  return f;
}

}  // namespace kfp

#include "kfp/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kfp/errors.hpp"

namespace kfp {

double Axis::frequency(std::size_t k) const {
  const auto n = static_cast<long long>(points);
  auto kk = static_cast<long long>(k);
  if (kk >= n / 2) kk -= n;
  return std::numbers::pi * static_cast<double>(kk) / half_width;
}

TensorShape::TensorShape(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw GridError("grid needs at least one axis");
  cells_ = 1;
  cell_volume_ = 1.0;
  for (const Axis& ax : axes_) {
    if (!(ax.half_width > 0.0) || !std::isfinite(ax.half_width)) {
      throw GridError("axis half-width must be positive and finite");
    }
    if (ax.points < kMinPointsPerAxis || ax.points % 2 != 0) {
      throw GridError("axis point count must be even and >= 16, got " + std::to_string(ax.points));
    }
    if (cells_ > kMaxCells / ax.points) {
      throw GridError("grid exceeds the dense-field memory guard of 2^28 cells");
    }
    cells_ *= ax.points;
    cell_volume_ *= ax.spacing();
  }
  strides_.assign(axes_.size(), 1);
  for (std::size_t a = axes_.size() - 1; a > 0; --a) strides_[a - 1] = strides_[a] * axes_[a].points;
}

double TensorShape::volume() const { return cell_volume_ * static_cast<double>(cells_); }

void TensorShape::unravel(std::size_t flat, std::span<std::size_t> out) const {
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    out[a] = flat / strides_[a];
    flat -= out[a] * strides_[a];
  }
}

void TensorShape::for_each_line(std::size_t axis, const std::function<void(std::size_t)>& fn) const {
  const std::size_t inner = strides_[axis];
  const std::size_t outer_stride = inner * axes_[axis].points;
  for (std::size_t outer = 0; outer < cells_; outer += outer_stride) {
    for (std::size_t i = 0; i < inner; ++i) fn(outer + i);
  }
}

namespace {

std::vector<Axis> repeat_axes(int n, const Axis& a, const Axis& b, bool phase) {
  if (n < 1 || n > 3) throw CapabilityError("dimension must be 1, 2 or 3");
  std::vector<Axis> axes(static_cast<std::size_t>(n), a);
  if (phase) axes.insert(axes.end(), static_cast<std::size_t>(n), b);
  return axes;
}

}  // namespace

PhaseGrid::PhaseGrid(int n, Axis x_axis, Axis v_axis)
    : TensorShape(repeat_axes(n, x_axis, v_axis, true)), n_(n) {}

PhaseGrid::PhaseGrid(int n, std::vector<Axis> axes) : TensorShape(std::move(axes)), n_(n) {
  if (n < 1 || n > 3) throw CapabilityError("dimension must be 1, 2 or 3");
  if (rank() != static_cast<std::size_t>(2 * n)) throw GridError("phase grid needs 2n axes");
}

std::size_t PhaseGrid::x_cells() const {
  std::size_t c = 1;
  for (int j = 0; j < n_; ++j) c *= x_axis(j).points;
  return c;
}

std::size_t PhaseGrid::v_cells() const { return cell_count() / x_cells(); }

VelocityGrid::VelocityGrid(int n, Axis v_axis) : TensorShape(repeat_axes(n, v_axis, v_axis, false)), n_(n) {}

VelocityGrid::VelocityGrid(int n, std::vector<Axis> axes) : TensorShape(std::move(axes)), n_(n) {
  if (n < 1 || n > 3) throw CapabilityError("dimension must be 1, 2 or 3");
  if (rank() != static_cast<std::size_t>(n)) throw GridError("velocity grid needs n axes");
}

VelocityGrid velocity_part(const PhaseGrid& g) {
  std::vector<Axis> axes;
  for (int j = 0; j < g.dim(); ++j) axes.push_back(g.v_axis(j));
  return VelocityGrid(g.dim(), std::move(axes));
}

template <class Grid>
BasicField<Grid>::BasicField(Grid grid, std::vector<cplx> values, bool real_valued)
    : grid_(std::move(grid)), values_(std::move(values)), real_(real_valued) {
  if (values_.size() != grid_.cell_count()) throw GridError("value count does not match grid");
  for (const cplx& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("field contains non-finite values");
  }
}

template <class Grid>
void BasicField<Grid>::enforce_real_tag() {
  if (!real_) return;
  for (cplx& v : values_) v = cplx(v.real(), 0.0);
}

template <class Grid>
double BasicField<Grid>::min_real() const {
  double m = values_.empty() ? 0.0 : values_[0].real();
  for (const cplx& v : values_) m = std::min(m, v.real());
  return m;
}

template <class Grid>
BasicField<Grid>& BasicField<Grid>::operator+=(const BasicField& o) {
  if (!(grid_ == o.grid_)) throw GridError("field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  real_ = real_ && o.real_;
  return *this;
}

template <class Grid>
BasicField<Grid>& BasicField<Grid>::operator-=(const BasicField& o) {
  if (!(grid_ == o.grid_)) throw GridError("field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  real_ = real_ && o.real_;
  return *this;
}

template <class Grid>
BasicField<Grid>& BasicField<Grid>::operator*=(cplx s) {
  for (cplx& v : values_) v *= s;
  real_ = real_ && s.imag() == 0.0;
  return *this;
}

template class BasicField<PhaseGrid>;
template class BasicField<VelocityGrid>;

}  // namespace kfp

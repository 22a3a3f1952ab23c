#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

#include "fourier_plan.hpp"
#include "kfp/phase_space.hpp"

namespace kfp {
namespace detail {

namespace {
// The FFTW planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

XFourierPlan::XFourierPlan(const PhaseGrid& grid, std::span<cplx> buffer) : grid_(grid) {
  std::vector<int> dims;
  for (int j = 0; j < grid.dim(); ++j) dims.push_back(static_cast<int>(grid.x_axis(j).points));
  const int howmany = static_cast<int>(grid.v_cells());
  auto* data = reinterpret_cast<fftw_complex*>(buffer.data());
  std::lock_guard lock(planner_mutex());
  forward_ = fftw_plan_many_dft(grid.dim(), dims.data(), howmany, data, nullptr, howmany, 1, data, nullptr,
                                howmany, 1, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  backward_ = fftw_plan_many_dft(grid.dim(), dims.data(), howmany, data, nullptr, howmany, 1, data, nullptr,
                                 howmany, 1, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (forward_ == nullptr || backward_ == nullptr) throw GridError("FFTW failed to build a plan");

  // per-axis phase/scale factors h (-1)^k' that map the DFT onto the continuum convention
  for (int j = 0; j < grid.dim(); ++j) {
    const Axis& ax = grid.x_axis(j);
    std::vector<double> s(ax.points);
    for (std::size_t k = 0; k < ax.points; ++k) {
      long long kk = static_cast<long long>(k);
      if (kk >= static_cast<long long>(ax.points / 2)) kk -= static_cast<long long>(ax.points);
      s[k] = (kk % 2 == 0 ? 1.0 : -1.0) * ax.spacing();
    }
    axis_scale_.push_back(std::move(s));
  }
}

XFourierPlan::~XFourierPlan() {
  std::lock_guard lock(planner_mutex());
  if (forward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (backward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

double XFourierPlan::x_scale(std::span<const std::size_t> idx) const {
  double s = 1.0;
  for (int j = 0; j < grid_.dim(); ++j) s *= axis_scale_[j][idx[j]];
  return s;
}

void XFourierPlan::forward(std::span<cplx> data) const {
  fftw_execute_dft(static_cast<fftw_plan>(forward_), reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
  apply_scale(data, false);
}

void XFourierPlan::backward(std::span<cplx> data) const {
  apply_scale(data, true);
  fftw_execute_dft(static_cast<fftw_plan>(backward_), reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
  const double inv = 1.0 / static_cast<double>(grid_.x_cells());
  for (cplx& v : data) v *= inv;
}

void XFourierPlan::apply_scale(std::span<cplx> data, bool inverse) const {
  const std::size_t vc = grid_.v_cells();
  std::vector<std::size_t> idx(grid_.rank());
  for (std::size_t base = 0; base < grid_.cell_count(); base += vc) {
    grid_.unravel(base, idx);
    double s = x_scale(idx);
    if (inverse) s = 1.0 / s;
    for (std::size_t k = 0; k < vc; ++k) data[base + k] *= s;
  }
}

}  // namespace detail

namespace {

double boundary_max(const Field& f) {
  const PhaseGrid& g = f.grid();
  std::vector<std::size_t> idx(g.rank());
  double m = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    g.unravel(c, idx);
    bool edge = false;
    for (int j = 0; j < g.dim(); ++j) edge = edge || idx[j] == 0 || idx[j] + 1 == g.x_axis(j).points;
    if (edge) m = std::max(m, std::abs(f[c]));
  }
  return m;
}

}  // namespace

Field partial_fourier_x(const Field& f, Diagnostics* diag) {
  if (f.representation() != Representation::physical) throw InputError("partial_fourier_x: field already in frequency form");
  if (diag != nullptr) {
    const double edge = boundary_max(f);
    const double peak = lp_norm(f, kInfinity);
    diag->boundary_max = std::max(diag->boundary_max, edge);
    if (peak > 0.0 && edge > 1e-12 * peak) {
      diag->warn("partial_fourier_x: field does not decay at the x-boundary (relative edge value " +
                 std::to_string(edge / peak) + "); periodic extension applies");
    }
  }
  Field out = f;
  detail::XFourierPlan plan(f.grid(), out.values());
  plan.forward(out.values());
  out.set_real(false);
  out.set_representation(Representation::x_frequency);
  return out;
}

Field inverse_partial_fourier_x(const Field& fhat) {
  if (fhat.representation() != Representation::x_frequency) throw InputError("inverse_partial_fourier_x: field not in frequency form");
  Field out = fhat;
  detail::XFourierPlan plan(fhat.grid(), out.values());
  plan.backward(out.values());
  out.set_real(false);
  out.set_representation(Representation::physical);
  return out;
}

}  // namespace kfp

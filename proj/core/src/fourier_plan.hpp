#pragma once

#include <span>
#include <vector>

#include "kfp/grid.hpp"

namespace kfp::detail {

/// FFTW plans for the transform over all x axes of a phase-space field,
/// including the h (-1)^k scaling that matches int e^{-i x.xi} f dx.
class XFourierPlan {
 public:
  XFourierPlan(const PhaseGrid& grid, std::span<cplx> buffer);
  ~XFourierPlan();
  XFourierPlan(const XFourierPlan&) = delete;
  XFourierPlan& operator=(const XFourierPlan&) = delete;

  void forward(std::span<cplx> data) const;
  void backward(std::span<cplx> data) const;

 private:
  double x_scale(std::span<const std::size_t> idx) const;
  void apply_scale(std::span<cplx> data, bool inverse) const;

  PhaseGrid grid_;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
  std::vector<std::vector<double>> axis_scale_;
};

}  // namespace kfp::detail

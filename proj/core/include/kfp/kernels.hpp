#pragma once

#include <complex>
#include <span>

namespace kfp::kernels {

/// Scalar time profiles of the free Kramers-Fokker-Planck kernel.
///
///   sigma(t) = t - 2 coth t + 2 cosech t      (x-diffusion scale)
///   theta(t) = 4 pi e^{-t} sinh t             (oscillator kernel scale)
///   gamma(t) = sigma(t) theta(t)
///   omega(t) = coth t - cosech t              (drift coupling)
///
/// Evaluated through coth t - cosech t = tanh(t/2), which removes the 1/t
/// cancellation near t = 0. Below kSmallTimeSeriesCutoff sigma uses its Taylor
/// series since t - 2 tanh(t/2) still cancels to O(t^3).
struct TimeProfile {
  double t = 0.0;
  double sigma = 0.0;
  double theta = 0.0;
  double gamma = 0.0;
  double omega = 0.0;
};

inline constexpr double kSmallTimeSeriesCutoff = 0.1;

TimeProfile time_profiles(double t);

/// Mehler kernel of H = -Delta_v + |v|^2/4 - n/2 (the 1-D factor is applied per coordinate).
/// vp.size() must equal v.size(); n is taken from the span length.
double harmonic_kernel(std::span<const double> v, std::span<const double> vp, double t);

/// log of harmonic_kernel; finite even where the kernel underflows.
double log_harmonic_kernel(std::span<const double> v, std::span<const double> vp, double t);

/// Heat kernel of -Delta + |x|^2. Kept as an independent cross-check of harmonic_kernel.
double ho_heat_kernel_reference(std::span<const double> x, std::span<const double> y, double t);

/// Arguments of the free kernel F(x, v, x', v'; t). All spans share the same length n.
struct KernelPoint {
  std::span<const double> x;
  std::span<const double> xp;
  std::span<const double> v;
  std::span<const double> vp;
  double t = 0.0;
};

/// Fundamental solution of the free KFP equation,
///   F = (4 pi sigma)^{-n/2} exp(-|x - x' - omega (v + v')|^2 / (4 sigma)) K(v, v'; t).
double free_kernel(const KernelPoint& p);
double log_free_kernel(const KernelPoint& p);

/// Global supremum of free_kernel over all arguments: (4 pi gamma(t))^{-n/2}.
double free_kernel_supremum(double t, int n);

/// Partial Fourier transform (in x) of the Gaussian factor of F:
///   g^(v, v', xi; t) = exp(-i omega(t) (v + v') . xi - |xi|^2 sigma(t)).
std::complex<double> fourier_factor(std::span<const double> v, std::span<const double> vp,
                                    std::span<const double> xi, double t);

// One-dimensional building blocks shared by the propagators.
double harmonic_kernel_1d(double v, double vp, const TimeProfile& tp);
double log_harmonic_kernel_1d(double v, double vp, const TimeProfile& tp);

}  // namespace kfp::kernels

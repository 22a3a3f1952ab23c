#include "kfp/potential.hpp"

#include <cmath>
#include <numbers>

#include "kfp/errors.hpp"

namespace kfp {

double japanese_bracket(std::span<const double> x) {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return std::sqrt(1.0 + r2);
}

Potential Potential::inverse_power(double c, double rho) {
  if (!std::isfinite(c) || !std::isfinite(rho)) throw DomainError("potential parameters must be finite");
  if (rho < -1.0) throw DomainError("decay exponent rho must be >= -1");
  Potential p;
  p.family_ = Family::inverse_power;
  p.c_ = c;
  p.rho_ = rho;
  return p;
}

Potential Potential::from_name(std::string_view family, double c, double rho) {
  if (family == "zero") return zero();
  if (family == "inverse_power") return inverse_power(c, rho);
  throw InputError("unknown potential family '" + std::string(family) + "'");
}

std::string Potential::family_name() const {
  return family_ == Family::zero ? "zero" : "inverse_power";
}

double Potential::value(std::span<const double> x) const {
  if (family_ == Family::zero) return 0.0;
  return c_ * std::pow(japanese_bracket(x), -rho_);
}

void Potential::gradient(std::span<const double> x, std::span<double> out) const {
  if (family_ == Family::zero) {
    for (double& g : out) g = 0.0;
    return;
  }
  // grad <x>^{-rho} = -rho <x>^{-rho-2} x
  const double scale = -c_ * rho_ * std::pow(japanese_bracket(x), -rho_ - 2.0);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = scale * x[j];
}

double Potential::decay_constant() const {
  return family_ == Family::zero ? 0.0 : std::abs(c_) * (1.0 + std::abs(rho_));
}

double maxwellian_sqrt(std::span<const double> x, std::span<const double> v, const Potential& V) {
  double v2 = 0.0;
  for (double vj : v) v2 += vj * vj;
  const double n = static_cast<double>(v.size());
  const double expo = -0.5 * (0.5 * v2 + V.value(x));
  const double m = std::pow(2.0 * std::numbers::pi, -0.25 * n) * std::exp(expo);
  if (!std::isfinite(m)) throw DomainError("maxwellian_sqrt: non-finite value");
  return m;
}

}  // namespace kfp

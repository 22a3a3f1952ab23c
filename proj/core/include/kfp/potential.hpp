#pragma once

#include <span>
#include <string>
#include <string_view>

namespace kfp {

/// External potential V(x) with analytic gradient.
///
/// Families: zero, and inverse_power V(x) = c <x>^{-rho} with <x> = (1 + |x|^2)^{1/2}.
/// For inverse_power the decay bound |V| + <x>|grad V| <= C <x>^{-rho} holds with
/// C = |c| (1 + rho).
class Potential {
 public:
  enum class Family { zero, inverse_power };

  Potential() = default;
  static Potential zero() { return Potential{}; }
  static Potential inverse_power(double c, double rho);
  /// Parses "zero" or "inverse_power".
  static Potential from_name(std::string_view family, double c, double rho);

  Family family() const { return family_; }
  std::string family_name() const;
  double amplitude() const { return c_; }
  double rho() const { return rho_; }

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

  /// Analytic bound C of the decay condition for this family.
  double decay_constant() const;
  bool is_zero() const { return family_ == Family::zero || c_ == 0.0; }

 private:
  Family family_ = Family::zero;
  double c_ = 0.0;
  double rho_ = 0.0;
};

/// <x> = (1 + |x|^2)^{1/2}
double japanese_bracket(std::span<const double> x);

/// Square root of the Maxwellian, m(x, v) = (2 pi)^{-n/4} exp(-(|v|^2/2 + V(x))/2).
double maxwellian_sqrt(std::span<const double> x, std::span<const double> v, const Potential& V);

}  // namespace kfp

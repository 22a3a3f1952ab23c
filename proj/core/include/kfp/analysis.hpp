#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kfp/errors.hpp"
#include "kfp/grid.hpp"
#include "kfp/potential.hpp"

namespace kfp::analysis {

enum class Regime { short_time, long_time };
Regime parse_regime(const std::string& s);
std::string to_string(Regime r);

enum class NormKind { operator_norm_exact, operator_norm_lower_bound, field_norm };
std::string to_string(NormKind k);

struct NormRecord {
  double t = 0.0;
  double p = 1.0;
  double q = 1.0;
  double value = 0.0;
  NormKind kind = NormKind::field_norm;
};

/// Exact ||e^{-tP0}||_{1->inf} = (4 pi gamma(t))^{-n/2}: the kernel is positive and its
/// supremum is attained.
double free_norm_1_to_inf(double t, int n);

/// Decay power alpha with ||e^{-tP}||_{p->q} ~ t^{-alpha}:
/// long_time n/2 (1/p - 1/q), short_time 2n (1/p - 1/q). q may be kInfinity.
double expected_exponent(double p, double q, int n, Regime regime);

struct DecayFit {
  Regime regime = Regime::long_time;
  double p = 1.0;
  double q = 1.0;
  /// Least-squares slope of log(value) against log(t); negative for decay.
  double fitted_exponent = 0.0;
  /// -expected_exponent(p, q, n, regime), directly comparable with the slope.
  double expected_exponent = 0.0;
  double r2 = 0.0;
  std::pair<double, double> time_window{0.0, 0.0};
  std::size_t samples = 0;
};

/// Needs at least 5 records with t in [t_min, t_max], all values > 0, and a common (p, q).
DecayFit fit_decay_exponent(const std::vector<NormRecord>& records, std::pair<double, double> window,
                            Regime regime, int n);

/// Log-spaced times, both ends included.
std::vector<double> log_spaced(double t_min, double t_max, std::size_t count);

using Propagate = std::function<Field(const Field&)>;

/// Gaussian bumps with varied centres and widths; single-cell spikes near the
/// origin are appended when with_spikes is set. Centres are jittered with seed.
std::vector<Field> default_test_family(const PhaseGrid& grid, bool with_spikes, std::uint64_t seed = 20240917);

/// max over the family of ||T f||_q / ||f||_p. Members with zero p-norm are skipped with a warning.
NormRecord norm_lower_bound(const Propagate& propagate, double t, double p, double q, const std::vector<Field>& family,
                            Diagnostics* diag = nullptr);

struct PotentialReport {
  /// sup over probes of <x>^rho (|V| + <x> |grad V|)
  double c_measured = 0.0;
  /// log-log slope of the profile over the outer quarter-to-full probe range
  double outer_slope = 0.0;
  bool pass = false;
  std::string message;
};

inline constexpr double kBoundedSlopeTolerance = 0.05;

/// Samples the decay condition along radial rays up to probe_radius; fails on
/// non-finite samples or when the weighted profile still grows at the outer range.
PotentialReport potential_condition_check(const Potential& V, double rho_claimed, double probe_radius, int n = 1);

struct BootstrapTrace {
  double rho = 0.0;
  std::vector<double> sequence;  // r_1, r_2, ...
  /// 1-based index of the first r_k > 1
  std::optional<std::size_t> terminated_at;
  bool diverged = false;
  /// rho / (3 - 2 rho) when rho < 3/2
  std::optional<double> fixed_point;
};

/// r_1 = 2 rho^2 / 3, r_k = rho (1 + 2 r_{k-1}) / 3, stopped at the first r_k > 1.
BootstrapTrace bootstrap_exponents(double rho, std::size_t max_iter = 10000);

/// P f with centred second-order differences: periodic in x, zero outside the velocity box.
///   P = -Delta_v + |v|^2/4 - n/2 + v.grad_x - grad V.grad_v
Field apply_p_centered(const Field& f, const Potential& V);

inline constexpr double kMaxStationaritySpacing = 0.1;

/// ||P f||_2 / ||f||_2 for an arbitrary field.
double operator_residual(const Field& f, const Potential& V);

/// operator_residual of the sampled Maxwellian square root; refuses velocity spacing above 0.1.
double stationarity_residual(const Potential& V, const PhaseGrid& grid);

}  // namespace kfp::analysis

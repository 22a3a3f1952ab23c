#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kfp {

/// Argument outside the mathematical domain of an operation (t <= 0, p < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Request beyond what the implementation supports (degree caps, dimension limits).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid too coarse, too large, mismatched or otherwise unusable for the request.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input (files, configs, sampling schedules).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal findings reported by operations that accept an optional sink.
struct Diagnostics {
  std::vector<std::string> warnings;
  /// Largest |f| found on the x-boundary layer by the partial Fourier transform.
  double boundary_max = 0.0;
  /// L1 mass pushed outside the velocity box by drift steps (accumulated).
  double shifted_out_mass = 0.0;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

}  // namespace kfp

#pragma once

#include <stdexcept>
#include <string>

namespace spaceform {

/// Raised when a numerical contract is broken: an off-model point, a
/// degenerate metric, a stencil leaving the chart, a vanishing mean curvature
/// where a ν₁-adapted frame is required.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed inputs (bad parameters, unknown names, bad configs).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spaceform

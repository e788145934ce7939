#pragma once

#include <stdexcept>
#include <string>

namespace sace {

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Trajectory left the finite range (CLI exit code 3). Expected for the
/// untamed control with large states; never for the tamed scheme.
struct BlowupError : std::runtime_error {
  BlowupError(const std::string& what, long step)
      : std::runtime_error(what), step(step) {}
  long step;
};

/// Iterative solve failed to converge (semi-implicit drift resolution).
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sace

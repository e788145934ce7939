#pragma once

#include <iosfwd>
#include <string>

#include "sace/config.hpp"

namespace sace {

enum class Subcommand { simulate, weak_error, spatial_error, moments, ergodic, invariant, self_test };

Subcommand parse_subcommand(const std::string& name);  // throws ConfigError

/// Run one experiment: computes, writes the artifact named in run.output
/// (CSV or JSON, with config echo, seed and version embedded), and prints a
/// short summary. Returns the process exit code contribution: 0, or 4 when
/// the self-test suite found failures. Config and numerical problems
/// surface as ConfigError / BlowupError.
int dispatch(Subcommand cmd, const ExperimentConfig& cfg, int threads, std::ostream& log);

/// Deterministic oracle suite: transform round trips, operator identities,
/// exact Ornstein-Uhlenbeck statistics, coupling exactness, RNG known
/// answers. Prints one line per check; returns the number of failures.
int run_self_test(std::ostream& log);

}  // namespace sace

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sace/analysis.hpp"
#include "sace/errors.hpp"

namespace sace {

enum class OutputFormat { csv, json };

/// How a run builds its initial field: a named preset or explicit
/// coefficients, optionally scaled.
struct InitialSpec {
  enum class Preset { zero, sine, mode1, coeffs };
  Preset preset = Preset::zero;
  std::vector<double> coeffs;  // only for Preset::coeffs
  double scale = 1.0;

  SpectralField build(int n_modes) const;
};

struct RunParams {
  long samples = 1000;
  std::uint64_t master_seed = 1;
  long save_stride = 1;
  FunctionalSpec functional = FunctionalSpec::exp_neg_sq();
  std::string output;
  OutputFormat format = OutputFormat::csv;
  bool save_states = false;

  // sweep / experiment specific (validated per subcommand)
  std::vector<double> tau_list;
  std::optional<double> tau_ref;
  std::optional<double> horizon;
  std::vector<int> n_list;
  std::optional<int> n_ref;
  std::optional<double> burn_in;
  std::vector<int> p_list;
  std::optional<InitialSpec> initial_b;
};

/// Everything a run needs, parsed from one config document plus flag
/// overrides. Reproducible from (this struct, master_seed) alone.
struct ExperimentConfig {
  std::optional<ModelParams> model;  // disengaged = drift disabled
  NoiseSpectrum noise{NoiseKind::power_law, 1.0, 1.0, 1};
  SchemeConfig scheme;
  InitialSpec initial;
  RunParams run;

  SpectralField initial_field() const { return initial.build(scheme.n_modes); }
};

/// Parse the INI-style document: flat key-value lines in sections
/// [model] [noise] [scheme] [initial] [run]. Unknown keys or sections are
/// rejected with a message listing them; structural invariants
/// (dissipativity, noise admissibility, tau cap) are checked here so every
/// downstream run can trust the config.
ExperimentConfig parse_config(const std::string& text);

/// Serialized echo of the effective config (defaults applied), embedded in
/// every output artifact.
std::string config_echo(const ExperimentConfig& cfg);

std::string functional_name(const FunctionalSpec& f);
std::string variant_name(SchemeVariant v);
std::string preset_name(const InitialSpec& init);

}  // namespace sace

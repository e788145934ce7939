// Command-line driver for the spectral stochastic Allen-Cahn toolkit.
//
// sace <subcommand> --config <path> [--seed <u64>] [--threads <n>]
//                   [--out <path>] [--format csv|json]
//
// Subcommands: simulate, weak-error, spatial-error, moments, ergodic,
// invariant, self-test. Exit codes: 0 success, 2 config error,
// 3 numerical blow-up, 4 self-test failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sace/errors.hpp"
#include "sace/experiments.hpp"
#include "sace/version.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sace::ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral Galerkin / tamed exponential Euler toolkit for the "
               "stochastic Allen-Cahn equation"};
  app.set_version_flag("--version", std::string("sace ") + sace::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;

  const std::vector<std::string> names = {"simulate",  "weak-error", "spatial-error",
                                          "moments",   "ergodic",    "invariant",
                                          "self-test"};
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file");
    sub->add_option("--seed", seed, "override run.master_seed")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--threads", threads, "worker threads (default: all cores)");
    sub->add_option("--out", out_path, "override run.output artifact path");
    sub->add_option("--format", format, "override run.format (csv|json)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string cmd_name = app.get_subcommands().front()->get_name();

  try {
    const sace::Subcommand cmd = sace::parse_subcommand(cmd_name);

    sace::ExperimentConfig cfg;
    if (cmd == sace::Subcommand::self_test) {
      if (!config_path.empty()) cfg = sace::parse_config(read_file(config_path));
    } else {
      if (config_path.empty()) throw sace::ConfigError(cmd_name + " needs --config <path>");
      cfg = sace::parse_config(read_file(config_path));
    }
    if (seed_given) cfg.run.master_seed = seed;
    if (!out_path.empty()) cfg.run.output = out_path;
    if (!format.empty()) {
      if (format == "csv") cfg.run.format = sace::OutputFormat::csv;
      else if (format == "json") cfg.run.format = sace::OutputFormat::json;
      else throw sace::ConfigError("--format must be csv or json");
    }

    return sace::dispatch(cmd, cfg, threads, std::cout);
  } catch (const sace::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sace::BlowupError& e) {
    std::cerr << "numerical blow-up: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#include "sace/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace sace {

SpectralField InitialSpec::build(int n_modes) const {
  std::vector<double> c(static_cast<size_t>(n_modes), 0.0);
  switch (preset) {
    case Preset::zero:
      break;
    case Preset::sine:
      // u0(x) = sin(pi x): coefficient 1/sqrt(2) on mode 1
      c[0] = 1.0 / std::sqrt(2.0);
      break;
    case Preset::mode1:
      c[0] = 1.0;
      break;
    case Preset::coeffs:
      for (size_t i = 0; i < coeffs.size() && i < c.size(); ++i) c[i] = coeffs[i];
      break;
  }
  for (double& v : c) v *= scale;
  return SpectralField(std::move(c));
}

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct RawConfig {
  std::map<std::string, std::string> values;  // "section.key" -> value
  std::set<std::string> consumed;

  bool has(const std::string& key) const { return values.count(key) > 0; }

  std::string take(const std::string& key) {
    consumed.insert(key);
    return values.at(key);
  }
};

RawConfig read_document(const std::string& text) {
  static const std::set<std::string> known_sections = {"model", "noise", "scheme",
                                                       "initial", "run"};
  RawConfig raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(section))
        throw ConfigError("config: unknown section [" + section + "]");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    const std::string full = section + "." + key;
    if (raw.values.count(full)) throw ConfigError("config: duplicate key " + full);
    raw.values[full] = value;
  }
  return raw;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is not a number: '" + v + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is not an integer: '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is not an unsigned integer: '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : v) {
    if (ch == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError("config: " + key + " is not a boolean: '" + v + "'");
}

FunctionalSpec parse_functional(const std::string& v) {
  if (v == "exp_neg_sq") return FunctionalSpec::exp_neg_sq();
  if (v == "cos_mode") return FunctionalSpec::cos_mode();
  if (v.rfind("mode_", 0) == 0) {
    const long k = parse_long("run.functional", v.substr(5));
    if (k < 1) throw ConfigError("config: run.functional mode index starts at 1");
    return FunctionalSpec::mode(static_cast<int>(k));
  }
  throw ConfigError("config: unknown functional '" + v + "' (expected exp_neg_sq, cos_mode, mode_<k>)");
}

InitialSpec parse_initial(RawConfig& raw, const std::string& section) {
  InitialSpec spec;
  const std::string preset_key = section + ".preset";
  const std::string coeffs_key = section + ".coeffs";
  const std::string scale_key = section + ".scale";
  if (raw.has(coeffs_key) && raw.has(preset_key))
    throw ConfigError("config: give either " + preset_key + " or " + coeffs_key + ", not both");
  if (raw.has(coeffs_key)) {
    spec.preset = InitialSpec::Preset::coeffs;
    for (const auto& part : split_list(raw.take(coeffs_key)))
      spec.coeffs.push_back(parse_double(coeffs_key, part));
  } else if (raw.has(preset_key)) {
    const std::string p = raw.take(preset_key);
    if (p == "zero") spec.preset = InitialSpec::Preset::zero;
    else if (p == "sine") spec.preset = InitialSpec::Preset::sine;
    else if (p == "mode1") spec.preset = InitialSpec::Preset::mode1;
    else throw ConfigError("config: unknown preset '" + p + "' (expected zero, sine, mode1)");
  }
  if (raw.has(scale_key)) spec.scale = parse_double(scale_key, raw.take(scale_key));
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  RawConfig raw = read_document(text);
  ExperimentConfig cfg;

  // [model]
  bool drift = true;
  if (raw.has("model.drift")) {
    const std::string d = raw.take("model.drift");
    if (d == "cubic") drift = true;
    else if (d == "none") drift = false;
    else throw ConfigError("config: model.drift must be cubic or none");
  }
  if (drift) {
    auto coeff = [&](const char* name, double fallback, bool required) {
      const std::string key = std::string("model.") + name;
      if (raw.has(key)) return parse_double(key, raw.take(key));
      if (required) throw ConfigError("config: missing " + key);
      return fallback;
    };
    const double a0 = coeff("a0", 0.0, false);
    const double a1 = coeff("a1", 0.0, false);
    const double a2 = coeff("a2", 0.0, false);
    const double a3 = coeff("a3", 0.0, true);
    if (!(a3 > 0.0))
      throw ConfigError("config: model.a3 must be positive (cubic term keeps the drift dissipative)");
    cfg.model = ModelParams(a0, a1, a2, a3);
  } else {
    for (const char* name : {"a0", "a1", "a2", "a3"})
      if (raw.has(std::string("model.") + name)) raw.take(std::string("model.") + name);
  }

  // [scheme]
  if (!raw.has("scheme.n_modes")) throw ConfigError("config: missing scheme.n_modes");
  cfg.scheme.n_modes = static_cast<int>(parse_long("scheme.n_modes", raw.take("scheme.n_modes")));
  if (!raw.has("scheme.tau")) throw ConfigError("config: missing scheme.tau");
  cfg.scheme.tau = parse_double("scheme.tau", raw.take("scheme.tau"));
  if (raw.has("scheme.n_steps"))
    cfg.scheme.n_steps = parse_long("scheme.n_steps", raw.take("scheme.n_steps"));
  if (raw.has("scheme.tau_cap"))
    cfg.scheme.tau_cap = parse_double("scheme.tau_cap", raw.take("scheme.tau_cap"));
  if (raw.has("scheme.variant")) {
    const std::string v = raw.take("scheme.variant");
    if (v == "tamed_exp_euler") cfg.scheme.variant = SchemeVariant::tamed_exp_euler;
    else if (v == "untamed_exp_euler") cfg.scheme.variant = SchemeVariant::untamed_exp_euler;
    else if (v == "semi_implicit") cfg.scheme.variant = SchemeVariant::semi_implicit;
    else throw ConfigError("config: unknown scheme.variant '" + v + "'");
  }

  // [noise]
  if (!raw.has("noise.kind")) throw ConfigError("config: missing noise.kind");
  const std::string kind = raw.take("noise.kind");
  NoiseKind nk;
  if (kind == "white") nk = NoiseKind::white;
  else if (kind == "power_law") nk = NoiseKind::power_law;
  else throw ConfigError("config: noise.kind must be white or power_law");
  double decay = 0.0;
  if (raw.has("noise.decay")) decay = parse_double("noise.decay", raw.take("noise.decay"));
  else if (nk == NoiseKind::power_law)
    throw ConfigError("config: power_law noise needs noise.decay");
  if (nk == NoiseKind::white && decay != 0.0)
    throw ConfigError("config: white noise fixes decay = 0");
  if (!raw.has("noise.beta")) throw ConfigError("config: missing noise.beta");
  const double beta = parse_double("noise.beta", raw.take("noise.beta"));
  cfg.noise = NoiseSpectrum(nk, decay, beta, std::max(cfg.scheme.n_modes, 1));
  cfg.scheme.beta = beta;  // the taming exponent is the declared noise regularity

  // [initial]
  cfg.initial = parse_initial(raw, "initial");

  // [run]
  if (raw.has("run.samples")) cfg.run.samples = parse_long("run.samples", raw.take("run.samples"));
  if (raw.has("run.master_seed"))
    cfg.run.master_seed = parse_u64("run.master_seed", raw.take("run.master_seed"));
  if (raw.has("run.save_stride"))
    cfg.run.save_stride = parse_long("run.save_stride", raw.take("run.save_stride"));
  if (raw.has("run.functional")) cfg.run.functional = parse_functional(raw.take("run.functional"));
  if (raw.has("run.output")) cfg.run.output = raw.take("run.output");
  if (raw.has("run.format")) {
    const std::string f = raw.take("run.format");
    if (f == "csv") cfg.run.format = OutputFormat::csv;
    else if (f == "json") cfg.run.format = OutputFormat::json;
    else throw ConfigError("config: run.format must be csv or json");
  }
  if (raw.has("run.save_states"))
    cfg.run.save_states = parse_bool("run.save_states", raw.take("run.save_states"));
  if (raw.has("run.tau_list"))
    for (const auto& part : split_list(raw.take("run.tau_list")))
      cfg.run.tau_list.push_back(parse_double("run.tau_list", part));
  if (raw.has("run.tau_ref")) cfg.run.tau_ref = parse_double("run.tau_ref", raw.take("run.tau_ref"));
  if (raw.has("run.horizon")) cfg.run.horizon = parse_double("run.horizon", raw.take("run.horizon"));
  if (raw.has("run.n_list"))
    for (const auto& part : split_list(raw.take("run.n_list")))
      cfg.run.n_list.push_back(static_cast<int>(parse_long("run.n_list", part)));
  if (raw.has("run.n_ref"))
    cfg.run.n_ref = static_cast<int>(parse_long("run.n_ref", raw.take("run.n_ref")));
  if (raw.has("run.burn_in")) cfg.run.burn_in = parse_double("run.burn_in", raw.take("run.burn_in"));
  if (raw.has("run.p_list"))
    for (const auto& part : split_list(raw.take("run.p_list")))
      cfg.run.p_list.push_back(static_cast<int>(parse_long("run.p_list", part)));
  if (raw.has("initial.preset_b") || raw.has("run.initial_b")) {
    InitialSpec b;
    const std::string key = raw.has("run.initial_b") ? "run.initial_b" : "initial.preset_b";
    const std::string p = raw.take(key);
    if (p == "zero") b.preset = InitialSpec::Preset::zero;
    else if (p == "sine") b.preset = InitialSpec::Preset::sine;
    else if (p == "mode1") b.preset = InitialSpec::Preset::mode1;
    else throw ConfigError("config: unknown preset '" + p + "' for " + key);
    cfg.run.initial_b = b;
  }

  // unknown keys
  std::vector<std::string> unknown;
  for (const auto& [key, value] : raw.values)
    if (!raw.consumed.count(key)) unknown.push_back(key);
  if (!unknown.empty()) {
    std::string msg = "config: unknown keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }

  // structural invariants, checked up front so runs fail fast
  try {
    cfg.scheme.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.model && !(cfg.model->lipschitz_onesided < eigenvalue(1)))
    throw ConfigError(
        "config: dissipativity violated, one-sided Lipschitz constant L_F = " +
        std::to_string(cfg.model->lipschitz_onesided) + " must stay below lambda_1 = pi^2");
  const RegularityReport reg = regularity_check(cfg.noise);
  if (!reg.admissible)
    throw ConfigError("config: noise regularity check failed, tail exponent " +
                      std::to_string(reg.tail_exponent) + " must be < -1 (declared beta too large)");
  if (cfg.run.samples < 1) throw ConfigError("config: run.samples must be positive");
  if (cfg.run.save_stride < 1) throw ConfigError("config: run.save_stride must be positive");
  if (cfg.run.functional.kind == FunctionalSpec::Kind::mode_k &&
      cfg.run.functional.mode_index > cfg.scheme.n_modes)
    throw ConfigError("config: run.functional mode index exceeds scheme.n_modes");
  return cfg;
}

std::string functional_name(const FunctionalSpec& f) {
  switch (f.kind) {
    case FunctionalSpec::Kind::exp_neg_sq: return "exp_neg_sq";
    case FunctionalSpec::Kind::cos_mode: return "cos_mode";
    case FunctionalSpec::Kind::mode_k: return "mode_" + std::to_string(f.mode_index);
  }
  return "?";
}

std::string variant_name(SchemeVariant v) {
  switch (v) {
    case SchemeVariant::tamed_exp_euler: return "tamed_exp_euler";
    case SchemeVariant::untamed_exp_euler: return "untamed_exp_euler";
    case SchemeVariant::semi_implicit: return "semi_implicit";
  }
  return "?";
}

std::string preset_name(const InitialSpec& init) {
  switch (init.preset) {
    case InitialSpec::Preset::zero: return "zero";
    case InitialSpec::Preset::sine: return "sine";
    case InitialSpec::Preset::mode1: return "mode1";
    case InitialSpec::Preset::coeffs: return "coeffs";
  }
  return "?";
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[model]\n";
  if (cfg.model) {
    out << "drift = cubic\n";
    out << "a0 = " << fmt(cfg.model->a0) << "\n";
    out << "a1 = " << fmt(cfg.model->a1) << "\n";
    out << "a2 = " << fmt(cfg.model->a2) << "\n";
    out << "a3 = " << fmt(cfg.model->a3) << "\n";
  } else {
    out << "drift = none\n";
  }
  out << "[noise]\n";
  out << "kind = " << (cfg.noise.kind == NoiseKind::white ? "white" : "power_law") << "\n";
  out << "decay = " << fmt(cfg.noise.decay) << "\n";
  out << "beta = " << fmt(cfg.noise.beta) << "\n";
  out << "[scheme]\n";
  out << "variant = " << variant_name(cfg.scheme.variant) << "\n";
  out << "n_modes = " << cfg.scheme.n_modes << "\n";
  out << "tau = " << fmt(cfg.scheme.tau) << "\n";
  out << "n_steps = " << cfg.scheme.n_steps << "\n";
  out << "tau_cap = " << fmt(cfg.scheme.tau_cap) << "\n";
  out << "[initial]\n";
  out << "preset = " << preset_name(cfg.initial) << "\n";
  if (cfg.initial.preset == InitialSpec::Preset::coeffs) {
    out << "coeffs =";
    for (size_t i = 0; i < cfg.initial.coeffs.size(); ++i)
      out << (i ? "," : " ") << fmt(cfg.initial.coeffs[i]);
    out << "\n";
  }
  out << "scale = " << fmt(cfg.initial.scale) << "\n";
  out << "[run]\n";
  out << "samples = " << cfg.run.samples << "\n";
  out << "master_seed = " << cfg.run.master_seed << "\n";
  out << "save_stride = " << cfg.run.save_stride << "\n";
  out << "functional = " << functional_name(cfg.run.functional) << "\n";
  out << "format = " << (cfg.run.format == OutputFormat::csv ? "csv" : "json") << "\n";
  out << "save_states = " << (cfg.run.save_states ? "on" : "off") << "\n";
  if (!cfg.run.tau_list.empty()) {
    out << "tau_list =";
    for (size_t i = 0; i < cfg.run.tau_list.size(); ++i)
      out << (i ? "," : " ") << fmt(cfg.run.tau_list[i]);
    out << "\n";
  }
  if (cfg.run.tau_ref) out << "tau_ref = " << fmt(*cfg.run.tau_ref) << "\n";
  if (cfg.run.horizon) out << "horizon = " << fmt(*cfg.run.horizon) << "\n";
  if (!cfg.run.n_list.empty()) {
    out << "n_list =";
    for (size_t i = 0; i < cfg.run.n_list.size(); ++i)
      out << (i ? "," : " ") << cfg.run.n_list[i];
    out << "\n";
  }
  if (cfg.run.n_ref) out << "n_ref = " << *cfg.run.n_ref << "\n";
  if (cfg.run.burn_in) out << "burn_in = " << fmt(*cfg.run.burn_in) << "\n";
  if (!cfg.run.p_list.empty()) {
    out << "p_list =";
    for (size_t i = 0; i < cfg.run.p_list.size(); ++i)
      out << (i ? "," : " ") << cfg.run.p_list[i];
    out << "\n";
  }
  if (cfg.run.initial_b) out << "initial_b = " << preset_name(*cfg.run.initial_b) << "\n";
  return out.str();
}

}  // namespace sace

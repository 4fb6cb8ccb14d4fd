#include "core/config.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace metawave {

using nlohmann::json;

namespace {

const std::set<std::string> known_keys{
    "geometry", "variant", "r",        "rotate",  "qm",      "eta",
    "omega",    "k0",      "eps0",     "mu0",     "eps1",    "eps1_inv",
    "gamma",    "modes",   "cells_per_eta", "cell_n", "macro_n", "lateral",
    "strip",    "out",     "sweep"};

const std::set<std::string> known_modes{mode_coeffs, mode_e_parallel, mode_h_parallel,
                                        mode_hmm};

template <class T> T get_as(const json &j, const char *key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception &) {
    fail(ErrorCode::config, std::string("config key '") + key + "' has the wrong type");
  }
}

double get_number(const json &j, const char *key) {
  if (!j.at(key).is_number())
    fail(ErrorCode::config, std::string("config key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

int get_int(const json &j, const char *key) {
  if (!j.at(key).is_number_integer())
    fail(ErrorCode::config, std::string("config key '") + key + "' must be an integer");
  return j.at(key).get<int>();
}

std::pair<double, double> get_pair(const json &j, const char *key) {
  const json &v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(ErrorCode::config,
         std::string("config key '") + key + "' must be a two-element number array");
  return {v[0].get<double>(), v[1].get<double>()};
}

SweepSpec parse_sweep(const json &s) {
  if (!s.is_object())
    fail(ErrorCode::config, "config key 'sweep' must be an object");
  for (const auto &[k, v] : s.items())
    if (k != "variable" && k != "start" && k != "stop" && k != "points" && k != "values")
      fail(ErrorCode::config, "unknown sweep key: " + k);
  SweepSpec sw;
  if (s.contains("variable"))
    sw.variable = get_as<std::string>(s, "variable");
  require(sw.variable == "k0" || sw.variable == "omega", ErrorCode::config,
          "sweep.variable must be \"k0\" or \"omega\"");
  const bool explicit_values = s.contains("values");
  const bool range = s.contains("start") || s.contains("stop") || s.contains("points");
  require(explicit_values != range, ErrorCode::config,
          "sweep needs either 'values' or 'start'/'stop'/'points'");
  if (explicit_values) {
    sw.values = get_as<std::vector<double>>(s, "values");
  } else {
    require(s.contains("start") && s.contains("stop") && s.contains("points"),
            ErrorCode::config, "sweep range needs 'start', 'stop' and 'points'");
    const double a = get_number(s, "start"), b = get_number(s, "stop");
    const int n = get_int(s, "points");
    require(n >= 1, ErrorCode::parameter, "sweep.points must be at least 1");
    for (int i = 0; i < n; ++i)
      sw.values.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  }
  require(!sw.values.empty(), ErrorCode::parameter, "sweep grid is empty");
  for (std::size_t i = 0; i < sw.values.size(); ++i) {
    require(sw.values[i] > 0.0, ErrorCode::parameter, "sweep values must be positive");
    require(i == 0 || sw.values[i] > sw.values[i - 1], ErrorCode::parameter,
            "sweep grid must be strictly increasing");
  }
  return sw;
}

} // namespace

bool ScenarioConfig::has_mode(const std::string &m) const {
  return std::find(modes.begin(), modes.end(), m) != modes.end();
}

MacroDomain ScenarioConfig::domain() const { return make_macro_domain(qm_lo, qm_hi, eta); }

Microstructure ScenarioConfig::microstructure() const {
  return make_microstructure(geometry, variant, r, rotate);
}

std::vector<double> ScenarioConfig::sweep_omegas() const {
  std::vector<double> out;
  if (!sweep)
    return out;
  const double scale = sweep->variable == "k0" ? 1.0 / std::sqrt(eps0 * mu0) : 1.0;
  for (double v : sweep->values)
    out.push_back(v * scale);
  return out;
}

ScenarioConfig parse_config_json(const json &j) {
  if (!j.is_object())
    fail(ErrorCode::config, "config must be a JSON object");
  std::vector<std::string> unknown;
  for (const auto &[k, v] : j.items())
    if (!known_keys.count(k))
      unknown.push_back(k);
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto &k : unknown)
      msg += " " + k;
    fail(ErrorCode::config, msg);
  }
  if (j.contains("omega") && j.contains("k0"))
    fail(ErrorCode::config, "config keys 'omega' and 'k0' are mutually exclusive");
  if (j.contains("eps1") && j.contains("eps1_inv"))
    fail(ErrorCode::config, "config keys 'eps1' and 'eps1_inv' are mutually exclusive");

  ScenarioConfig c;
  try {
    if (j.contains("geometry"))
      c.geometry = parse_geometry(get_as<std::string>(j, "geometry"));
    if (j.contains("variant"))
      c.variant = parse_variant(get_as<std::string>(j, "variant"));
  } catch (const Error &e) {
    fail(ErrorCode::config, e.what());
  }
  if (j.contains("r"))
    c.r = get_number(j, "r");
  if (j.contains("rotate"))
    c.rotate = get_as<bool>(j, "rotate");
  if (j.contains("qm"))
    std::tie(c.qm_lo, c.qm_hi) = get_pair(j, "qm");
  if (j.contains("eta"))
    c.eta = get_number(j, "eta");
  if (j.contains("eps0"))
    c.eps0 = get_number(j, "eps0");
  if (j.contains("mu0"))
    c.mu0 = get_number(j, "mu0");
  require(c.eps0 > 0.0 && c.mu0 > 0.0, ErrorCode::parameter,
          "eps0 and mu0 must be positive");
  if (j.contains("omega"))
    c.omega = get_number(j, "omega");
  if (j.contains("k0"))
    c.omega = get_number(j, "k0") / std::sqrt(c.eps0 * c.mu0);
  require(c.omega > 0.0, ErrorCode::parameter, "omega (or k0) must be positive");
  if (j.contains("eps1")) {
    const auto [re, im] = get_pair(j, "eps1");
    c.eps1 = {re, im};
  }
  if (j.contains("eps1_inv")) {
    const auto [re, im] = get_pair(j, "eps1_inv");
    require(re != 0.0 || im != 0.0, ErrorCode::parameter, "eps1_inv must be nonzero");
    c.eps1 = 1.0 / cplx(re, im);
  }
  if (j.contains("gamma"))
    c.gamma = get_number(j, "gamma");
  if (j.contains("modes")) {
    c.modes = get_as<std::vector<std::string>>(j, "modes");
    for (const auto &m : c.modes)
      require(known_modes.count(m) > 0, ErrorCode::config,
              "unknown mode '" + m + "' (expected coeffs, e-parallel, h-parallel, hmm)");
    std::vector<std::string> ordered;
    for (const char *m : {mode_coeffs, mode_e_parallel, mode_h_parallel, mode_hmm})
      if (std::find(c.modes.begin(), c.modes.end(), m) != c.modes.end())
        ordered.emplace_back(m);
    c.modes = ordered;
  }
  if (j.contains("cells_per_eta"))
    c.cells_per_eta = get_int(j, "cells_per_eta");
  if (j.contains("cell_n"))
    c.cell_n = get_int(j, "cell_n");
  if (j.contains("macro_n"))
    c.macro_n = get_int(j, "macro_n");
  if (j.contains("lateral")) {
    try {
      c.lateral = parse_lateral_boundary(get_as<std::string>(j, "lateral"));
    } catch (const Error &e) {
      fail(ErrorCode::config, e.what());
    }
  }
  if (j.contains("strip"))
    std::tie(c.strip_lo, c.strip_hi) = get_pair(j, "strip");
  if (j.contains("out"))
    c.out = get_as<std::string>(j, "out");
  if (j.contains("sweep"))
    c.sweep = parse_sweep(j.at("sweep"));

  // Preconditions of the downstream modules, checked up front.
  c.domain();
  c.microstructure();
  // Lossless eps1 is allowed for resonance sweeps; fine solves insist on
  // Im(eps1) > 0 themselves.
  require(c.eps1.real() > 0.0 && c.eps1.imag() >= 0.0, ErrorCode::parameter,
          "eps1 must have Re(eps1) > 0 and Im(eps1) >= 0");
  require(c.gamma.value_or(1.0) >= 1.0, ErrorCode::parameter, "gamma must be >= 1");
  require(c.variant == ShapeVariant::square || c.gamma.has_value() ||
              !c.has_mode(mode_coeffs),
          ErrorCode::parameter,
          "the round variant has no fitted cell mesh; give 'gamma' for coeffs");
  require(c.cells_per_eta >= 4 && c.cells_per_eta % 4 == 0, ErrorCode::parameter,
          "cells_per_eta must be a positive multiple of 4");
  require(c.cell_n >= 4 && c.cell_n % 4 == 0, ErrorCode::parameter,
          "cell_n must be a positive multiple of 4");
  require(c.macro_n >= 1, ErrorCode::parameter, "macro_n must be positive");
  const auto aligned = [&](double x) {
    return std::abs(x * c.macro_n - std::round(x * c.macro_n)) < 1e-9;
  };
  require(aligned(c.qm_lo) && aligned(c.qm_hi), ErrorCode::parameter,
          "macro_n must place grid lines on the Q_M interfaces");
  require(c.strip_lo >= 0.0 && c.strip_lo < c.strip_hi && c.strip_hi <= c.qm_lo,
          ErrorCode::parameter, "strip must lie in [0, qm_lo] and must not intersect Q_M");
  return c;
}

ScenarioConfig parse_config_text(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    fail(ErrorCode::config, std::string("invalid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

ScenarioConfig parse_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    fail(ErrorCode::config, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json config_to_json(const ScenarioConfig &c) {
  json j;
  j["geometry"] = std::string(to_string(c.geometry));
  j["variant"] = std::string(to_string(c.variant));
  j["r"] = c.r;
  j["rotate"] = c.rotate;
  j["qm"] = {c.qm_lo, c.qm_hi};
  j["eta"] = c.eta;
  j["omega"] = c.omega;
  j["eps0"] = c.eps0;
  j["mu0"] = c.mu0;
  j["eps1"] = {c.eps1.real(), c.eps1.imag()};
  if (c.gamma)
    j["gamma"] = *c.gamma;
  j["modes"] = c.modes;
  j["cells_per_eta"] = c.cells_per_eta;
  j["cell_n"] = c.cell_n;
  j["macro_n"] = c.macro_n;
  j["lateral"] = std::string(to_string(c.lateral));
  j["strip"] = {c.strip_lo, c.strip_hi};
  if (c.sweep)
    j["sweep"] = {{"variable", c.sweep->variable}, {"values", c.sweep->values}};
  return j;
}

std::uint64_t fnv1a64(const std::string &bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_fingerprint(const ScenarioConfig &c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_to_json(c).dump())));
  return buf;
}

} // namespace metawave

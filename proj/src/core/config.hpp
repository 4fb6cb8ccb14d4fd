#pragma once

#include "core/helmholtz.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace metawave {

inline constexpr const char *mode_coeffs = "coeffs";
inline constexpr const char *mode_e_parallel = "e-parallel";
inline constexpr const char *mode_h_parallel = "h-parallel";
inline constexpr const char *mode_hmm = "hmm";

struct SweepSpec {
  /// "k0" or "omega": the quantity the grid is written in.
  std::string variable = "k0";
  std::vector<double> values;
};

/// Validated scenario. Defaults reproduce the reference experiment:
/// k0 = 12, eta = 1/8, 1/eps1 = 1 - 0.01i, sigma1 with square base r = 1/4.
struct ScenarioConfig {
  GeometryId geometry = GeometryId::sigma1;
  ShapeVariant variant = ShapeVariant::square;
  double r = 0.25;
  bool rotate = false;
  double qm_lo = 0.25;
  double qm_hi = 0.75;
  double eta = 0.125;
  double omega = 12.0;
  double eps0 = 1.0;
  double mu0 = 1.0;
  cplx eps1 = 1.0 / cplx(1.0, -0.01);
  std::optional<double> gamma;
  std::vector<std::string> modes{mode_coeffs, mode_e_parallel, mode_h_parallel, mode_hmm};
  int cells_per_eta = 32;
  int cell_n = 64;
  int macro_n = 32;
  LateralBoundary lateral = LateralBoundary::periodic;
  double strip_lo = 0.05;
  double strip_hi = 0.20;
  std::string out = "out";
  std::optional<SweepSpec> sweep;

  double k0() const { return omega * std::sqrt(eps0 * mu0); }
  bool has_mode(const std::string &m) const;
  MacroDomain domain() const;
  Microstructure microstructure() const;
  Units units() const { return {eps0, mu0}; }
  /// Omega values of the sweep grid (empty without a sweep).
  std::vector<double> sweep_omegas() const;
};

/// Validates and fills defaults. Unknown keys and type errors raise config
/// errors; violated preconditions raise parameter errors.
ScenarioConfig parse_config_json(const nlohmann::json &j);
ScenarioConfig parse_config_text(const std::string &text);
ScenarioConfig parse_config(const std::string &path);

/// Canonical form: every key explicit, frequency as omega, eps1 as
/// [re, im]. The output directory is not part of it.
nlohmann::json config_to_json(const ScenarioConfig &c);

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(const std::string &bytes);

/// Hash of the canonical config, as 16 lowercase hex digits.
std::string config_fingerprint(const ScenarioConfig &c);

} // namespace metawave

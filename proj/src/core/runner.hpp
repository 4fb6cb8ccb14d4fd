#pragma once

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/slab.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace metawave {

inline constexpr int schema_version = 1;

enum class Stage { coeffs, cell, mu_sweep, solve_fine, solve_hmm, run, sweep };

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view s);

struct CoeffRow {
  GeometryId geometry = GeometryId::sigma1;
  double alpha = 0.0;
  cplx gamma;
  double k0 = 0.0;
  double L = 0.0;
  CoefficientSet c;
};

struct CellResult {
  int n = 0;
  double alpha = 0.0;
  std::optional<double> gamma;
  std::optional<std::array<double, 3>> mu_pc;
  Eigen::Matrix2d A_eff = Eigen::Matrix2d::Zero();
  std::optional<cplx> mu_eff;
};

struct FineResult {
  std::string mode;
  GeometryId geometry = GeometryId::sigma1;
  double eta = 0.0;
  double k0 = 0.0;
  double T_num = 0.0;
  double norm_QM = 0.0;
  double norm_inclusions = 0.0;
  double residual = 0.0;
};

struct HmmResult {
  Eigen::Matrix2d A_eff = Eigen::Matrix2d::Zero();
  cplx mu_eff;
  double T_num_macro = 0.0;
  double T_num_fine = 0.0;
  double rel_err_QL = 0.0;
  double rel_err_QM = 0.0;
  /// Q_M difference of the macro field without the inclusion corrector.
  double rel_err_QM_macro = 0.0;
  int macro_nodes = 0;
};

struct SweepRow {
  double omega = 0.0;
  double k0 = 0.0;
  std::optional<cplx> mu_eff;
  std::optional<double> T_e_parallel;
  std::optional<double> T_h_parallel;
  std::optional<double> abs_R;
  std::optional<double> abs_T;
  bool failed = false;
  std::string message;
};

struct Failure {
  std::string stage;
  ErrorCode code = ErrorCode::solver;
  std::string message;
};

struct RunReport {
  int schema = schema_version;
  std::string stage;
  std::string config_fingerprint;
  nlohmann::json config;
  std::vector<CoeffRow> coeffs;
  std::optional<CellResult> cell;
  std::vector<FineResult> fine;
  std::optional<HmmResult> hmm;
  std::vector<SweepRow> sweep;
  std::vector<Failure> failures;
  std::vector<std::string> warnings;

  bool ok() const { return failures.empty(); }
};

nlohmann::json report_to_json(const RunReport &r);
RunReport report_from_json(const nlohmann::json &j);

struct RunOptions {
  int threads = 1;
  /// Write CSV/JSON/VTK artifacts into the config's output directory.
  bool write_files = true;
};

/// Wall-clock seconds per step of the last run, kept apart from the
/// report so reports stay reproducible byte for byte.
using Timings = std::map<std::string, double>;

/// Runs one stage. Module errors are caught per step and recorded as
/// failures; independent steps still run.
RunReport run_stage(const ScenarioConfig &cfg, Stage stage, const RunOptions &opts = {},
                    Timings *timings = nullptr);

/// All modes of the config in dependency order: cell, coeffs, fine, hmm.
RunReport run_scenario(const ScenarioConfig &cfg, const RunOptions &opts = {},
                       Timings *timings = nullptr);

/// One row per grid point, in grid order.
RunReport run_sweep(const ScenarioConfig &cfg, const RunOptions &opts = {},
                    Timings *timings = nullptr);

/// Default grid of the mu-sweep stage when the config has none.
std::vector<double> default_mu_sweep_k0();

/// Process exit code for a finished report: 0, 1 (config or parameter
/// error), or 2 (any other module failure).
int exit_code_for(const RunReport &r);
int exit_code_for(ErrorCode code);

struct OracleCheck {
  int draws = 0;
  double max_deviation = 0.0;
  double max_energy_defect = 0.0;
};

/// Random lossless draws (alpha in (0.1, 0.9), gamma in (1, 5), k0 in
/// (1, 20), L in (0.1, 1)) comparing the closed forms with the
/// interface-matching system for sigma1..sigma3.
OracleCheck check_slab_oracle(int draws, std::uint64_t seed);

/// Closed-form coefficients with the oracle specialisation of each geometry.
CoefficientSet oracle_coeffs(GeometryId id, const SlabParams &p);

} // namespace metawave

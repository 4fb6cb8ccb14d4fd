#include "doctest.h"

#include "core/cell.hpp"
#include "core/error.hpp"
#include "core/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace metawave;
using nlohmann::json;

namespace {

ErrorCode code_of(auto &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::solver;
}

// Small and fast scenario: eta = 1/4, 32x32 fine mesh.
ScenarioConfig small(const std::string &extra = "") {
  return parse_config_text(R"({"eta": 0.25, "cells_per_eta": 8, "cell_n": 16,
                               "macro_n": 16)" +
                           extra + "}");
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch(const std::string &name) {
  const auto p = std::filesystem::temp_directory_path() / ("metawave_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

} // namespace

TEST_CASE("empty config gives the reference defaults") {
  const ScenarioConfig c = parse_config_text("{}");
  CHECK(c.geometry == GeometryId::sigma1);
  CHECK(c.variant == ShapeVariant::square);
  CHECK(c.r == 0.25);
  CHECK(c.eta == 0.125);
  CHECK(c.k0() == 12.0);
  CHECK(std::abs(1.0 / c.eps1 - cplx(1.0, -0.01)) < 1e-15);
  CHECK(c.qm_lo == 0.25);
  CHECK(c.qm_hi == 0.75);
  CHECK(c.modes.size() == 4);
  CHECK(c.lateral == LateralBoundary::periodic);
  CHECK_FALSE(c.sweep.has_value());
}

TEST_CASE("config errors") {
  try {
    parse_config_text(R"({"eta": 0.13})");
    FAIL("eta accepted");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::parameter);
    CHECK(std::string(e.what()).find("reciprocal power of two") != std::string::npos);
  }
  try {
    parse_config_text(R"({"etta": 0.125})");
    FAIL("unknown key accepted");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::config);
    CHECK(std::string(e.what()).find("etta") != std::string::npos);
  }
  CHECK(code_of([] { parse_config_text(R"({"omega": 12, "k0": 12})"); }) == ErrorCode::config);
  CHECK(code_of([] { parse_config_text(R"({"eps1": [1, 0], "eps1_inv": [1, 0]})"); }) ==
        ErrorCode::config);
  CHECK(code_of([] { parse_config_text(R"({"eta": "small"})"); }) == ErrorCode::config);
  CHECK(code_of([] { parse_config_text("[1, 2]"); }) == ErrorCode::config);
  CHECK(code_of([] { parse_config_text("{not json"); }) == ErrorCode::config);
  CHECK(code_of([] { parse_config_text(R"({"gamma": 0.5})"); }) == ErrorCode::parameter);
  CHECK(code_of([] { parse_config_text(R"({"cells_per_eta": 10})"); }) ==
        ErrorCode::parameter);
  CHECK(code_of([] { parse_config_text(R"({"strip": [0.1, 0.3]})"); }) == ErrorCode::parameter);
  CHECK(code_of([] { parse_config_text(R"({"sweep": {"values": [2, 1]}})"); }) ==
        ErrorCode::parameter);
  CHECK(code_of([] { parse_config_text(R"({"sweep": {"variable": "f", "values": [1]}})"); }) ==
        ErrorCode::config);
  CHECK(code_of([] { parse_config("/nonexistent/metawave.json"); }) == ErrorCode::config);
}

TEST_CASE("k0, eps1_inv and sweep ranges") {
  const ScenarioConfig c = parse_config_text(
      R"({"k0": 6, "eps0": 4, "eps1_inv": [1, -0.01],
          "sweep": {"variable": "k0", "start": 6, "stop": 12, "points": 4}})");
  CHECK(c.omega == doctest::Approx(3.0));
  CHECK(std::abs(c.eps1 - 1.0 / cplx(1.0, -0.01)) < 1e-15);
  const std::vector<double> om = c.sweep_omegas();
  REQUIRE(om.size() == 4);
  CHECK(om.front() == doctest::Approx(3.0));
  CHECK(om.back() == doctest::Approx(6.0));
}

TEST_CASE("canonical JSON round trip and fingerprint") {
  const ScenarioConfig a = parse_config_text(
      R"({"geometry": "sigma3", "rotate": true, "k0": 10, "out": "x",
          "sweep": {"start": 6, "stop": 12, "points": 3}})");
  const json ja = config_to_json(a);
  CHECK_FALSE(ja.contains("out"));
  const ScenarioConfig b = parse_config_json(ja);
  CHECK(config_to_json(b) == ja);
  CHECK(config_fingerprint(a) == config_fingerprint(b));
  CHECK(config_fingerprint(a).size() == 16);

  ScenarioConfig c = a;
  c.out = "elsewhere";
  CHECK(config_fingerprint(c) == config_fingerprint(a));
  c.eta = 0.0625;
  CHECK(config_fingerprint(c) != config_fingerprint(a));
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("stage names") {
  for (Stage s : {Stage::coeffs, Stage::cell, Stage::mu_sweep, Stage::solve_fine,
                  Stage::solve_hmm, Stage::run, Stage::sweep})
    CHECK(parse_stage(to_string(s)) == s);
  CHECK(code_of([] { parse_stage("fly"); }) == ErrorCode::parameter);
}

TEST_CASE("coeffs stage matches the closed forms") {
  const ScenarioConfig c = parse_config_text(R"({"gamma": 1.7})");
  const RunReport r = run_stage(c, Stage::coeffs, {1, false});
  CHECK(r.ok());
  REQUIRE(r.coeffs.size() == 4);
  for (const CoeffRow &row : r.coeffs) {
    SlabParams p;
    p.L = 0.5;
    p.alpha = row.alpha;
    p.gamma = 1.7;
    const CoefficientSet ref = closed_form_coeffs(row.geometry, p);
    CHECK(row.c.R == ref.R);
    CHECK(row.c.T == ref.T);
  }
  CHECK(r.coeffs[3].c.R == cplx{-1.0, 0.0});
  CHECK(r.coeffs[0].alpha == 0.75);
}

TEST_CASE("gamma falls back to the cell problem") {
  const RunReport r = run_stage(small(), Stage::coeffs, {1, false});
  REQUIRE(r.coeffs.size() == 4);
  const double g = r.coeffs[0].gamma.real();
  CHECK(g == solve_pc_permittivity(build_cell_mesh(
                 make_microstructure(GeometryId::sigma1, ShapeVariant::square, 0.25), 16)));
}

TEST_CASE("report JSON round trip") {
  const RunReport r = run_stage(small(), Stage::run, {1, false});
  CHECK(r.ok());
  CHECK(r.cell.has_value());
  CHECK(r.hmm.has_value());
  CHECK(r.fine.size() == 2);
  const json j = report_to_json(r);
  CHECK(j["schema_version"] == schema_version);
  CHECK(report_to_json(report_from_json(j)).dump() == j.dump());
}

TEST_CASE("single-point sweep reproduces the scenario") {
  const RunReport run = run_stage(small(), Stage::solve_fine, {1, false});
  const RunReport sw =
      run_stage(small(R"(, "sweep": {"variable": "k0", "values": [12]})"), Stage::sweep,
                {1, false});
  REQUIRE(run.fine.size() == 2);
  REQUIRE(sw.sweep.size() == 1);
  CHECK(sw.sweep[0].T_e_parallel.value() == run.fine[0].T_num);
  CHECK(sw.sweep[0].T_h_parallel.value() == run.fine[1].T_num);
}

TEST_CASE("byte-identical artifacts across runs and thread counts") {
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  ScenarioConfig c = small(R"(, "sweep": {"variable": "k0", "start": 10, "stop": 12, "points": 5})");
  c.out = d1.string();
  run_stage(c, Stage::run, {1, true});
  run_stage(c, Stage::sweep, {1, true});
  c.out = d2.string();
  run_stage(c, Stage::run, {1, true});
  run_stage(c, Stage::sweep, {3, true});
  for (const char *f : {"report_run.json", "report_sweep.json", "coeffs.csv", "fine.csv",
                        "cell.json", "hmm.json", "sweep.csv", "fine_h-parallel.vtk"}) {
    CAPTURE(f);
    const std::string a = slurp(d1 / f);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(d2 / f));
  }
  const std::string csv = slurp(d1 / "sweep.csv");
  CHECK(csv.rfind("schema_version,config_fingerprint,", 0) == 0);
  CHECK(csv.find(config_fingerprint(c)) != std::string::npos);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("a failing sweep sample is recorded and the rest continues") {
  const CellMesh cell = build_cell_mesh(
      make_microstructure(GeometryId::sigma1, ShapeVariant::square, 0.25), 16);
  const double k_res = std::sqrt(InclusionProblem(cell).dirichlet_eigenvalues()[0]);
  std::ostringstream cfg;
  cfg.precision(17);
  cfg << R"({"cell_n": 16, "eps1": [1, 0], "modes": ["coeffs"], "gamma": 2,
             "sweep": {"variable": "k0", "values": [)"
      << k_res - 1.0 << ", " << k_res << ", " << k_res + 1.0 << "]}}";
  const RunReport r = run_stage(parse_config_text(cfg.str()), Stage::sweep, {2, false});
  REQUIRE(r.sweep.size() == 3);
  CHECK_FALSE(r.sweep[0].failed);
  CHECK(r.sweep[1].failed);
  CHECK(r.sweep[1].message.find("mu_eff") != std::string::npos);
  CHECK(r.sweep[1].abs_T.has_value());
  CHECK_FALSE(r.sweep[2].failed);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorCode::config) == 1);
  CHECK(exit_code_for(ErrorCode::parameter) == 1);
  CHECK(exit_code_for(ErrorCode::geometry) == 2);
  CHECK(exit_code_for(ErrorCode::solver) == 2);
  RunReport ok;
  CHECK(exit_code_for(ok) == 0);

  // round inclusions cannot be meshed: a module failure, not a config error
  const RunReport r = run_stage(
      parse_config_text(R"({"variant": "round", "modes": ["e-parallel"]})"), Stage::solve_fine,
      {1, false});
  REQUIRE_FALSE(r.ok());
  CHECK(r.failures.front().code == ErrorCode::geometry);
  CHECK(exit_code_for(r) == 2);

  const RunReport s = run_stage(small(), Stage::sweep, {1, false});
  REQUIRE_FALSE(s.ok());
  CHECK(exit_code_for(s) == 1);
}

TEST_CASE("mu-sweep stage uses the default grid") {
  const RunReport r = run_stage(small(), Stage::mu_sweep, {2, false});
  REQUIRE(r.sweep.size() == 200);
  CHECK(r.sweep.front().k0 == doctest::Approx(6.0));
  CHECK(r.sweep.back().k0 == doctest::Approx(12.0));
  for (const SweepRow &row : r.sweep)
    CHECK(row.mu_eff->imag() > 0.0);
}

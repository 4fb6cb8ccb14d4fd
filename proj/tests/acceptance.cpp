// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances are fixed below and not configurable.
#include "core/cell.hpp"
#include "core/error.hpp"
#include "core/hmm.hpp"
#include "core/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace metawave;

namespace {

namespace tol {
constexpr double oracle = 1e-10;
constexpr double energy = 1e-10;
constexpr double mu_pc_rel = 0.02;
constexpr double off_diag = 1e-8;
constexpr double gamma_self = 1e-2;
constexpr double neumann = 1e-3;
constexpr double mu_static = 1e-10;
constexpr double manufactured = 0.05;
constexpr double refinement = 3.0;
constexpr double decay_slope = 1.5;
constexpr double contrast_ratio = 5.0;
constexpr double open_min = 0.3;
constexpr double blocked_max = 0.1;
constexpr double oracle_1d = 0.05;
constexpr double hmm_ql = 0.20;
} // namespace tol

constexpr cplx I{0.0, 1.0};
const cplx eps1_ref = 1.0 / cplx(1.0, -0.01);
constexpr double k0_ref = 12.0;
constexpr int cpe_ref = 32;
constexpr int cell_ref = 64;
constexpr int macro_ref = 32;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

Microstructure square(GeometryId id, double r = 0.25, bool rotated = false) {
  return make_microstructure(id, ShapeVariant::square, r, rotated);
}

std::shared_ptr<const DomainMesh> domain_mesh(GeometryId id, double eta, bool rotated = false,
                                              int cpe = cpe_ref) {
  return std::make_shared<const DomainMesh>(
      build_domain_mesh(make_macro_domain(0.25, 0.75, eta), square(id, 0.25, rotated), cpe));
}

FieldSolution fine(std::shared_ptr<const DomainMesh> m, FieldMode mode) {
  return assemble_and_solve(std::move(m), mode, k0_ref, eps1_ref, make_incident_wave(k0_ref));
}

Outcome c1_oracle() {
  const OracleCheck c = check_slab_oracle(100, 20240101);
  return {c.max_deviation < tol::oracle,
          fmt("100 draws, max componentwise deviation %.2e (< %.0e)", c.max_deviation,
              tol::oracle)};
}

Outcome c2_energy() {
  const OracleCheck c = check_slab_oracle(100, 20240101);
  SlabParams p;
  const CoefficientSet s4 = closed_form_coeffs(GeometryId::sigma4, p);
  const bool exact = s4.R == cplx{-1.0, 0.0} && s4.T == cplx{0.0, 0.0};
  return {c.max_energy_defect < tol::energy && exact,
          fmt("max ||R|^2+|T|^2-1| = %.2e (< %.0e); sigma4 (R,T) = (%g%+gi, %g%+gi)",
              c.max_energy_defect, tol::energy, s4.R.real(), s4.R.imag(), s4.T.real(),
              s4.T.imag())};
}

Outcome c3_pc_cell() {
  const Microstructure m = square(GeometryId::sigma1);
  const CellMesh c64 = build_cell_mesh(m, 64);
  const Eigen::Matrix3d mu = pc_permeability_tensor(c64, m.alpha);
  const double target[3] = {1.0, 1.0, 0.75};
  double diag = 0.0, off = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i == j)
        diag = std::max(diag, std::abs(mu(i, i) - target[i]) / target[i]);
      else
        off = std::max(off, std::abs(mu(i, j)));
  const double g64 = solve_pc_permittivity(c64);
  const double g128 = solve_pc_permittivity(build_cell_mesh(m, 128));
  const double self = std::abs(g64 - g128) / g128;
  return {diag < tol::mu_pc_rel && off < tol::off_diag && g64 >= 1.0 && g128 >= 1.0 &&
              self < tol::gamma_self,
          fmt("mu_pc = diag(%.5f, %.5f, %.5f), max rel dev %.2e, max off-diag %.1e; "
              "gamma_64 = %.6f, gamma_128 = %.6f, rel diff %.2e",
              mu(0, 0), mu(1, 1), mu(2, 2), diag, off, g64, g128, self)};
}

Outcome c4_neumann() {
  const Eigen::Matrix2d A = solve_neumann_cell(build_cell_mesh(square(GeometryId::sigma3), 64));
  const bool ok = std::abs(A(0, 0) - 0.5) < tol::neumann && std::abs(A(1, 1)) < tol::neumann &&
                  std::abs(A(0, 1)) < tol::neumann && std::abs(A(1, 0)) < tol::neumann;
  return {ok, fmt("A_eff = [[%.6f, %.1e], [%.1e, %.1e]]", A(0, 0), A(0, 1), A(1, 0), A(1, 1))};
}

Outcome c5_magnetism() {
  const CellMesh c = build_cell_mesh(square(GeometryId::sigma1), cell_ref);
  const cplx mu0 = solve_inclusion_resonance(c, 0.0, 1.0, 1.0, 1.0);
  std::vector<double> k(200);
  for (int i = 0; i < 200; ++i)
    k[i] = 20.0 * (i + 1) / 200.0;
  const ResonanceCurve curve = sweep_mu_eff(c, k, 1.0, 1.0, 1.0, 4);
  const double k_star = std::sqrt(8.0) * std::numbers::pi;
  const double step = k[1] - k[0];
  int hit = -1;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (!curve[i - 1].failed && !curve[i].failed &&
        (curve[i - 1].mu_eff.real() > 0.0) != (curve[i].mu_eff.real() > 0.0)) {
      hit = static_cast<int>(i);
      break;
    }
  if (hit < 0)
    return {false, "no sign change of Re mu_eff on the grid"};
  const bool bracket = k[hit - 1] - step <= k_star && k_star <= k[hit] + step;
  return {std::abs(mu0 - 1.0) < tol::mu_static && bracket,
          fmt("|mu(0)-1| = %.1e; first sign change in [%.3f, %.3f] (Re mu %.3g -> %.3g), "
              "sqrt(8 pi^2) = %.4f",
              std::abs(mu0 - 1.0), k[hit - 1], k[hit], curve[hit - 1].mu_eff.real(),
              curve[hit].mu_eff.real(), k_star)};
}

Outcome c6_convergence() {
  const IncidentWave w = make_incident_wave(k0_ref);
  auto err = [&](int n) {
    const MacroDomain d = make_macro_domain(0.25, 0.75, 0.125);
    const FieldSolution s =
        assemble_and_solve(std::make_shared<const DomainMesh>(build_macro_mesh(d, n)),
                           FieldMode::e_parallel, k0_ref, eps1_ref, w);
    return relative_l2_error(s, [&](Point2 x) { return w.value(x); });
  };
  const double e64 = err(64), e128 = err(128);
  return {e64 < tol::manufactured && e64 / e128 >= tol::refinement,
          fmt("rel L2 error h=1/64: %.3e, h=1/128: %.3e, ratio %.2f", e64, e128, e64 / e128)};
}

Outcome c7_decay() {
  const double etas[3] = {0.25, 0.125, 0.0625};
  double inc[3], qm[3];
  for (int i = 0; i < 3; ++i) {
    const FieldSolution s = fine(domain_mesh(GeometryId::sigma1, etas[i]), FieldMode::e_parallel);
    const Region q{0.25, 0.75, 0.0, 1.0};
    inc[i] = std::pow(region_norm(s, q, true), 2);
    qm[i] = region_norm(s, q);
  }
  // least-squares slope of log(inc) against log(eta)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    const double x = std::log(etas[i]), y = std::log(inc[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  const bool mono = qm[0] > qm[1] && qm[1] > qm[2];
  return {slope >= tol::decay_slope && mono,
          fmt("int_inclusions |u|^2 = %.3e, %.3e, %.3e (slope %.2f); ||u||_QM = %.3e, %.3e, "
              "%.3e",
              inc[0], inc[1], inc[2], slope, qm[0], qm[1], qm[2])};
}

Outcome c8_table() {
  const auto s1 = domain_mesh(GeometryId::sigma1, 0.125);
  const double te = measure_transmission(fine(s1, FieldMode::e_parallel));
  const double th = measure_transmission(fine(s1, FieldMode::h_parallel));
  const double open =
      measure_transmission(fine(domain_mesh(GeometryId::sigma3, 0.125), FieldMode::h_parallel));
  const double shut = measure_transmission(
      fine(domain_mesh(GeometryId::sigma3, 0.125, true), FieldMode::h_parallel));
  const auto s4 = domain_mesh(GeometryId::sigma4, 0.125);
  const double t4e = measure_transmission(fine(s4, FieldMode::e_parallel));
  const double t4h = measure_transmission(fine(s4, FieldMode::h_parallel));
  const bool ok_ratio = th > tol::contrast_ratio * te;
  const bool ok_s3 = open > tol::open_min && shut < tol::blocked_max;
  const bool ok_s4 = t4e < tol::blocked_max && t4h < tol::blocked_max;
  return {ok_ratio && ok_s3 && ok_s4,
          fmt("sigma1 T_h/T_e = %.4f/%.4f = %.1f [%s]; sigma3 open %.3f, blocked %.3f [%s]; "
              "sigma4 T_e %.3f, T_h %.3f [%s]",
              th, te, th / te, ok_ratio ? "ok" : "FAIL", open, shut, ok_s3 ? "ok" : "FAIL", t4e,
              t4h, ok_s4 ? "ok" : "FAIL")};
}

double slab_abs_T(double a, cplx mu, double k0, double L) {
  const cplx k = k0 * std::sqrt(mu / a);
  const cplx am = a * k / k0;
  return std::abs(2.0 / (2.0 * std::cos(k * L) - I * (am + 1.0 / am) * std::sin(k * L)));
}

Outcome c9_hmm() {
  const Microstructure m = square(GeometryId::sigma1);
  const CellMesh cell = build_cell_mesh(m, cell_ref);
  const InclusionCorrector corr = solve_inclusion_corrector(cell, k0_ref, 1.0, 1.0, eps1_ref);
  const HomogenizedModel model =
      make_homogenized_model(solve_neumann_cell(cell), corr.mu_eff, eps1_ref);
  const IncidentWave w = make_incident_wave(k0_ref);

  int nodes[2];
  FieldSolution macro8;
  for (int i = 0; i < 2; ++i) {
    const double eta = i == 0 ? 0.125 : 0.0625;
    FieldSolution s =
        homogenized_solve(make_macro_domain(0.25, 0.75, eta), model, k0_ref, w, macro_ref);
    nodes[i] = s.mesh->mesh.num_nodes();
    if (i == 0)
      macro8 = std::move(s);
  }
  const bool same_mesh = nodes[0] == nodes[1];

  const double t_macro = measure_transmission(macro8);
  const double t_1d = slab_abs_T(model.A_eff(0, 0), model.mu_eff, k0_ref, 0.5);
  const double dev_1d = std::abs(t_macro - t_1d) / t_1d;

  const auto fm = domain_mesh(GeometryId::sigma1, 0.125);
  const FieldSolution ref = fine(fm, FieldMode::h_parallel);
  const FieldSolution u0 = reconstruct_zeroth_order(macro8, corr, cell, fm);
  const double e_ql = compare_fields(u0, ref, Region{0.0, 0.25, 0.0, 1.0});

  const bool ok_1d = dev_1d < tol::oracle_1d, ok_ql = e_ql < tol::hmm_ql;
  return {same_mesh && ok_1d && ok_ql,
          fmt("macro nodes eta=1/8: %d, eta=1/16: %d [%s]; T_num %.4f vs 1D %.4f (%.2f%%) [%s]; "
              "Q_L rel L2 u0 vs fine %.3f (< %.2f) [%s]",
              nodes[0], nodes[1], same_mesh ? "ok" : "FAIL", t_macro, t_1d, 100 * dev_1d,
              ok_1d ? "ok" : "FAIL", e_ql, tol::hmm_ql, ok_ql ? "ok" : "FAIL")};
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome c10_determinism(const std::filesystem::path &root) {
  ScenarioConfig cfg = parse_config_text(
      R"({"cells_per_eta": 16, "sweep": {"variable": "k0", "start": 10, "stop": 12, "points": 3}})");
  const std::filesystem::path a = root / "det_a", b = root / "det_b";
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
  cfg.out = a.string();
  run_stage(cfg, Stage::run, {1, true});
  run_stage(cfg, Stage::sweep, {1, true});
  cfg.out = b.string();
  run_stage(cfg, Stage::run, {1, true});
  run_stage(cfg, Stage::sweep, {2, true});
  int compared = 0, differ = 0;
  for (const auto &e : std::filesystem::directory_iterator(a)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("timings_", 0) == 0)
      continue;
    const auto ext = e.path().extension();
    if (ext != ".csv" && ext != ".json")
      continue;
    ++compared;
    if (slurp(e.path()) != slurp(b / name))
      ++differ;
  }
  return {compared >= 6 && differ == 0,
          fmt("%d CSV/JSON artifacts compared across two runs, %d differ", compared, differ)};
}

} // namespace

int main(int argc, char **argv) {
  const std::filesystem::path root = argc > 1 ? argv[1] : "acceptance_out";
  std::filesystem::create_directories(root);

  const std::pair<const char *, std::function<Outcome()>> criteria[] = {
      {"1 oracle equivalence", c1_oracle},
      {"2 energy conservation", c2_energy},
      {"3 perfect-conductor cell problems", c3_pc_cell},
      {"4 Neumann tensor of the plate", c4_neumann},
      {"5 artificial magnetism", c5_magnetism},
      {"6 fine-solver convergence", c6_convergence},
      {"7 e-parallel decay", c7_decay},
      {"8 qualitative transmission table", c8_table},
      {"9 HMM pipeline", c9_hmm},
      {"10 determinism", [&] { return c10_determinism(root); }},
  };
  int failed = 0;
  for (const auto &[name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const Error &e) {
      o = {false, std::string("error (") + error_code_name(e.code()) + "): " + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}

#include "core/runner.hpp"

#include "core/error.hpp"
#include "core/format.hpp"
#include "core/hmm.hpp"
#include "core/vtk.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace metawave {

using nlohmann::json;

std::string_view to_string(Stage s) {
  switch (s) {
  case Stage::coeffs:
    return "coeffs";
  case Stage::cell:
    return "cell";
  case Stage::mu_sweep:
    return "mu-sweep";
  case Stage::solve_fine:
    return "solve-fine";
  case Stage::solve_hmm:
    return "solve-hmm";
  case Stage::run:
    return "run";
  case Stage::sweep:
    return "sweep";
  }
  return "?";
}

Stage parse_stage(std::string_view s) {
  for (Stage st : {Stage::coeffs, Stage::cell, Stage::mu_sweep, Stage::solve_fine,
                   Stage::solve_hmm, Stage::run, Stage::sweep})
    if (to_string(st) == s)
      return st;
  fail(ErrorCode::parameter, "unknown stage '" + std::string(s) + "'");
}

// ---- JSON -----------------------------------------------------------------

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double to_num(const json &j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json cjson(cplx z) { return json::array({num(z.real()), num(z.imag())}); }
cplx from_cjson(const json &j) { return {to_num(j.at(0)), to_num(j.at(1))}; }

json mat_json(const Eigen::Matrix2d &A) {
  return json::array({json::array({num(A(0, 0)), num(A(0, 1))}),
                      json::array({num(A(1, 0)), num(A(1, 1))})});
}

Eigen::Matrix2d from_mat_json(const json &j) {
  Eigen::Matrix2d A;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      A(r, c) = to_num(j.at(r).at(c));
  return A;
}

template <class T> json opt(const std::optional<T> &v) {
  if (!v)
    return nullptr;
  if constexpr (std::is_same_v<T, cplx>)
    return cjson(*v);
  else
    return num(*v);
}

std::optional<double> opt_num(const json &j) {
  if (j.is_null())
    return std::nullopt;
  return to_num(j);
}

json coeff_json(const CoeffRow &r) {
  return {{"geometry", std::string(to_string(r.geometry))},
          {"alpha", num(r.alpha)},
          {"gamma", cjson(r.gamma)},
          {"k0", num(r.k0)},
          {"L", num(r.L)},
          {"R", cjson(r.c.R)},
          {"T", cjson(r.c.T)},
          {"R_M", cjson(r.c.R_M)},
          {"T_M", cjson(r.c.T_M)}};
}

json cell_json(const CellResult &c) {
  json j{{"n", c.n}, {"alpha", num(c.alpha)}, {"A_eff", mat_json(c.A_eff)}};
  j["gamma"] = opt(c.gamma);
  j["mu_pc"] = c.mu_pc ? json::array({num((*c.mu_pc)[0]), num((*c.mu_pc)[1]),
                                      num((*c.mu_pc)[2])})
                       : json(nullptr);
  j["mu_eff"] = opt(c.mu_eff);
  return j;
}

json hmm_json(const HmmResult &h) {
  return {{"gamma_or_Aeff", mat_json(h.A_eff)},
          {"mu_eff", cjson(h.mu_eff)},
          {"T_num_macro", num(h.T_num_macro)},
          {"T_num_fine", num(h.T_num_fine)},
          {"rel_err_QL", num(h.rel_err_QL)},
          {"rel_err_QM", num(h.rel_err_QM)},
          {"rel_err_QM_macro", num(h.rel_err_QM_macro)},
          {"macro_nodes", h.macro_nodes}};
}

} // namespace

json report_to_json(const RunReport &r) {
  json j;
  j["schema_version"] = r.schema;
  j["stage"] = r.stage;
  j["config_fingerprint"] = r.config_fingerprint;
  j["config"] = r.config;
  j["coeffs"] = json::array();
  for (const auto &c : r.coeffs)
    j["coeffs"].push_back(coeff_json(c));
  j["cell"] = r.cell ? cell_json(*r.cell) : json(nullptr);
  j["fine"] = json::array();
  for (const auto &f : r.fine)
    j["fine"].push_back({{"mode", f.mode},
                         {"geometry", std::string(to_string(f.geometry))},
                         {"eta", num(f.eta)},
                         {"k0", num(f.k0)},
                         {"T_num", num(f.T_num)},
                         {"norm_QM", num(f.norm_QM)},
                         {"norm_inclusions", num(f.norm_inclusions)},
                         {"residual", num(f.residual)}});
  j["hmm"] = r.hmm ? hmm_json(*r.hmm) : json(nullptr);
  j["sweep"] = json::array();
  for (const auto &s : r.sweep)
    j["sweep"].push_back({{"omega", num(s.omega)},
                          {"k0", num(s.k0)},
                          {"mu_eff", opt(s.mu_eff)},
                          {"T_e_parallel", opt(s.T_e_parallel)},
                          {"T_h_parallel", opt(s.T_h_parallel)},
                          {"abs_R", opt(s.abs_R)},
                          {"abs_T", opt(s.abs_T)},
                          {"failed", s.failed},
                          {"message", s.message}});
  j["failures"] = json::array();
  for (const auto &f : r.failures)
    j["failures"].push_back({{"stage", f.stage},
                             {"code", error_code_name(f.code)},
                             {"message", f.message}});
  j["warnings"] = r.warnings;
  return j;
}

RunReport report_from_json(const json &j) {
  try {
    RunReport r;
    r.schema = j.at("schema_version").get<int>();
    require(r.schema == schema_version, ErrorCode::config, "unsupported report schema");
    r.stage = j.at("stage").get<std::string>();
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.config = j.at("config");
    for (const auto &c : j.at("coeffs")) {
      CoeffRow row;
      row.geometry = parse_geometry(c.at("geometry").get<std::string>());
      row.alpha = to_num(c.at("alpha"));
      row.gamma = from_cjson(c.at("gamma"));
      row.k0 = to_num(c.at("k0"));
      row.L = to_num(c.at("L"));
      row.c = {from_cjson(c.at("R")), from_cjson(c.at("T")), from_cjson(c.at("R_M")),
               from_cjson(c.at("T_M"))};
      r.coeffs.push_back(row);
    }
    if (const json &c = j.at("cell"); !c.is_null()) {
      CellResult cell;
      cell.n = c.at("n").get<int>();
      cell.alpha = to_num(c.at("alpha"));
      cell.A_eff = from_mat_json(c.at("A_eff"));
      cell.gamma = opt_num(c.at("gamma"));
      if (!c.at("mu_pc").is_null())
        cell.mu_pc = std::array<double, 3>{to_num(c["mu_pc"][0]), to_num(c["mu_pc"][1]),
                                           to_num(c["mu_pc"][2])};
      if (!c.at("mu_eff").is_null())
        cell.mu_eff = from_cjson(c.at("mu_eff"));
      r.cell = cell;
    }
    for (const auto &f : j.at("fine")) {
      FineResult fr;
      fr.mode = f.at("mode").get<std::string>();
      fr.geometry = parse_geometry(f.at("geometry").get<std::string>());
      fr.eta = to_num(f.at("eta"));
      fr.k0 = to_num(f.at("k0"));
      fr.T_num = to_num(f.at("T_num"));
      fr.norm_QM = to_num(f.at("norm_QM"));
      fr.norm_inclusions = to_num(f.at("norm_inclusions"));
      fr.residual = to_num(f.at("residual"));
      r.fine.push_back(fr);
    }
    if (const json &h = j.at("hmm"); !h.is_null()) {
      HmmResult hr;
      hr.A_eff = from_mat_json(h.at("gamma_or_Aeff"));
      hr.mu_eff = from_cjson(h.at("mu_eff"));
      hr.T_num_macro = to_num(h.at("T_num_macro"));
      hr.T_num_fine = to_num(h.at("T_num_fine"));
      hr.rel_err_QL = to_num(h.at("rel_err_QL"));
      hr.rel_err_QM = to_num(h.at("rel_err_QM"));
      hr.rel_err_QM_macro = to_num(h.at("rel_err_QM_macro"));
      hr.macro_nodes = h.at("macro_nodes").get<int>();
      r.hmm = hr;
    }
    for (const auto &s : j.at("sweep")) {
      SweepRow row;
      row.omega = to_num(s.at("omega"));
      row.k0 = to_num(s.at("k0"));
      if (!s.at("mu_eff").is_null())
        row.mu_eff = from_cjson(s.at("mu_eff"));
      row.T_e_parallel = opt_num(s.at("T_e_parallel"));
      row.T_h_parallel = opt_num(s.at("T_h_parallel"));
      row.abs_R = opt_num(s.at("abs_R"));
      row.abs_T = opt_num(s.at("abs_T"));
      row.failed = s.at("failed").get<bool>();
      row.message = s.at("message").get<std::string>();
      r.sweep.push_back(row);
    }
    for (const auto &f : j.at("failures")) {
      Failure fl;
      fl.stage = f.at("stage").get<std::string>();
      fl.code = parse_error_code(f.at("code").get<std::string>());
      fl.message = f.at("message").get<std::string>();
      r.failures.push_back(fl);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception &e) {
    fail(ErrorCode::config, std::string("malformed report: ") + e.what());
  }
}

// ---- oracle ---------------------------------------------------------------

CoefficientSet oracle_coeffs(GeometryId id, const SlabParams &p) {
  if (id == GeometryId::sigma4)
    return {cplx{-1.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}};
  const SlabMedium med = slab_medium(id, p);
  return interface_matching_oracle(med.a_M, med.k_M, p.k0(), p.L);
}

OracleCheck check_slab_oracle(int draws, std::uint64_t seed) {
  require(draws >= 0, ErrorCode::parameter, "draws must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(0.1, 0.9), ug(1.0, 5.0), uk(1.0, 20.0),
      uL(0.1, 1.0);
  OracleCheck out;
  out.draws = draws;
  for (int i = 0; i < draws; ++i) {
    SlabParams p;
    p.alpha = ua(rng);
    p.gamma = ug(rng);
    p.omega = uk(rng);
    p.L = uL(rng);
    for (GeometryId id : {GeometryId::sigma1, GeometryId::sigma2, GeometryId::sigma3}) {
      const CoefficientSet a = closed_form_coeffs(id, p), b = oracle_coeffs(id, p);
      for (auto [x, y] : {std::pair{a.R, b.R}, {a.T, b.T}, {a.R_M, b.R_M}, {a.T_M, b.T_M}})
        out.max_deviation = std::max(out.max_deviation, std::abs(x - y));
      out.max_energy_defect = std::max(
          out.max_energy_defect, std::abs(std::norm(a.R) + std::norm(a.T) - 1.0));
    }
  }
  return out;
}

// ---- exit codes -----------------------------------------------------------

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::config || code == ErrorCode::parameter ? 1 : 2;
}

int exit_code_for(const RunReport &r) {
  return r.failures.empty() ? 0 : exit_code_for(r.failures.front().code);
}

std::vector<double> default_mu_sweep_k0() {
  std::vector<double> k(200);
  for (int i = 0; i < 200; ++i)
    k[i] = 6.0 + 6.0 * i / 199.0;
  return k;
}

// ---- stages ---------------------------------------------------------------

namespace {

std::string csv_quote(const std::string &s) {
  std::string q = "\"";
  for (char ch : s)
    q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string opt_str(const std::optional<double> &v) { return v ? fmt17(*v) : ""; }

class Runner {
public:
  Runner(const ScenarioConfig &cfg, const RunOptions &opts, Timings *timings)
      : cfg_(cfg), opts_(opts), timings_(timings), fp_(config_fingerprint(cfg)) {
    report_.config_fingerprint = fp_;
    report_.config = config_to_json(cfg);
  }

  RunReport finish(Stage stage) {
    report_.stage = std::string(to_string(stage));
    if (opts_.write_files)
      guarded("write", [&] {
        write_text("report_" + report_.stage + ".json",
                   report_to_json(report_).dump(2) + "\n");
        json t = json::object();
        if (timings_)
          for (const auto &[k, v] : *timings_)
            t[k] = v;
        write_text("timings_" + report_.stage + ".json", t.dump(2) + "\n");
      });
    return std::move(report_);
  }

  void coeffs();
  void cell();
  void fine();
  void hmm();
  void mu_sweep();
  void sweep();

  bool has_failures() const { return !report_.failures.empty(); }

private:
  template <class F> bool guarded(const char *step, F &&f) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    try {
      f();
    } catch (const Error &e) {
      report_.failures.push_back({step, e.code(), e.what()});
      ok = false;
    } catch (const std::bad_alloc &) {
      report_.failures.push_back({step, ErrorCode::resource, "out of memory"});
      ok = false;
    } catch (const std::exception &e) {
      report_.failures.push_back({step, ErrorCode::solver, e.what()});
      ok = false;
    }
    if (timings_)
      (*timings_)[step] +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return ok;
  }

  std::filesystem::path out_path(const std::string &name) const {
    std::filesystem::create_directories(cfg_.out);
    return std::filesystem::path(cfg_.out) / name;
  }

  void write_text(const std::string &name, const std::string &text) const {
    std::ofstream out(out_path(name), std::ios::binary);
    if (!out)
      fail(ErrorCode::resource, "cannot write '" + out_path(name).string() + "'");
    out << text;
  }

  std::string csv_head(const std::string &cols) const {
    return "schema_version,config_fingerprint," + cols + "\n";
  }
  std::string csv_lead() const { return std::to_string(schema_version) + "," + fp_ + ","; }

  std::string vtk_title(const std::string &what) const {
    return "metawave " + what + " config_fingerprint=" + fp_;
  }

  double gamma_for_coeffs();
  const CellMesh &cell_mesh();
  std::shared_ptr<const DomainMesh> fine_mesh();
  const FieldSolution &fine_solution(FieldMode mode);

  void note_warnings(const std::vector<std::string> &w) {
    for (const auto &s : w)
      if (std::find(report_.warnings.begin(), report_.warnings.end(), s) ==
          report_.warnings.end())
        report_.warnings.push_back(s);
  }

  const ScenarioConfig &cfg_;
  RunOptions opts_;
  Timings *timings_;
  std::string fp_;
  RunReport report_;

  std::optional<CellMesh> cell_mesh_;
  std::optional<InclusionCorrector> corrector_;
  std::shared_ptr<const DomainMesh> fine_mesh_;
  std::map<FieldMode, FieldSolution> fine_sol_;
};

const CellMesh &Runner::cell_mesh() {
  if (!cell_mesh_)
    cell_mesh_ = build_cell_mesh(cfg_.microstructure(), cfg_.cell_n);
  return *cell_mesh_;
}

std::shared_ptr<const DomainMesh> Runner::fine_mesh() {
  if (!fine_mesh_)
    fine_mesh_ = std::make_shared<const DomainMesh>(
        build_domain_mesh(cfg_.domain(), cfg_.microstructure(), cfg_.cells_per_eta));
  return fine_mesh_;
}

const FieldSolution &Runner::fine_solution(FieldMode mode) {
  auto it = fine_sol_.find(mode);
  if (it != fine_sol_.end())
    return it->second;
  const IncidentWave wave = make_incident_wave(cfg_.k0());
  SolveOptions so{cfg_.units(), cfg_.lateral};
  FieldSolution sol = assemble_and_solve(fine_mesh(), mode, cfg_.omega, cfg_.eps1, wave, so);
  note_warnings(sol.warnings);
  return fine_sol_.emplace(mode, std::move(sol)).first->second;
}

double Runner::gamma_for_coeffs() {
  if (cfg_.gamma)
    return *cfg_.gamma;
  // The permittivity entry belongs to the isolated-conductor cross-section.
  const Microstructure m =
      make_microstructure(GeometryId::sigma1, ShapeVariant::square, cfg_.r);
  return solve_pc_permittivity(build_cell_mesh(m, cfg_.cell_n));
}

void Runner::coeffs() {
  std::vector<CoeffRow> rows;
  const bool ok = guarded("coeffs", [&] {
    const double gamma = gamma_for_coeffs();
    for (GeometryId id : {GeometryId::sigma1, GeometryId::sigma2, GeometryId::sigma3,
                          GeometryId::sigma4}) {
      SlabParams p;
      p.omega = cfg_.omega;
      p.eps0 = cfg_.eps0;
      p.mu0 = cfg_.mu0;
      p.L = cfg_.qm_hi - cfg_.qm_lo;
      p.alpha = make_microstructure(id, cfg_.variant, cfg_.r).alpha;
      p.gamma = gamma;
      rows.push_back({id, p.alpha, p.gamma, p.k0(), p.L, closed_form_coeffs(id, p)});
    }
  });
  if (!ok)
    return;
  report_.coeffs = rows;
  if (!opts_.write_files)
    return;
  guarded("write", [&] {
    std::string s = csv_head(
        "geometry,alpha,gamma_re,gamma_im,k0,L,re_R,im_R,abs_R,re_T,im_T,abs_T,"
        "re_R_M,im_R_M,abs_R_M,re_T_M,im_T_M,abs_T_M");
    for (const auto &r : rows) {
      s += csv_lead() + std::string(to_string(r.geometry)) + "," + fmt17(r.alpha) + "," +
           fmt17(r.gamma.real()) + "," + fmt17(r.gamma.imag()) + "," + fmt17(r.k0) + "," +
           fmt17(r.L);
      for (cplx z : {r.c.R, r.c.T, r.c.R_M, r.c.T_M})
        s += "," + fmt17(z.real()) + "," + fmt17(z.imag()) + "," + fmt17(std::abs(z));
      s += "\n";
    }
    write_text("coeffs.csv", s);
  });
}

void Runner::cell() {
  CellResult res;
  const bool ok = guarded("cell", [&] {
    const CellMesh &cm = cell_mesh();
    res.n = cm.n;
    res.alpha = cm.micro.alpha;
    if (!cm.micro.metal_touches_boundary()) {
      res.gamma = solve_pc_permittivity(cm);
      res.mu_pc = solve_pc_permeability(cm, cm.micro.alpha);
    }
    res.A_eff = solve_neumann_cell(cm);
  });
  if (!ok)
    return;
  // The resonance can fail on its own (real eps1 on an eigenvalue).
  guarded("cell", [&] {
    const InclusionProblem probe(cell_mesh());
    if (probe.num_dofs() == 0)
      return;
    corrector_ = solve_inclusion_corrector(cell_mesh(), cfg_.omega, cfg_.eps0, cfg_.mu0,
                                           cfg_.eps1);
    res.mu_eff = corrector_->mu_eff;
  });
  report_.cell = res;
  if (opts_.write_files)
    guarded("write", [&] {
      json j = cell_json(res);
      j["schema_version"] = schema_version;
      j["config_fingerprint"] = fp_;
      write_text("cell.json", j.dump(2) + "\n");
    });
}

void Runner::fine() {
  std::vector<std::pair<std::string, FieldMode>> modes;
  for (const char *m : {mode_e_parallel, mode_h_parallel})
    if (cfg_.has_mode(m))
      modes.emplace_back(m, parse_field_mode(m));
  const Region qm{cfg_.qm_lo, cfg_.qm_hi, 0.0, 1.0};
  for (const auto &[name, mode] : modes) {
    guarded(name == mode_e_parallel ? "e-parallel" : "h-parallel", [&] {
      const FieldSolution &sol = fine_solution(mode);
      FineResult fr;
      fr.mode = name;
      fr.geometry = cfg_.geometry;
      fr.eta = cfg_.eta;
      fr.k0 = sol.k0;
      fr.T_num = measure_transmission(sol, cfg_.strip_lo, cfg_.strip_hi);
      fr.norm_QM = region_norm(sol, qm);
      fr.norm_inclusions = region_norm(sol, qm, true);
      fr.residual = sol.residual;
      report_.fine.push_back(fr);
      if (opts_.write_files)
        write_vtk_file(out_path("fine_" + name + ".vtk").string(), sol,
                       vtk_title("fine " + name));
    });
  }
  if (opts_.write_files && !report_.fine.empty())
    guarded("write", [&] {
      std::string s = csv_head("mode,geometry,eta,k0,T_num,norm_QM,norm_inclusions");
      for (const auto &f : report_.fine)
        s += csv_lead() + f.mode + "," + std::string(to_string(f.geometry)) + "," +
             fmt17(f.eta) + "," + fmt17(f.k0) + "," + fmt17(f.T_num) + "," +
             fmt17(f.norm_QM) + "," + fmt17(f.norm_inclusions) + "\n";
      write_text("fine.csv", s);
    });
}

void Runner::hmm() {
  if (!report_.cell)
    cell();
  guarded("hmm", [&] {
    require(report_.cell.has_value(), ErrorCode::consistency,
            "hmm needs the cell results, which failed");
    const CellResult &c = *report_.cell;
    InclusionCorrector corr;
    if (corrector_) {
      corr = *corrector_;
    } else {
      require(!c.mu_eff, ErrorCode::consistency, "inclusion corrector is missing");
      corr.omega = cfg_.omega;
      corr.eps1 = cfg_.eps1;
      corr.mu_eff = 1.0;
      corr.w = VecC::Zero(cell_mesh().mesh.num_nodes());
    }
    const HomogenizedModel model = make_homogenized_model(c.A_eff, corr.mu_eff, cfg_.eps1);
    const IncidentWave wave = make_incident_wave(cfg_.k0());
    SolveOptions so{cfg_.units(), cfg_.lateral};
    const FieldSolution mac =
        homogenized_solve(cfg_.domain(), model, cfg_.omega, wave, cfg_.macro_n, so);
    note_warnings(mac.warnings);
    const FieldSolution &ref = fine_solution(FieldMode::h_parallel);
    const FieldSolution u0 = reconstruct_zeroth_order(mac, corr, cell_mesh(), fine_mesh());

    const Region ql{0.0, cfg_.qm_lo, 0.0, 1.0}, qm{cfg_.qm_lo, cfg_.qm_hi, 0.0, 1.0};
    HmmResult h;
    h.A_eff = c.A_eff;
    h.mu_eff = corr.mu_eff;
    h.T_num_macro = measure_transmission(mac, cfg_.strip_lo, cfg_.strip_hi);
    h.T_num_fine = measure_transmission(ref, cfg_.strip_lo, cfg_.strip_hi);
    h.rel_err_QL = compare_fields(u0, ref, ql);
    h.rel_err_QM = compare_fields(u0, ref, qm);
    h.rel_err_QM_macro = compare_fields(mac, ref, qm);
    h.macro_nodes = mac.mesh->mesh.num_nodes();
    report_.hmm = h;
    if (opts_.write_files) {
      json j = hmm_json(h);
      j["schema_version"] = schema_version;
      j["config_fingerprint"] = fp_;
      write_text("hmm.json", j.dump(2) + "\n");
      write_vtk_file(out_path("hmm_macro.vtk").string(), mac, vtk_title("hmm macro"));
      write_vtk_file(out_path("hmm_u0.vtk").string(), u0, vtk_title("hmm u0"));
    }
  });
}

void Runner::mu_sweep() {
  guarded("mu-sweep", [&] {
    std::vector<double> omegas = cfg_.sweep_omegas();
    if (omegas.empty())
      for (double k : default_mu_sweep_k0())
        omegas.push_back(k / std::sqrt(cfg_.eps0 * cfg_.mu0));
    const ResonanceCurve curve =
        sweep_mu_eff(cell_mesh(), omegas, cfg_.eps0, cfg_.mu0, cfg_.eps1, opts_.threads);
    for (const auto &s : curve) {
      SweepRow row;
      row.omega = s.omega;
      row.k0 = s.k0;
      row.mu_eff = s.mu_eff;
      row.failed = s.failed;
      row.message = s.message;
      report_.sweep.push_back(row);
    }
    if (opts_.write_files) {
      std::string out = csv_head("omega,k0,re_mu,im_mu,failed");
      for (const auto &s : curve)
        out += csv_lead() + fmt17(s.omega) + "," + fmt17(s.k0) + "," +
               fmt17(s.mu_eff.real()) + "," + fmt17(s.mu_eff.imag()) + "," +
               (s.failed ? "1" : "0") + "\n";
      write_text("mu_sweep.csv", out);
    }
  });
}

void Runner::sweep() {
  guarded("sweep", [&] {
    const std::vector<double> omegas = cfg_.sweep_omegas();
    require(!omegas.empty(), ErrorCode::parameter, "the config has no 'sweep' grid");
    const bool want_e = cfg_.has_mode(mode_e_parallel);
    const bool want_h = cfg_.has_mode(mode_h_parallel);
    const bool want_c = cfg_.has_mode(mode_coeffs);

    std::optional<double> gamma;
    if (want_c)
      gamma = gamma_for_coeffs();
    std::shared_ptr<const DomainMesh> mesh;
    if (want_e || want_h)
      mesh = fine_mesh();
    std::optional<InclusionProblem> prob;
    if (cfg_.variant == ShapeVariant::square) {
      prob.emplace(cell_mesh());
      if (prob->num_dofs() == 0)
        prob.reset();
      else if (cfg_.eps1.imag() == 0.0)
        prob->dirichlet_eigenvalues();
    }

    std::vector<SweepRow> rows(omegas.size());
    std::vector<std::vector<std::string>> warn(omegas.size());
    auto work = [&](std::size_t i) {
      SweepRow &row = rows[i];
      row.omega = omegas[i];
      row.k0 = omegas[i] * std::sqrt(cfg_.eps0 * cfg_.mu0);
      std::vector<std::string> errs;
      auto attempt = [&](const char *what, auto &&f) {
        try {
          f();
        } catch (const std::exception &e) {
          row.failed = true;
          errs.push_back(std::string(what) + ": " + e.what());
        }
      };
      if (prob)
        attempt("mu_eff", [&] {
          row.mu_eff = prob->mu_eff(prob->solve(row.k0 * row.k0 * cfg_.eps1));
        });
      if (want_c)
        attempt("coeffs", [&] {
          SlabParams p;
          p.omega = row.omega;
          p.eps0 = cfg_.eps0;
          p.mu0 = cfg_.mu0;
          p.L = cfg_.qm_hi - cfg_.qm_lo;
          p.alpha = cfg_.microstructure().alpha;
          p.gamma = *gamma;
          const CoefficientSet c = closed_form_coeffs(cfg_.geometry, p);
          row.abs_R = std::abs(c.R);
          row.abs_T = std::abs(c.T);
        });
      const IncidentWave wave{row.k0, -1.0, 0.0};
      SolveOptions so{cfg_.units(), cfg_.lateral};
      for (auto [flag, mode, dst] :
           {std::tuple{want_e, FieldMode::e_parallel, &row.T_e_parallel},
            std::tuple{want_h, FieldMode::h_parallel, &row.T_h_parallel}})
        if (flag)
          attempt(mode == FieldMode::e_parallel ? "e-parallel" : "h-parallel", [&] {
            const FieldSolution sol =
                assemble_and_solve(mesh, mode, row.omega, cfg_.eps1, wave, so);
            warn[i] = sol.warnings;
            *dst = measure_transmission(sol, cfg_.strip_lo, cfg_.strip_hi);
          });
      for (std::size_t e = 0; e < errs.size(); ++e)
        row.message += (e ? "; " : "") + errs[e];
    };
    const int nworkers =
        std::max(1, std::min<int>(opts_.threads, static_cast<int>(omegas.size())));
    if (nworkers == 1) {
      for (std::size_t i = 0; i < omegas.size(); ++i)
        work(i);
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < nworkers; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < omegas.size(); i += nworkers)
            work(i);
        });
    }
    for (const auto &w : warn)
      note_warnings(w);
    report_.sweep = rows;

    if (opts_.write_files) {
      std::string s = csv_head(
          "index,omega,k0,re_mu,im_mu,T_e_parallel,T_h_parallel,abs_R,abs_T,failed,message");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow &r = rows[i];
        s += csv_lead() + std::to_string(i) + "," + fmt17(r.omega) + "," + fmt17(r.k0) +
             "," + (r.mu_eff ? fmt17(r.mu_eff->real()) : "") + "," +
             (r.mu_eff ? fmt17(r.mu_eff->imag()) : "") + "," + opt_str(r.T_e_parallel) +
             "," + opt_str(r.T_h_parallel) + "," + opt_str(r.abs_R) + "," +
             opt_str(r.abs_T) + "," + (r.failed ? "1" : "0") + "," + csv_quote(r.message) +
             "\n";
      }
      write_text("sweep.csv", s);
    }
  });
}

} // namespace

RunReport run_stage(const ScenarioConfig &cfg, Stage stage, const RunOptions &opts,
                    Timings *timings) {
  Runner r(cfg, opts, timings);
  switch (stage) {
  case Stage::coeffs:
    r.coeffs();
    break;
  case Stage::cell:
    r.cell();
    break;
  case Stage::mu_sweep:
    r.mu_sweep();
    break;
  case Stage::solve_fine:
    r.fine();
    break;
  case Stage::solve_hmm:
    r.hmm();
    break;
  case Stage::run:
    if (cfg.has_mode(mode_hmm))
      r.cell();
    if (cfg.has_mode(mode_coeffs))
      r.coeffs();
    r.fine();
    if (cfg.has_mode(mode_hmm))
      r.hmm();
    break;
  case Stage::sweep:
    r.sweep();
    break;
  }
  return r.finish(stage);
}

RunReport run_scenario(const ScenarioConfig &cfg, const RunOptions &opts,
                       Timings *timings) {
  return run_stage(cfg, Stage::run, opts, timings);
}

RunReport run_sweep(const ScenarioConfig &cfg, const RunOptions &opts, Timings *timings) {
  return run_stage(cfg, Stage::sweep, opts, timings);
}

} // namespace metawave

#include "core/hmm.hpp"

#include "core/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace metawave {

HomogenizedModel make_homogenized_model(const Eigen::Matrix2d &A, cplx mu, cplx eps1) {
  require(A.allFinite(), ErrorCode::parameter, "A_eff must be finite");
  require(std::abs(A(0, 1) - A(1, 0)) <= 1e-12 * std::max(1.0, A.norm()),
          ErrorCode::parameter, "A_eff must be symmetric");
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(A).eigenvalues();
  require(ev.minCoeff() >= -1e-12, ErrorCode::parameter,
          "A_eff must be positive semidefinite");
  require(std::isfinite(mu.real()) && std::isfinite(mu.imag()), ErrorCode::parameter,
          "mu_eff must be finite");
  return {A, mu, eps1};
}

namespace {

Eigen::Matrix2d floored(const Eigen::Matrix2d &A) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A);
  const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(degenerate_floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace

FieldSolution homogenized_solve(const MacroDomain &domain, const HomogenizedModel &model,
                                double omega, const IncidentWave &wave, int macro_n,
                                const SolveOptions &opts) {
  require(omega > 0.0, ErrorCode::parameter, "omega must be positive");
  const double k0 = omega * std::sqrt(opts.units.eps0 * opts.units.mu0);
  require(std::abs(k0 - wave.k0) <= 1e-12 * k0, ErrorCode::consistency,
          "incident wave number does not match omega sqrt(eps0 mu0)");
  make_homogenized_model(model.A_eff, model.mu_eff, model.eps1);
  auto mesh = std::make_shared<const DomainMesh>(build_macro_mesh(domain, macro_n));

  FieldSolution sol;
  sol.mesh = mesh;
  sol.mode = FieldMode::homogenized;
  sol.omega = omega;
  sol.k0 = k0;
  sol.eta = domain.eta;
  sol.eps1 = model.eps1;
  sol.lateral = opts.lateral;
  if (k0 * mesh->h > pollution_limit) {
    std::ostringstream os;
    os << "k0*h = " << k0 * mesh->h << " exceeds " << pollution_limit
       << "; expect pollution error";
    sol.warnings.push_back(os.str());
  }

  auto solve_with = [&](const Eigen::Matrix2d &A) {
    const Mat2c a_in = A.cast<cplx>();
    const CoefficientFn coeff = [&](int t) {
      return mesh->in_slab[t] ? TriangleCoefficients{a_in, model.mu_eff}
                              : TriangleCoefficients{Mat2c::Identity(), cplx{1.0}};
    };
    const HelmholtzSystem sys = assemble_helmholtz(*mesh, coeff, wave, opts.lateral);
    return solve_helmholtz(sys, fine_residual_tol, &sol.residual);
  };
  try {
    sol.u = solve_with(model.A_eff);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::solver && e.code() != ErrorCode::accuracy)
      throw;
    sol.warnings.push_back(std::string("macro solve failed (") + e.what() +
                           "); retrying with A_eff eigenvalues floored at 1e-8");
    sol.u = solve_with(floored(model.A_eff));
  }
  return sol;
}

FieldSolution reconstruct_zeroth_order(const FieldSolution &macro,
                                       const InclusionCorrector &corr,
                                       const CellMesh &cell,
                                       std::shared_ptr<const DomainMesh> fine) {
  require(fine != nullptr && macro.mesh != nullptr, ErrorCode::parameter, "missing mesh");
  require(std::abs(macro.omega - corr.omega) <= 1e-12 * std::max(1.0, macro.omega),
          ErrorCode::consistency,
          "corrector and macro solution were computed at different omega");
  require(macro.eps1 == cplx{0.0, 0.0} || macro.eps1 == corr.eps1, ErrorCode::consistency,
          "corrector and macro solution were computed for different eps1");
  require(corr.w.size() == cell.mesh.num_nodes(), ErrorCode::consistency,
          "corrector does not live on the given cell mesh");

  const MacroDomain &dom = fine->domain;
  const TriMesh &fm = fine->mesh;
  FieldSolution out;
  out.mesh = fine;
  out.mode = FieldMode::homogenized;
  out.omega = macro.omega;
  out.k0 = macro.k0;
  out.eta = dom.eta;
  out.eps1 = corr.eps1;
  out.lateral = macro.lateral;
  out.residual = macro.residual;
  out.warnings = macro.warnings;
  out.u.resize(fm.num_nodes());
  for (int v = 0; v < fm.num_nodes(); ++v) {
    const Point2 x = fm.nodes[v];
    cplx u = interpolate(macro.mesh->mesh, macro.u, x);
    if (dom.in_slab(x))
      u *= 1.0 + interpolate(cell.mesh, corr.w, dom.cell_coordinate(x));
    out.u[v] = u;
  }
  return out;
}

double compare_fields(const FieldSolution &a, const FieldSolution &b,
                      const Region &region) {
  const bool a_finer = a.mesh->h < b.mesh->h;
  const TriMesh &m = a_finer ? a.mesh->mesh : b.mesh->mesh;
  VecC ua(m.num_nodes()), ub(m.num_nodes());
  for (int v = 0; v < m.num_nodes(); ++v) {
    ua[v] = a_finer ? a.u[v] : interpolate(a.mesh->mesh, a.u, m.nodes[v]);
    ub[v] = a_finer ? interpolate(b.mesh->mesh, b.u, m.nodes[v]) : b.u[v];
  }
  double diff = 0.0, ref = 0.0;
  int count = 0;
  for (int t = 0; t < m.num_tris(); ++t) {
    if (!region.contains(m.barycenter(t)))
      continue;
    ++count;
    const auto &vt = m.tris[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double mij = p1_mass(m.tri_area(), i, j);
        diff += mij * (std::conj(ua[vt[i]] - ub[vt[i]]) * (ua[vt[j]] - ub[vt[j]])).real();
        ref += mij * (std::conj(ub[vt[i]]) * ub[vt[j]]).real();
      }
  }
  require(count > 0, ErrorCode::parameter, "comparison region contains no triangles");
  if (ref == 0.0)
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(diff / ref);
}

} // namespace metawave

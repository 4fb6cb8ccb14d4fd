#include "core/helmholtz.hpp"

#include "core/error.hpp"

#include <cmath>
#include <sstream>

namespace metawave {

namespace {
constexpr cplx I{0.0, 1.0};

double tri_l2_sq(const TriMesh &m, int t, const VecC &u) {
  const auto &v = m.tris[t];
  const double area = m.tri_area();
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      s += p1_mass(area, a, b) * (std::conj(u[v[a]]) * u[v[b]]).real();
  return s;
}
} // namespace

std::string_view to_string(FieldMode m) {
  switch (m) {
  case FieldMode::e_parallel:
    return "e-parallel";
  case FieldMode::h_parallel:
    return "h-parallel";
  case FieldMode::homogenized:
    return "homogenized";
  }
  return "?";
}

FieldMode parse_field_mode(std::string_view s) {
  if (s == "e-parallel")
    return FieldMode::e_parallel;
  if (s == "h-parallel")
    return FieldMode::h_parallel;
  if (s == "homogenized")
    return FieldMode::homogenized;
  fail(ErrorCode::parameter, "unknown field mode '" + std::string(s) + "'");
}

cplx IncidentWave::value(Point2 x) const {
  return std::exp(I * k0 * (d1 * x.x1 + d2 * x.x2));
}

IncidentWave make_incident_wave(double k0, double d1, double d2) {
  require(k0 > 0.0, ErrorCode::parameter, "k0 must be positive");
  require(std::abs(std::hypot(d1, d2) - 1.0) < 1e-12, ErrorCode::parameter,
          "incident direction must be a unit vector");
  return {k0, d1, d2};
}

std::string_view to_string(LateralBoundary b) {
  return b == LateralBoundary::periodic ? "periodic" : "impedance";
}

LateralBoundary parse_lateral_boundary(std::string_view s) {
  if (s == "periodic")
    return LateralBoundary::periodic;
  if (s == "impedance")
    return LateralBoundary::impedance;
  fail(ErrorCode::parameter, "unknown lateral boundary '" + std::string(s) + "'");
}

HelmholtzSystem assemble_helmholtz(const DomainMesh &dm, const CoefficientFn &coeff,
                                   const IncidentWave &wave, LateralBoundary lateral) {
  const TriMesh &m = dm.mesh;
  const bool periodic = lateral == LateralBoundary::periodic;
  require(!periodic || wave.d2 == 0.0, ErrorCode::parameter,
          "periodic lateral boundary needs normal incidence (d2 = 0)");
  const double k0sq = wave.k0 * wave.k0;

  HelmholtzSystem sys;
  sys.dof.resize(m.nodes.size());
  for (int j = 0; j <= m.ny; ++j)
    for (int i = 0; i <= m.nx; ++i)
      sys.dof[m.node_index(i, j)] =
          (periodic && j == m.ny) ? i : m.node_index(i, j);
  const int n = periodic ? (m.nx + 1) * m.ny : m.num_nodes();
  const auto &dof = sys.dof;

  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(9 * m.tris.size());
  for (int t = 0; t < m.num_tris(); ++t) {
    const P1Element e = p1_element(m, t);
    const TriangleCoefficients tc = coeff(t);
    const auto &v = m.tris[t];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const cplx stiff =
            e.area * (e.grad[a].cast<cplx>().dot(tc.a * e.grad[b].cast<cplx>()));
        trips.emplace_back(dof[v[a]], dof[v[b]],
                           stiff - k0sq * tc.c * p1_mass(e.area, a, b));
      }
  }
  sys.K_volume.resize(n, n);
  sys.K_volume.setFromTriplets(trips.begin(), trips.end());

  sys.f = VecC::Zero(n);
  std::vector<Eigen::Triplet<cplx>> btrips;
  for (const BoundaryEdge &be : dm.boundary) {
    if (periodic && be.ny != 0.0)
      continue;
    const int da = dof[be.a], db = dof[be.b];
    const Point2 pa = m.nodes[be.a], pb = m.nodes[be.b];
    const double len = std::hypot(pb.x1 - pa.x1, pb.x2 - pa.x2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double mab = len / 6.0 * (a == b ? 2.0 : 1.0);
        btrips.emplace_back(a ? db : da, b ? db : da, -I * wave.k0 * mab);
      }
    const double dn = wave.d1 * be.nx + wave.d2 * be.ny;
    for (const LinePoint &q : line_rule()) {
      const Point2 x{pa.x1 + q.s * (pb.x1 - pa.x1), pa.x2 + q.s * (pb.x2 - pa.x2)};
      const cplx g = I * wave.k0 * (dn - 1.0) * wave.value(x);
      sys.f[da] += q.weight * len * (1.0 - q.s) * g;
      sys.f[db] += q.weight * len * q.s * g;
    }
  }
  SpMatC B(n, n);
  B.setFromTriplets(btrips.begin(), btrips.end());
  sys.K = sys.K_volume + B;
  return sys;
}

VecC solve_helmholtz(const HelmholtzSystem &sys, double tol, double *residual) {
  const VecC x = solve_sparse_lu(sys.K, sys.f, tol);
  if (residual)
    *residual = relative_residual(sys.K, x, sys.f);
  VecC u(sys.dof.size());
  for (std::size_t v = 0; v < sys.dof.size(); ++v)
    u[v] = x[sys.dof[v]];
  return u;
}

CoefficientFn fine_coefficients(const DomainMesh &dm, FieldMode mode, cplx eps1) {
  require(mode != FieldMode::homogenized, ErrorCode::parameter,
          "fine coefficients need e-parallel or h-parallel mode");
  const cplx eps_in = eps1 / (dm.domain.eta * dm.domain.eta);
  const TriMesh *m = &dm.mesh;
  if (mode == FieldMode::e_parallel)
    return [m, eps_in](int t) {
      return TriangleCoefficients{Mat2c::Identity(), m->metal[t] ? eps_in : cplx{1.0}};
    };
  return [m, eps_in](int t) {
    const cplx inv = m->metal[t] ? 1.0 / eps_in : cplx{1.0};
    return TriangleCoefficients{inv * Mat2c::Identity(), cplx{1.0}};
  };
}

FieldSolution assemble_and_solve(std::shared_ptr<const DomainMesh> mesh, FieldMode mode,
                                 double omega, cplx eps1, const IncidentWave &wave,
                                 const SolveOptions &opts) {
  require(mesh != nullptr, ErrorCode::parameter, "missing mesh");
  require(omega > 0.0, ErrorCode::parameter, "omega must be positive");
  const double k0 = omega * std::sqrt(opts.units.eps0 * opts.units.mu0);
  require(std::abs(k0 - wave.k0) <= 1e-12 * k0, ErrorCode::consistency,
          "incident wave number does not match omega sqrt(eps0 mu0)");
  if (mesh->micro.r > 0.0)
    make_permittivity_field(eps1, mesh->domain, mesh->micro);

  FieldSolution sol;
  sol.mesh = mesh;
  sol.mode = mode;
  sol.omega = omega;
  sol.k0 = k0;
  sol.eta = mesh->domain.eta;
  sol.eps1 = eps1;
  sol.lateral = opts.lateral;
  if (k0 * mesh->h > pollution_limit) {
    std::ostringstream os;
    os << "k0*h = " << k0 * mesh->h << " exceeds " << pollution_limit
       << "; expect pollution error";
    sol.warnings.push_back(os.str());
  }

  const HelmholtzSystem sys =
      assemble_helmholtz(*mesh, fine_coefficients(*mesh, mode, eps1), wave, opts.lateral);
  sol.u = solve_helmholtz(sys, fine_residual_tol, &sol.residual);
  return sol;
}

double measure_transmission(const FieldSolution &sol, double lo, double hi) {
  const DomainMesh &dm = *sol.mesh;
  require(lo >= 0.0 && lo < hi && hi <= dm.domain.qm_lo, ErrorCode::parameter,
          "transmission strip must lie in [0, qm_lo] and must not intersect Q_M");
  const TriMesh &m = dm.mesh;
  double sum = 0.0, area = 0.0;
  for (int t = 0; t < m.num_tris(); ++t) {
    const Point2 c = m.barycenter(t);
    if (c.x1 < lo || c.x1 > hi)
      continue;
    sum += tri_l2_sq(m, t, sol.u);
    area += m.tri_area();
  }
  require(area > 0.0, ErrorCode::parameter, "transmission strip contains no triangles");
  return std::sqrt(sum / area);
}

double region_norm(const FieldSolution &sol, const Region &region,
                   bool inclusions_only) {
  const TriMesh &m = sol.mesh->mesh;
  double sum = 0.0;
  for (int t = 0; t < m.num_tris(); ++t) {
    if (inclusions_only && !m.metal[t])
      continue;
    if (!region.contains(m.barycenter(t)))
      continue;
    sum += tri_l2_sq(m, t, sol.u);
  }
  return std::sqrt(sum);
}

double relative_l2_error(const FieldSolution &sol,
                         const std::function<cplx(Point2)> &exact) {
  const TriMesh &m = sol.mesh->mesh;
  double err = 0.0, ref = 0.0;
  for (int t = 0; t < m.num_tris(); ++t) {
    const auto &v = m.tris[t];
    for (const QuadPoint &q : triangle_rule()) {
      Point2 x{0.0, 0.0};
      cplx uh{0.0, 0.0};
      for (int a = 0; a < 3; ++a) {
        x.x1 += q.bary[a] * m.nodes[v[a]].x1;
        x.x2 += q.bary[a] * m.nodes[v[a]].x2;
        uh += q.bary[a] * sol.u[v[a]];
      }
      const cplx ue = exact(x);
      err += q.weight * m.tri_area() * std::norm(uh - ue);
      ref += q.weight * m.tri_area() * std::norm(ue);
    }
  }
  return std::sqrt(err / ref);
}

} // namespace metawave

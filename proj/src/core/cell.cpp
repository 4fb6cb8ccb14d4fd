#include "core/cell.hpp"

#include "core/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace metawave {

namespace {

constexpr double cell_tol = 1e-10;

struct NodeRoles {
  std::vector<char> touches_air;
  std::vector<char> touches_metal;
};

NodeRoles node_roles(const TriMesh &m) {
  NodeRoles r;
  r.touches_air.assign(m.nodes.size(), 0);
  r.touches_metal.assign(m.nodes.size(), 0);
  for (int t = 0; t < m.num_tris(); ++t)
    for (int v : m.tris[t])
      (m.metal[t] ? r.touches_metal : r.touches_air)[v] = 1;
  return r;
}

bool metal_on_cell_boundary(const CellMesh &cm) {
  const TriMesh &m = cm.mesh;
  for (int t = 0; t < m.num_tris(); ++t) {
    if (!m.metal[t])
      continue;
    for (int v : m.tris[t]) {
      const int i = v % (m.nx + 1), j = v / (m.nx + 1);
      if (i == 0 || j == 0 || i == m.nx || j == m.ny)
        return true;
    }
  }
  return false;
}

void require_contained_inclusion(const CellMesh &cm, const char *what) {
  if (metal_on_cell_boundary(cm))
    fail(ErrorCode::geometry,
         std::string(what) +
             " needs an inclusion compactly contained in the cell; the metal "
             "touches the cell boundary");
}

int find_root(std::vector<int> &parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

} // namespace

ConductorPotential solve_conductor_potential(const CellMesh &cm, int dir) {
  require(dir == 0 || dir == 1, ErrorCode::parameter, "direction must be 0 or 1");
  require_contained_inclusion(cm, "conductor potential problem");
  const TriMesh &m = cm.mesh;
  const NodeRoles roles = node_roles(m);

  auto coord = [&](int v) { return dir == 0 ? m.nodes[v].x1 : m.nodes[v].x2; };

  // Unknowns: periodic classes of nodes that are not on the conductor.
  std::vector<int> dof(m.nodes.size(), -1);
  int ndof = 0;
  for (int v = 0; v < m.num_nodes(); ++v) {
    if (roles.touches_metal[v] || !roles.touches_air[v])
      continue;
    const int mv = cm.master[v];
    if (dof[mv] < 0)
      dof[mv] = ndof++;
    dof[v] = dof[mv];
  }
  const bool has_conductor =
      std::any_of(roles.touches_metal.begin(), roles.touches_metal.end(),
                  [](char c) { return c != 0; });

  std::vector<Eigen::Triplet<double>> trips;
  VecR f = VecR::Zero(ndof);
  for (int t = 0; t < m.num_tris(); ++t) {
    if (m.metal[t])
      continue;
    const P1Element e = p1_element(m, t);
    const auto &v = m.tris[t];
    for (int a = 0; a < 3; ++a) {
      const int ra = dof[v[a]];
      if (ra < 0)
        continue;
      f[ra] -= e.area * e.grad[a][dir];
      for (int b = 0; b < 3; ++b) {
        const double kab = e.area * e.grad[a].dot(e.grad[b]);
        const int rb = dof[v[b]];
        if (rb >= 0)
          trips.emplace_back(ra, rb, kab);
        else
          f[ra] += kab * coord(v[b]); // phi = -y_dir on the conductor
      }
    }
  }
  // Without a conductor phi is only defined up to a constant.
  if (!has_conductor && ndof > 0)
    trips.emplace_back(0, 0, 1.0);
  SpMatR K(ndof, ndof);
  K.setFromTriplets(trips.begin(), trips.end());

  const VecR u = ndof > 0 ? solve_spd(K, f, cell_tol) : VecR();

  ConductorPotential out;
  if (ndof > 0) {
    const double fn = f.norm();
    out.residual = (K * u - f).norm() / (fn > 0.0 ? fn : 1.0);
  }
  out.phi.resize(m.num_nodes());
  for (int v = 0; v < m.num_nodes(); ++v)
    out.phi[v] = dof[v] >= 0 ? u[dof[v]] : (roles.touches_metal[v] ? -coord(v) : 0.0);

  for (int t = 0; t < m.num_tris(); ++t) {
    if (m.metal[t])
      continue;
    const P1Element e = p1_element(m, t);
    const auto &v = m.tris[t];
    Eigen::Vector2d E = Eigen::Vector2d::Unit(dir);
    for (int a = 0; a < 3; ++a)
      E += out.phi[v[a]] * e.grad[a];
    out.energy += e.area * E.squaredNorm();
    for (int a = 0; a < 3; ++a)
      if (roles.touches_metal[v[a]])
        out.conductor_flux += e.area * e.grad[a].dot(E);
  }
  return out;
}

double solve_pc_permittivity(const CellMesh &mesh) {
  return solve_conductor_potential(mesh, 0).energy;
}

Eigen::Matrix3d pc_permeability_tensor(const CellMesh &cm, double alpha) {
  const TriMesh &m = cm.mesh;
  // h^1 = grad(psi) + e2 with psi = phi_(e2); h^2 = grad(psi) - e1 with
  // psi = -phi_(e1). H = (h_2, -h_1) in the plane.
  const ConductorPotential p1 = solve_conductor_potential(cm, 1);
  const ConductorPotential p0 = solve_conductor_potential(cm, 0);

  Eigen::Vector2d int_h1 = Eigen::Vector2d::Zero(), int_h2 = Eigen::Vector2d::Zero();
  double air = 0.0;
  for (int t = 0; t < m.num_tris(); ++t) {
    const P1Element e = p1_element(m, t);
    const auto &v = m.tris[t];
    Eigen::Vector2d g1 = Eigen::Vector2d::Zero(), g0 = Eigen::Vector2d::Zero();
    for (int a = 0; a < 3; ++a) {
      g1 += p1.phi[v[a]] * e.grad[a];
      g0 += p0.phi[v[a]] * e.grad[a];
    }
    int_h1 += e.area * (g1 + Eigen::Vector2d::UnitY());
    int_h2 += e.area * (-g0 - Eigen::Vector2d::UnitX());
    if (!m.metal[t])
      air += e.area;
  }
  require(std::abs(air - alpha) < 1e-8, ErrorCode::consistency,
          "meshed air fraction does not match alpha");

  Eigen::Matrix3d mu = Eigen::Matrix3d::Zero();
  mu(0, 0) = int_h1[1];
  mu(1, 0) = -int_h1[0];
  mu(0, 1) = int_h2[1];
  mu(1, 1) = -int_h2[0];
  mu(2, 2) = air;
  return mu;
}

std::array<double, 3> solve_pc_permeability(const CellMesh &mesh, double alpha) {
  const Eigen::Matrix3d mu = pc_permeability_tensor(mesh, alpha);
  return {mu(0, 0), mu(1, 1), mu(2, 2)};
}

Eigen::Matrix2d solve_neumann_cell(const CellMesh &cm) {
  const TriMesh &m = cm.mesh;
  const NodeRoles roles = node_roles(m);

  std::vector<int> dof(m.nodes.size(), -1);
  int ndof = 0;
  for (int v = 0; v < m.num_nodes(); ++v) {
    if (!roles.touches_air[v])
      continue;
    const int mv = cm.master[v];
    if (dof[mv] < 0)
      dof[mv] = ndof++;
    dof[v] = dof[mv];
  }

  // One pinned unknown per connected air component.
  std::vector<int> parent(ndof);
  std::iota(parent.begin(), parent.end(), 0);
  for (int t = 0; t < m.num_tris(); ++t) {
    if (m.metal[t])
      continue;
    const auto &v = m.tris[t];
    for (int a = 1; a < 3; ++a)
      parent[find_root(parent, dof[v[a]])] = find_root(parent, dof[v[0]]);
  }
  std::vector<char> pinned(ndof, 0);
  for (int d = 0; d < ndof; ++d)
    if (find_root(parent, d) == d)
      pinned[d] = 1;

  std::vector<Eigen::Triplet<double>> trips;
  VecR f0 = VecR::Zero(ndof), f1 = VecR::Zero(ndof);
  std::vector<P1Element> elems(m.tris.size());
  for (int t = 0; t < m.num_tris(); ++t) {
    if (m.metal[t])
      continue;
    elems[t] = p1_element(m, t);
    const P1Element &e = elems[t];
    const auto &v = m.tris[t];
    for (int a = 0; a < 3; ++a) {
      const int ra = dof[v[a]];
      if (pinned[ra])
        continue;
      f0[ra] -= e.area * e.grad[a][0];
      f1[ra] -= e.area * e.grad[a][1];
      for (int b = 0; b < 3; ++b) {
        const int rb = dof[v[b]];
        if (!pinned[rb])
          trips.emplace_back(ra, rb, e.area * e.grad[a].dot(e.grad[b]));
      }
    }
  }
  for (int d = 0; d < ndof; ++d)
    if (pinned[d])
      trips.emplace_back(d, d, 1.0);
  SpMatR K(ndof, ndof);
  K.setFromTriplets(trips.begin(), trips.end());

  Eigen::SimplicialLDLT<SpMatR> ldlt(K);
  if (ldlt.info() != Eigen::Success)
    fail(ErrorCode::solver, "Neumann cell system could not be factorised");
  std::array<VecR, 2> chi{ldlt.solve(f0), ldlt.solve(f1)};
  for (int l = 0; l < 2; ++l) {
    const VecR &f = l == 0 ? f0 : f1;
    const double res = (K * chi[l] - f).norm();
    require(res <= cell_tol * std::max(1.0, f.norm()), ErrorCode::accuracy,
            "Neumann cell residual too large");
  }

  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  for (int t = 0; t < m.num_tris(); ++t) {
    if (m.metal[t])
      continue;
    const P1Element &e = elems[t];
    const auto &v = m.tris[t];
    std::array<Eigen::Vector2d, 2> grad{Eigen::Vector2d::UnitX(),
                                        Eigen::Vector2d::UnitY()};
    for (int l = 0; l < 2; ++l)
      for (int a = 0; a < 3; ++a)
        grad[l] += chi[l][dof[v[a]]] * e.grad[a];
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        A(k, l) += e.area * grad[l].dot(grad[k]);
  }
  return A;
}

Eigen::Matrix2d maxwell_inverse_permittivity_block(const Eigen::Matrix2d &a) {
  Eigen::Matrix2d r;
  r << a(1, 1), -a(1, 0), -a(0, 1), a(0, 0);
  return r;
}

InclusionProblem::InclusionProblem(const CellMesh &cm) : mesh_(&cm) {
  const TriMesh &m = cm.mesh;
  NodeRoles roles = node_roles(m);
  // Periodic images share one unknown, so roles are merged per class.
  for (int v = 0; v < m.num_nodes(); ++v) {
    const int mv = cm.master[v];
    roles.touches_air[mv] |= roles.touches_air[v];
    roles.touches_metal[mv] |= roles.touches_metal[v];
  }

  std::vector<int> dof(m.nodes.size(), -1);
  for (int v = 0; v < m.num_nodes(); ++v) {
    const int mv = cm.master[v];
    if (!roles.touches_metal[mv] || roles.touches_air[mv])
      continue;
    if (dof[mv] < 0) {
      dof[mv] = static_cast<int>(dofs_.size());
      dofs_.push_back(mv);
    }
    dof[v] = dof[mv];
  }
  node_dof_ = dof;
  const int n = num_dofs();
  std::vector<Eigen::Triplet<double>> kt, mt;
  b_ = VecR::Zero(n);
  for (int t = 0; t < m.num_tris(); ++t) {
    if (!m.metal[t])
      continue;
    const P1Element e = p1_element(m, t);
    const auto &v = m.tris[t];
    for (int a = 0; a < 3; ++a) {
      const int ra = dof[v[a]];
      if (ra < 0)
        continue;
      b_[ra] += e.area / 3.0;
      for (int c = 0; c < 3; ++c) {
        const int rc = dof[v[c]];
        if (rc < 0)
          continue;
        kt.emplace_back(ra, rc, e.area * e.grad[a].dot(e.grad[c]));
        mt.emplace_back(ra, rc, p1_mass(e.area, a, c));
      }
    }
  }
  K_.resize(n, n);
  M_.resize(n, n);
  K_.setFromTriplets(kt.begin(), kt.end());
  M_.setFromTriplets(mt.begin(), mt.end());
}

void InclusionProblem::compute_modes() const {
  if (eig_)
    return;
  const Eigen::MatrixXd K = Eigen::MatrixXd(K_), M = Eigen::MatrixXd(M_);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::solver, "inclusion eigenvalue problem did not converge");
  modes_ = es.eigenvectors();
  eig_ = es.eigenvalues();
}

const VecR &InclusionProblem::dirichlet_eigenvalues() const {
  compute_modes();
  return *eig_;
}

const Eigen::MatrixXd &InclusionProblem::dirichlet_modes() const {
  compute_modes();
  return modes_;
}

VecC InclusionProblem::solve(cplx z) const {
  VecC w_nodal = VecC::Zero(mesh_->mesh.num_nodes());
  if (z == cplx{0.0, 0.0} || num_dofs() == 0)
    return w_nodal;
  if (z.imag() == 0.0) {
    for (double lam : dirichlet_eigenvalues())
      if (std::abs(z.real() - lam) < 1e-8 * std::max(1.0, lam))
        fail(ErrorCode::resonance,
             "k0^2 eps1 coincides with a discrete Dirichlet eigenvalue of the "
             "inclusion");
  }
  const SpMatC A = K_.cast<cplx>() - z * M_.cast<cplx>();
  const VecC f = z * b_.cast<cplx>();
  const VecC w = solve_sparse_lu(A, f, cell_tol);
  for (int v = 0; v < mesh_->mesh.num_nodes(); ++v)
    if (node_dof_[v] >= 0)
      w_nodal[v] = w[node_dof_[v]];
  return w_nodal;
}

cplx InclusionProblem::mu_eff(const VecC &w_nodal) const {
  const TriMesh &m = mesh_->mesh;
  cplx integral{0.0, 0.0};
  for (int t = 0; t < m.num_tris(); ++t) {
    if (!m.metal[t])
      continue;
    const auto &v = m.tris[t];
    integral += m.tri_area() / 3.0 * (w_nodal[v[0]] + w_nodal[v[1]] + w_nodal[v[2]]);
  }
  return 1.0 + integral;
}

namespace {

cplx resonance_z(double omega, double eps0, double mu0, cplx eps1) {
  require(omega >= 0.0, ErrorCode::parameter, "omega must be nonnegative");
  require(eps0 > 0.0 && mu0 > 0.0, ErrorCode::parameter, "eps0, mu0 must be positive");
  require(eps1.real() > 0.0 && eps1.imag() >= 0.0, ErrorCode::parameter,
          "eps1 must have Re > 0 and Im >= 0");
  const double k0sq = omega * omega * eps0 * mu0;
  return k0sq * eps1;
}

} // namespace

InclusionCorrector solve_inclusion_corrector(const CellMesh &mesh, double omega,
                                             double eps0, double mu0, cplx eps1) {
  const cplx z = resonance_z(omega, eps0, mu0, eps1);
  InclusionProblem prob(mesh);
  InclusionCorrector c;
  c.omega = omega;
  c.eps1 = eps1;
  c.w = prob.solve(z);
  c.mu_eff = prob.mu_eff(c.w);
  return c;
}

cplx solve_inclusion_resonance(const CellMesh &mesh, double omega, double eps0,
                               double mu0, cplx eps1) {
  return solve_inclusion_corrector(mesh, omega, eps0, mu0, eps1).mu_eff;
}

ResonanceCurve sweep_mu_eff(const CellMesh &mesh, const std::vector<double> &omegas,
                            double eps0, double mu0, cplx eps1, int threads) {
  for (std::size_t i = 1; i < omegas.size(); ++i)
    require(omegas[i] > omegas[i - 1], ErrorCode::parameter,
            "omega grid must be strictly increasing");
  resonance_z(0.0, eps0, mu0, eps1);

  const InclusionProblem prob(mesh);
  if (eps1.imag() == 0.0 && prob.num_dofs() > 0)
    prob.dirichlet_eigenvalues(); // fill the cache before sharing across workers

  ResonanceCurve curve(omegas.size());
  auto work = [&](std::size_t i) {
    ResonanceSample &s = curve[i];
    s.omega = omegas[i];
    s.k0 = omegas[i] * std::sqrt(eps0 * mu0);
    try {
      s.mu_eff = prob.mu_eff(prob.solve(resonance_z(omegas[i], eps0, mu0, eps1)));
    } catch (const Error &e) {
      s.failed = true;
      s.mu_eff = cplx{std::nan(""), std::nan("")};
      s.message = e.what();
    }
  };

  const int nworkers =
      std::max(1, std::min<int>(threads, static_cast<int>(omegas.size())));
  if (nworkers == 1) {
    for (std::size_t i = 0; i < omegas.size(); ++i)
      work(i);
    return curve;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < nworkers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < omegas.size(); i += nworkers)
        work(i);
    });
  pool.clear();
  return curve;
}

} // namespace metawave

#include "core/mesh.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace metawave {

namespace {

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

// Inclusion edges must sit on grid lines of an n-per-unit grid.
void require_fitted(const Microstructure &m, int n, const char *what) {
  if (m.empty())
    return;
  require(m.variant == ShapeVariant::square || m.id == GeometryId::sigma3,
          ErrorCode::geometry,
          std::string(what) + ": round inclusions cannot be meshed conformingly; "
                              "use the square variant");
  require(is_integer((0.5 - m.r) * n) && is_integer((0.5 + m.r) * n),
          ErrorCode::parameter,
          std::string(what) + ": inclusion boundary at 1/2 +- r is not aligned "
                              "with the grid");
}

} // namespace

Point2 TriMesh::barycenter(int t) const {
  const auto &v = tris[t];
  return {(nodes[v[0]].x1 + nodes[v[1]].x1 + nodes[v[2]].x1) / 3.0,
          (nodes[v[0]].x2 + nodes[v[1]].x2 + nodes[v[2]].x2) / 3.0};
}

int TriMesh::count_metal() const {
  return static_cast<int>(std::count(metal.begin(), metal.end(), std::uint8_t{1}));
}

TriMesh::Location TriMesh::locate(Point2 x) const {
  double s = (x.x1 - x0) / hx;
  double t = (x.x2 - y0) / hy;
  int i = std::clamp(static_cast<int>(std::floor(s)), 0, nx - 1);
  int j = std::clamp(static_cast<int>(std::floor(t)), 0, ny - 1);
  s = std::clamp(s - i, 0.0, 1.0);
  t = std::clamp(t - j, 0.0, 1.0);
  const int q = j * nx + i;
  if (s >= t) // lower: (0,0) (1,0) (1,1)
    return {2 * q, {1.0 - s, s - t, t}};
  // upper: (0,0) (1,1) (0,1)
  return {2 * q + 1, {1.0 - t, s, t - s}};
}

TriMesh make_structured_mesh(int nx, int ny, double x0, double y0, double hx,
                             double hy) {
  require(nx > 0 && ny > 0, ErrorCode::parameter, "mesh needs at least one cell");
  TriMesh m;
  m.nx = nx;
  m.ny = ny;
  m.x0 = x0;
  m.y0 = y0;
  m.hx = hx;
  m.hy = hy;
  m.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes.push_back({x0 + i * hx, y0 + j * hy});
  m.tris.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = m.node_index(i, j), b = m.node_index(i + 1, j),
                c = m.node_index(i + 1, j + 1), d = m.node_index(i, j + 1);
      m.tris.push_back({a, b, c});
      m.tris.push_back({a, c, d});
    }
  m.metal.assign(m.tris.size(), 0);
  return m;
}

std::vector<CellMesh::NodePair> CellMesh::periodic_pairs(int axis) const {
  std::vector<NodePair> out;
  for (int k = 0; k <= n; ++k) {
    if (axis == 0)
      out.push_back({mesh.node_index(n, k), mesh.node_index(0, k)});
    else
      out.push_back({mesh.node_index(k, n), mesh.node_index(k, 0)});
  }
  return out;
}

CellMesh build_cell_mesh(const Microstructure &m, int n) {
  require(n >= 4 && n % 4 == 0, ErrorCode::parameter,
          "cell resolution n must be a positive multiple of 4");
  require_fitted(m, n, "cell mesh");

  CellMesh cm;
  cm.micro = m;
  cm.n = n;
  const double h = 1.0 / n;
  cm.mesh = make_structured_mesh(n, n, 0.0, 0.0, h, h);
  for (int t = 0; t < cm.mesh.num_tris(); ++t)
    cm.mesh.metal[t] = m.is_metal(cm.mesh.barycenter(t)) ? 1 : 0;

  cm.master.resize(cm.mesh.nodes.size());
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      cm.master[cm.mesh.node_index(i, j)] = cm.mesh.node_index(i % n, j % n);
  return cm;
}

namespace {

std::vector<BoundaryEdge> rectangle_boundary(const TriMesh &m) {
  std::vector<BoundaryEdge> edges;
  for (int i = 0; i < m.nx; ++i) {
    edges.push_back({m.node_index(i, 0), m.node_index(i + 1, 0), 0.0, -1.0});
    edges.push_back({m.node_index(i, m.ny), m.node_index(i + 1, m.ny), 0.0, 1.0});
  }
  for (int j = 0; j < m.ny; ++j) {
    edges.push_back({m.node_index(0, j), m.node_index(0, j + 1), -1.0, 0.0});
    edges.push_back({m.node_index(m.nx, j), m.node_index(m.nx, j + 1), 1.0, 0.0});
  }
  return edges;
}

DomainMesh unit_square_mesh(const MacroDomain &domain, int n, std::size_t node_cap) {
  const std::size_t nodes = static_cast<std::size_t>(n + 1) * (n + 1);
  if (nodes > node_cap)
    fail(ErrorCode::resource, "domain mesh would have " + std::to_string(nodes) +
                                  " nodes, above the cap of " +
                                  std::to_string(node_cap));
  require(is_integer(domain.qm_lo * n) && is_integer(domain.qm_hi * n),
          ErrorCode::parameter, "Q_M bounds are not aligned with the mesh");
  DomainMesh dm;
  dm.domain = domain;
  dm.h = 1.0 / n;
  dm.mesh = make_structured_mesh(n, n, 0.0, 0.0, dm.h, dm.h);
  dm.boundary = rectangle_boundary(dm.mesh);
  dm.in_slab.resize(dm.mesh.tris.size());
  for (int t = 0; t < dm.mesh.num_tris(); ++t)
    dm.in_slab[t] = domain.in_slab(dm.mesh.barycenter(t)) ? 1 : 0;
  return dm;
}

} // namespace

DomainMesh build_domain_mesh(const MacroDomain &domain, const Microstructure &m,
                             int cells_per_eta, std::size_t node_cap) {
  require(cells_per_eta >= 4 && cells_per_eta % 4 == 0, ErrorCode::parameter,
          "cells_per_eta must be a multiple of 4 and at least 4");
  require_fitted(m, cells_per_eta, "domain mesh");
  const double n_real = cells_per_eta / domain.eta;
  require(is_integer(n_real), ErrorCode::parameter,
          "cells_per_eta / eta must be an integer");
  DomainMesh dm = unit_square_mesh(domain, static_cast<int>(std::lround(n_real)),
                                   node_cap);
  dm.micro = m;
  dm.cells_per_eta = cells_per_eta;
  const PermittivityField field{cplx{1.0, 1.0}, domain, m};
  for (int t = 0; t < dm.mesh.num_tris(); ++t)
    dm.mesh.metal[t] = field.in_scatterer(dm.mesh.barycenter(t)) ? 1 : 0;
  return dm;
}

DomainMesh build_macro_mesh(const MacroDomain &domain, int n, std::size_t node_cap) {
  require(n >= 4, ErrorCode::parameter, "macro mesh needs n >= 4");
  DomainMesh dm = unit_square_mesh(domain, n, node_cap);
  dm.micro = empty_microstructure();
  return dm;
}

} // namespace metawave

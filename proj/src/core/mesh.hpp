#pragma once

#include "core/geometry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace metawave {

/// Structured triangulation of an axis-aligned rectangle. Square (i, j)
/// is split along its (i,j)-(i+1,j+1) diagonal into triangles 2q and
/// 2q+1 with q = j*nx + i; both are counter-clockwise.
struct TriMesh {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double hx = 0.0;
  double hy = 0.0;
  std::vector<Point2> nodes;
  std::vector<std::array<int, 3>> tris;
  /// Per-triangle material tag: 1 = metal/inclusion, 0 = air.
  std::vector<std::uint8_t> metal;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_tris() const { return static_cast<int>(tris.size()); }
  int node_index(int i, int j) const { return j * (nx + 1) + i; }
  Point2 barycenter(int t) const;
  double tri_area() const { return 0.5 * hx * hy; }
  int count_metal() const;

  struct Location {
    int tri;
    std::array<double, 3> bary;
  };
  /// Triangle containing x (clamped to the rectangle) and barycentric
  /// weights of its three vertices.
  Location locate(Point2 x) const;
};

TriMesh make_structured_mesh(int nx, int ny, double x0, double y0, double hx,
                             double hy);

/// Evaluates a P1 field at x by linear interpolation.
template <class Vec> auto interpolate(const TriMesh &m, const Vec &u, Point2 x) {
  const auto loc = m.locate(x);
  const auto &t = m.tris[loc.tri];
  return loc.bary[0] * u[t[0]] + loc.bary[1] * u[t[1]] + loc.bary[2] * u[t[2]];
}

/// Unit cell [0,1]^2 meshed with n x n squares, fitted to a square-base
/// microstructure.
struct CellMesh {
  TriMesh mesh;
  Microstructure micro;
  int n = 0;
  /// master[v] is the representative of v's periodic equivalence class;
  /// nodes with i == n or j == n map onto i == 0 or j == 0.
  std::vector<int> master;

  struct NodePair {
    int slave;
    int master;
  };
  /// Node pairs (x=1 -> x=0) for axis 0 and (y=1 -> y=0) for axis 1.
  std::vector<NodePair> periodic_pairs(int axis) const;
  /// Boundary edge pairs per axis; n each.
  int periodic_edge_pairs(int axis) const { return axis == 0 || axis == 1 ? n : 0; }
};

CellMesh build_cell_mesh(const Microstructure &m, int n);

/// Boundary edge of the macro rectangle with outward unit normal.
struct BoundaryEdge {
  int a;
  int b;
  double nx;
  double ny;
};

/// Structured mesh of (0,1)^2 resolving the eta-periodic scatterer.
struct DomainMesh {
  TriMesh mesh;
  MacroDomain domain;
  Microstructure micro;
  int cells_per_eta = 0;
  double h = 0.0;
  std::vector<BoundaryEdge> boundary;
  /// Triangles inside Q_M (barycenter test).
  std::vector<std::uint8_t> in_slab;
};

constexpr std::size_t default_node_cap = 2'000'000;

DomainMesh build_domain_mesh(const MacroDomain &domain, const Microstructure &m,
                             int cells_per_eta,
                             std::size_t node_cap = default_node_cap);

/// Mesh of (0,1)^2 with n x n squares and no microstructure tags; used for
/// the homogenised macro problem.
DomainMesh build_macro_mesh(const MacroDomain &domain, int n,
                            std::size_t node_cap = default_node_cap);

} // namespace metawave

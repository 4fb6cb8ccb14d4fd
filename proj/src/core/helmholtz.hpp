#pragma once

#include "core/fem.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace metawave {

enum class FieldMode { e_parallel, h_parallel, homogenized };

std::string_view to_string(FieldMode m);
FieldMode parse_field_mode(std::string_view s);

/// Unit-amplitude plane wave exp(i k0 d.x); the default travels along -e1.
struct IncidentWave {
  double k0 = 12.0;
  double d1 = -1.0;
  double d2 = 0.0;

  cplx value(Point2 x) const;
};

IncidentWave make_incident_wave(double k0, double d1 = -1.0, double d2 = 0.0);

struct Units {
  double eps0 = 1.0;
  double mu0 = 1.0;
};

/// Treatment of the lateral sides x2 = 0 and x2 = 1. `periodic` identifies
/// them (exact for a laterally periodic slab under normal incidence);
/// `impedance` applies the absorbing condition on the whole boundary.
enum class LateralBoundary { periodic, impedance };

std::string_view to_string(LateralBoundary b);
LateralBoundary parse_lateral_boundary(std::string_view s);

struct SolveOptions {
  Units units;
  LateralBoundary lateral = LateralBoundary::periodic;
};

/// Axis-aligned rectangle used for norms and comparisons.
struct Region {
  double x1_lo = 0.0;
  double x1_hi = 1.0;
  double x2_lo = 0.0;
  double x2_hi = 1.0;

  bool contains(Point2 x) const {
    return x.x1 >= x1_lo && x.x1 <= x1_hi && x.x2 >= x2_lo && x.x2 <= x2_hi;
  }
};

struct FieldSolution {
  std::shared_ptr<const DomainMesh> mesh;
  VecC u;
  FieldMode mode = FieldMode::e_parallel;
  double omega = 0.0;
  double k0 = 0.0;
  double eta = 0.0;
  cplx eps1;
  LateralBoundary lateral = LateralBoundary::periodic;
  double residual = 0.0;
  std::vector<std::string> warnings;
};

/// Per-triangle coefficients of a(x) grad u . grad v - k0^2 c(x) u v.
struct TriangleCoefficients {
  Mat2c a;
  cplx c;
};

using CoefficientFn = std::function<TriangleCoefficients(int tri)>;

struct HelmholtzSystem {
  /// Unknown index of every mesh node (periodic images share one).
  std::vector<int> dof;
  /// Volume part only; complex symmetric.
  SpMatC K_volume;
  /// K_volume plus the impedance boundary term.
  SpMatC K;
  VecC f;
};

/// Galerkin system with the first-order absorbing condition
///   du/dn - i k0 u = g,  g = du_inc/dn - i k0 u_inc,
/// so that the incident wave is exact in a homogeneous medium.
HelmholtzSystem assemble_helmholtz(const DomainMesh &mesh, const CoefficientFn &coeff,
                                   const IncidentWave &wave,
                                   LateralBoundary lateral = LateralBoundary::periodic);

/// Solves the system and scatters the result back to mesh nodes.
VecC solve_helmholtz(const HelmholtzSystem &sys, double tol, double *residual = nullptr);

/// Coefficients of the two planar reductions on a microstructure mesh:
/// (1, eps_eta) for E-parallel and (1/eps_eta, 1) for H-parallel.
CoefficientFn fine_coefficients(const DomainMesh &mesh, FieldMode mode, cplx eps1);

constexpr double fine_residual_tol = 1e-8;
constexpr double pollution_limit = 0.4;

FieldSolution assemble_and_solve(std::shared_ptr<const DomainMesh> mesh, FieldMode mode,
                                 double omega, cplx eps1, const IncidentWave &wave,
                                 const SolveOptions &opts = {});

/// Root-mean-square |u| over the strip x1 in [lo, hi]; the strip must lie
/// left of Q_M. Triangles are attributed by barycenter.
double measure_transmission(const FieldSolution &sol, double lo = 0.05,
                            double hi = 0.20);

/// L2 norm over `region`, optionally restricted to inclusion triangles.
double region_norm(const FieldSolution &sol, const Region &region,
                   bool inclusions_only = false);

/// Relative L2 error against an analytic field (degree-5 quadrature).
double relative_l2_error(const FieldSolution &sol,
                         const std::function<cplx(Point2)> &exact);

} // namespace metawave

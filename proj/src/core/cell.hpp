#pragma once

#include "core/fem.hpp"

#include <Eigen/SparseLU>

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace metawave {

/// Solution of the floating-conductor potential problem in one direction.
struct ConductorPotential {
  /// Periodic part phi on every mesh node; on conductor nodes it equals
  /// c - y_dir with the gauge c = 0.
  VecR phi;
  /// Integral of |grad(phi) + e_dir|^2 over air.
  double energy = 0.0;
  /// Net flux of E = grad(phi) + e_dir into the conductor; vanishes at the
  /// discrete level.
  double conductor_flux = 0.0;
  double residual = 0.0;
};

/// dir: 0 for e1, 1 for e2.
ConductorPotential solve_conductor_potential(const CellMesh &mesh, int dir);

/// Perfect-conductor effective permittivity entry gamma = (eps_eff)_11.
double solve_pc_permittivity(const CellMesh &mesh);

/// Full 3x3 perfect-conductor permeability assembled from the stream
/// function reduction (in-plane block) and the air indicator (33 entry).
Eigen::Matrix3d pc_permeability_tensor(const CellMesh &mesh, double alpha);

/// Diagonal of pc_permeability_tensor.
std::array<double, 3> solve_pc_permeability(const CellMesh &mesh, double alpha);

/// Perforated-cell (Neumann hole) tensor of the air phase.
Eigen::Matrix2d solve_neumann_cell(const CellMesh &mesh);

/// Rotates the scalar diffusion tensor onto the in-plane block of the
/// Maxwell inverse permittivity (u = H3, E along the rotated gradient).
Eigen::Matrix2d maxwell_inverse_permittivity_block(const Eigen::Matrix2d &a_eff);

/// Dirichlet problem on the (periodically wrapped) inclusion,
///   -(1/eps1) Lap w = k0^2 (1 + w),  w = 0 on the inclusion boundary,
/// discretised once and solved for any z = k0^2 eps1 as (K - z M) w = z b.
class InclusionProblem {
public:
  explicit InclusionProblem(const CellMesh &mesh);

  int num_dofs() const { return static_cast<int>(dofs_.size()); }
  /// Representative mesh node of each unknown (interior inclusion nodes,
  /// periodic images merged).
  const std::vector<int> &dofs() const { return dofs_; }

  /// w on every mesh node (zero outside the inclusion interior).
  VecC solve(cplx z) const;
  /// 1 + integral of w over the inclusion.
  cplx mu_eff(const VecC &w_nodal) const;

  /// Generalised eigenvalues of K v = lambda M v, ascending. Computed on
  /// first use.
  const VecR &dirichlet_eigenvalues() const;
  /// M-orthonormal eigenvectors matching dirichlet_eigenvalues().
  const Eigen::MatrixXd &dirichlet_modes() const;
  /// Integral of each hat function over the inclusion.
  const VecR &load() const { return b_; }

private:
  void compute_modes() const;

  const CellMesh *mesh_;
  std::vector<int> dofs_;
  std::vector<int> node_dof_;
  SpMatR K_;
  SpMatR M_;
  VecR b_;
  mutable std::optional<VecR> eig_;
  mutable Eigen::MatrixXd modes_;
};

/// High-contrast effective permeability mu_eff(omega).
cplx solve_inclusion_resonance(const CellMesh &mesh, double omega, double eps0,
                               double mu0, cplx eps1);

struct InclusionCorrector {
  double omega = 0.0;
  cplx eps1;
  cplx mu_eff;
  /// Nodal w on the cell mesh, zero outside the inclusion.
  VecC w;
};

InclusionCorrector solve_inclusion_corrector(const CellMesh &mesh, double omega,
                                             double eps0, double mu0, cplx eps1);

struct ResonanceSample {
  double omega = 0.0;
  double k0 = 0.0;
  cplx mu_eff;
  bool failed = false;
  std::string message;
};

using ResonanceCurve = std::vector<ResonanceSample>;

/// mu_eff over a strictly increasing omega grid. Samples are computed on
/// `threads` workers and stored in grid order; a failing sample is marked
/// and does not abort the sweep.
ResonanceCurve sweep_mu_eff(const CellMesh &mesh, const std::vector<double> &omegas,
                            double eps0, double mu0, cplx eps1, int threads = 1);

struct EffectiveTensors {
  std::optional<double> gamma;
  std::optional<std::array<double, 3>> mu_pc;
  Eigen::Matrix2d A_eff = Eigen::Matrix2d::Identity();
  std::optional<cplx> mu_hc;
};

} // namespace metawave

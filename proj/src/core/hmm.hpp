#pragma once

#include "core/cell.hpp"
#include "core/helmholtz.hpp"

namespace metawave {

/// Effective coefficients of the macro problem inside Q_M; identity and 1
/// outside.
struct HomogenizedModel {
  Eigen::Matrix2d A_eff = Eigen::Matrix2d::Identity();
  cplx mu_eff{1.0, 0.0};
  /// Inclusion permittivity the model was computed for (0 when the model
  /// carries no inclusion corrector).
  cplx eps1{0.0, 0.0};
};

/// Checks A_eff symmetric positive semidefinite and mu_eff finite.
HomogenizedModel make_homogenized_model(const Eigen::Matrix2d &A_eff, cplx mu_eff,
                                        cplx eps1 = {0.0, 0.0});

constexpr int default_macro_n = 32;
constexpr double degenerate_floor = 1e-8;

/// Coarse solve of div(a grad u) + k0^2 c u = 0 with (a, c) = (A_eff, mu_eff)
/// in Q_M. The macro mesh depends only on `macro_n`, not on eta.
FieldSolution homogenized_solve(const MacroDomain &domain, const HomogenizedModel &model,
                                double omega, const IncidentWave &wave,
                                int macro_n = default_macro_n,
                                const SolveOptions &opts = {});

/// u0(x) = u_hat(x) (1 + w({x/eta})) inside Q_M and u_hat(x) elsewhere,
/// sampled on the nodes of `fine`.
FieldSolution reconstruct_zeroth_order(const FieldSolution &macro,
                                       const InclusionCorrector &corrector,
                                       const CellMesh &cell,
                                       std::shared_ptr<const DomainMesh> fine);

/// Relative L2 difference ||a - b|| / ||b|| over `region`, evaluated on the
/// finer of the two meshes after linear interpolation.
double compare_fields(const FieldSolution &a, const FieldSolution &b,
                      const Region &region);

} // namespace metawave

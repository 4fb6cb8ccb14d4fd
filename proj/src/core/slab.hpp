#pragma once

#include "core/geometry.hpp"

#include <array>

namespace metawave {

/// Effective perfect-conductor slab occupying x1 in (-L, 0), normal
/// incidence from the right, time convention exp(-i omega t).
struct SlabParams {
  double omega = 12.0;
  double eps0 = 1.0;
  double mu0 = 1.0;
  double L = 0.5;
  double alpha = 0.75;
  cplx gamma{1.0, 0.0};

  double k0() const;
};

struct CoefficientSet {
  cplx R;
  cplx T;
  cplx R_M;
  cplx T_M;
};

/// Interior wavenumber k_M, flux weight a_M = k_M / (k0 mu_M) and relative
/// permeability mu_M seen by H = H3 e3 inside the slab.
struct SlabMedium {
  cplx k_M;
  cplx a_M;
  cplx mu_M;
};

/// Principal complex square root (nonnegative real part).
cplx principal_sqrt(cplx z);

SlabMedium slab_medium(GeometryId id, const SlabParams &p);

/// Reflection/transmission coefficients from the closed-form expressions
/// for each microstructure. Sigma4 is the fully reflecting (-1, 0, 0, 0).
/// Throws ErrorCode::degenerate when the Fabry-Perot denominator is
/// numerically zero.
CoefficientSet closed_form_coeffs(GeometryId id, const SlabParams &p);

/// Independent route to the same coefficients: assembles tangential-E and
/// weighted-flux continuity at x1 = 0 and x1 = -L as a 4x4 complex system
/// in (R, T, T_M, R_M) and solves it by Gaussian elimination.
CoefficientSet interface_matching_oracle(cplx a_M, cplx k_M, double k0, double L);

using CVec3 = std::array<cplx, 3>;

struct FieldSample {
  CVec3 E;
  CVec3 H;
};

/// Piecewise plane-wave fields of the effective model at position x1.
/// E is polarised along e2 and H along e3.
FieldSample field_ansatz_eval(GeometryId id, const SlabParams &p,
                              const CoefficientSet &c, double x1);

} // namespace metawave

#pragma once

#include <array>
#include <complex>
#include <set>
#include <string>
#include <string_view>

namespace metawave {

using cplx = std::complex<double>;

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

enum class GeometryId { sigma1, sigma2, sigma3, sigma4 };
enum class ShapeVariant { round, square };

std::string_view to_string(GeometryId id);
std::string_view to_string(ShapeVariant v);
GeometryId parse_geometry(std::string_view s);
ShapeVariant parse_variant(std::string_view s);

/// Topological index sets of a microstructure: directions in which the
/// metal has no connecting loop (N_sigma), directions in which it has one
/// (L_sigma), and directions without an air loop (N_air).
struct IndexSets {
  std::set<int> n_sigma;
  std::set<int> l_sigma;
  std::set<int> n_air;

  bool operator==(const IndexSets &) const = default;
};

IndexSets index_sets(GeometryId id);

/// One periodicity cell Y. In-plane coordinates are taken on [0,1)^2 with
/// the inclusion centred at (1/2, 1/2).
///
/// The 2D cross-section used by the FEM modules is the (y1, y2) plane.
/// Sigma1 and Sigma3 are x3-invariant and map directly. Sigma2 and Sigma4
/// have their axis along e1; their planar stand-ins are the same shapes
/// turned onto the e3 axis, i.e. Sigma2 looks like Sigma1 and Sigma4 is a
/// metal matrix with a centred air hole. `rotated` swaps y1 and y2, which
/// only changes anything for the plate.
struct Microstructure {
  GeometryId id = GeometryId::sigma1;
  ShapeVariant variant = ShapeVariant::square;
  double r = 0.25;
  bool rotated = false;
  double alpha = 0.75;
  IndexSets sets;

  /// Metal indicator of the planar cross-section. Boundaries follow
  /// half-open intervals [lo, hi).
  bool is_metal(double y1, double y2) const;
  bool is_metal(Point2 y) const { return is_metal(y.x1, y.x2); }

  /// True when the metal region touches the cell boundary.
  bool metal_touches_boundary() const;
  bool empty() const { return r <= 0.0; }
};

Microstructure make_microstructure(GeometryId id, ShapeVariant variant, double r,
                                   bool rotated = false);

/// A cell with no inclusion at all; used for the homogeneous reference.
Microstructure empty_microstructure();

/// Computational rectangle (0,1)^2 with the meta-material slab Q_M
/// occupying x1 in [qm_lo, qm_hi) and tiled by eta-cells anchored at
/// (qm_lo, 0).
struct MacroDomain {
  double qm_lo = 0.25;
  double qm_hi = 0.75;
  double eta = 0.125;

  double slab_width() const { return qm_hi - qm_lo; }
  bool in_slab(Point2 x) const { return x.x1 >= qm_lo && x.x1 < qm_hi; }
  /// Local coordinate inside the eta-cell containing x, in [0,1)^2.
  Point2 cell_coordinate(Point2 x) const;
};

MacroDomain make_macro_domain(double qm_lo, double qm_hi, double eta);

/// True if `eta` is 2^-k for some k >= 0.
bool is_reciprocal_power_of_two(double eta);

/// High-contrast permittivity: eps1 / eta^2 inside the scatterer, 1 elsewhere.
struct PermittivityField {
  cplx eps1{1.0, 0.0};
  MacroDomain domain;
  Microstructure micro;

  bool in_scatterer(Point2 x) const;
  cplx inclusion_value() const { return eps1 / (domain.eta * domain.eta); }
};

PermittivityField make_permittivity_field(cplx eps1, const MacroDomain &domain,
                                          const Microstructure &micro);

cplx permittivity_at(const PermittivityField &field, Point2 x);

} // namespace metawave

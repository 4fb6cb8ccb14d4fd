#include "core/geometry.hpp"

#include "core/error.hpp"

#include <cmath>
#include <numbers>

namespace metawave {

std::string_view to_string(GeometryId id) {
  switch (id) {
  case GeometryId::sigma1:
    return "sigma1";
  case GeometryId::sigma2:
    return "sigma2";
  case GeometryId::sigma3:
    return "sigma3";
  case GeometryId::sigma4:
    return "sigma4";
  }
  return "?";
}

std::string_view to_string(ShapeVariant v) {
  return v == ShapeVariant::round ? "round" : "square";
}

GeometryId parse_geometry(std::string_view s) {
  if (s == "sigma1")
    return GeometryId::sigma1;
  if (s == "sigma2")
    return GeometryId::sigma2;
  if (s == "sigma3")
    return GeometryId::sigma3;
  if (s == "sigma4")
    return GeometryId::sigma4;
  fail(ErrorCode::parameter, "unknown geometry '" + std::string(s) +
                                 "' (expected sigma1..sigma4)");
}

ShapeVariant parse_variant(std::string_view s) {
  if (s == "round")
    return ShapeVariant::round;
  if (s == "square" || s == "square-base")
    return ShapeVariant::square;
  fail(ErrorCode::parameter,
       "unknown variant '" + std::string(s) + "' (expected round or square)");
}

IndexSets index_sets(GeometryId id) {
  switch (id) {
  case GeometryId::sigma1:
    return {{1, 2}, {3}, {}};
  case GeometryId::sigma2:
    return {{2, 3}, {1}, {}};
  case GeometryId::sigma3:
    return {{2}, {1, 3}, {2}};
  case GeometryId::sigma4:
    return {{}, {1, 2, 3}, {2, 3}};
  }
  return {};
}

namespace {

bool in_half_open(double v, double lo, double hi) { return v >= lo && v < hi; }

// Centred shape membership: square [1/2-r, 1/2+r)^2 or open disc.
bool in_core(double y1, double y2, double r, ShapeVariant variant) {
  if (variant == ShapeVariant::square)
    return in_half_open(y1, 0.5 - r, 0.5 + r) && in_half_open(y2, 0.5 - r, 0.5 + r);
  const double d1 = y1 - 0.5, d2 = y2 - 0.5;
  return d1 * d1 + d2 * d2 < r * r;
}

} // namespace

bool Microstructure::is_metal(double y1, double y2) const {
  if (r <= 0.0)
    return false;
  if (rotated)
    std::swap(y1, y2);
  switch (id) {
  case GeometryId::sigma1:
  case GeometryId::sigma2:
    return in_core(y1, y2, r, variant);
  case GeometryId::sigma3:
    return in_half_open(y2, 0.5 - r, 0.5 + r);
  case GeometryId::sigma4:
    return !in_core(y1, y2, r, variant);
  }
  return false;
}

bool Microstructure::metal_touches_boundary() const {
  if (r <= 0.0)
    return false;
  return id == GeometryId::sigma3 || id == GeometryId::sigma4;
}

Microstructure make_microstructure(GeometryId id, ShapeVariant variant, double r,
                                   bool rotated) {
  require(r > 0.0 && r < 0.5, ErrorCode::parameter,
          "r must lie in (0, 1/2), got " + std::to_string(r));
  Microstructure m;
  m.id = id;
  m.variant = variant;
  m.r = r;
  m.rotated = rotated;
  m.sets = index_sets(id);

  const double core_area =
      variant == ShapeVariant::square ? 4.0 * r * r : std::numbers::pi * r * r;
  switch (id) {
  case GeometryId::sigma1:
  case GeometryId::sigma2:
    m.alpha = 1.0 - core_area;
    break;
  case GeometryId::sigma3:
    m.alpha = 1.0 - 2.0 * r;
    break;
  case GeometryId::sigma4:
    m.alpha = core_area;
    break;
  }
  return m;
}

Microstructure empty_microstructure() {
  Microstructure m;
  m.r = 0.0;
  m.alpha = 1.0;
  m.sets = index_sets(GeometryId::sigma1);
  return m;
}

bool is_reciprocal_power_of_two(double eta) {
  if (!(eta > 0.0) || eta > 1.0)
    return false;
  int exp = 0;
  const double mant = std::frexp(eta, &exp);
  return mant == 0.5;
}

MacroDomain make_macro_domain(double qm_lo, double qm_hi, double eta) {
  require(qm_lo > 0.0 && qm_hi < 1.0 && qm_lo < qm_hi, ErrorCode::parameter,
          "qm must satisfy 0 < lo < hi < 1");
  require(is_reciprocal_power_of_two(eta), ErrorCode::parameter,
          "eta must be a reciprocal power of two dividing |Q_M|");
  const double cells = (qm_hi - qm_lo) / eta;
  require(std::abs(cells - std::round(cells)) < 1e-9 && std::round(cells) >= 1,
          ErrorCode::parameter,
          "eta must be a reciprocal power of two dividing |Q_M|");
  return MacroDomain{qm_lo, qm_hi, eta};
}

Point2 MacroDomain::cell_coordinate(Point2 x) const {
  const double s1 = (x.x1 - qm_lo) / eta;
  const double s2 = x.x2 / eta;
  return {s1 - std::floor(s1), s2 - std::floor(s2)};
}

PermittivityField make_permittivity_field(cplx eps1, const MacroDomain &domain,
                                          const Microstructure &micro) {
  require(eps1.real() > 0.0 && eps1.imag() > 0.0, ErrorCode::parameter,
          "eps1 must have Re > 0 and Im > 0");
  return PermittivityField{eps1, domain, micro};
}

bool PermittivityField::in_scatterer(Point2 x) const {
  if (!domain.in_slab(x))
    return false;
  return micro.is_metal(domain.cell_coordinate(x));
}

cplx permittivity_at(const PermittivityField &field, Point2 x) {
  return field.in_scatterer(x) ? field.inclusion_value() : cplx{1.0, 0.0};
}

} // namespace metawave

#include "core/slab.hpp"

#include "core/error.hpp"

#include <cmath>
#include <utility>

namespace metawave {

namespace {

constexpr double degenerate_tol = 1e-14;
constexpr cplx I{0.0, 1.0};

void check_params(const SlabParams &p) {
  require(p.omega > 0.0 && p.eps0 > 0.0 && p.mu0 > 0.0, ErrorCode::parameter,
          "omega, eps0 and mu0 must be positive");
  require(p.L >= 0.0, ErrorCode::parameter, "slab width L must be nonnegative");
  require(p.alpha > 0.0 && p.alpha <= 1.0, ErrorCode::parameter,
          "alpha must lie in (0, 1]");
}

// Shared structure of the three closed forms:
//   D = (s^2 + t^2)(1 - p^2) + 2 s t (1 + p^2)
// with (s, t) = (sqrt(alpha), sqrt(gamma)) for Sigma1, (1, sqrt(gamma)) for
// Sigma2 and (alpha, 1) for Sigma3 after clearing the 1/alpha weight.
cplx check_denominator(cplx d) {
  if (std::abs(d) < degenerate_tol)
    fail(ErrorCode::degenerate,
         "Fabry-Perot denominator vanishes for this slab configuration");
  return d;
}

} // namespace

double SlabParams::k0() const { return omega * std::sqrt(eps0 * mu0); }

cplx principal_sqrt(cplx z) {
  cplx s = std::sqrt(z);
  if (s.real() < 0.0 || (s.real() == 0.0 && s.imag() < 0.0))
    s = -s;
  return s;
}

SlabMedium slab_medium(GeometryId id, const SlabParams &p) {
  const double k0 = p.k0();
  switch (id) {
  case GeometryId::sigma1: {
    const cplx k = k0 * principal_sqrt(p.alpha * p.gamma);
    return {k, principal_sqrt(p.gamma / p.alpha), p.alpha};
  }
  case GeometryId::sigma2: {
    const cplx sg = principal_sqrt(p.gamma);
    return {k0 * sg, sg, 1.0};
  }
  case GeometryId::sigma3:
    return {k0, 1.0 / p.alpha, p.alpha};
  case GeometryId::sigma4:
    return {0.0, 0.0, 1.0};
  }
  return {};
}

CoefficientSet closed_form_coeffs(GeometryId id, const SlabParams &p) {
  check_params(p);
  const double k0 = p.k0();
  const double L = p.L;

  switch (id) {
  case GeometryId::sigma1: {
    const cplx sa = std::sqrt(p.alpha);
    const cplx sg = principal_sqrt(p.gamma);
    const cplx sag = principal_sqrt(p.alpha * p.gamma);
    const cplx p1 = std::exp(I * k0 * sag * L);
    const cplx p1sq = p1 * p1;
    const cplx D = check_denominator((p.alpha + p.gamma) * (1.0 - p1sq) +
                                     2.0 * sag * (1.0 + p1sq));
    return {(p.alpha - p.gamma) * (1.0 - p1sq) / D, 4.0 * sag * p1 / D,
            -2.0 * sa * p1sq * (sa - sg) / D, 2.0 * sa * (sa + sg) / D};
  }
  case GeometryId::sigma2: {
    const cplx sg = principal_sqrt(p.gamma);
    const cplx p2 = std::exp(I * k0 * sg * L);
    const cplx p2sq = p2 * p2;
    const cplx D = check_denominator((1.0 + p.gamma) * (1.0 - p2sq) +
                                     2.0 * sg * (1.0 + p2sq));
    return {(1.0 - p.gamma) * (1.0 - p2sq) / D, 4.0 * p2 * sg / D,
            -2.0 * p2sq * (1.0 - sg) / D, 2.0 * (1.0 + sg) / D};
  }
  case GeometryId::sigma3: {
    const double a = p.alpha;
    const cplx p0 = std::exp(I * k0 * L);
    const cplx p0sq = p0 * p0;
    const cplx D = check_denominator((1.0 + a * a) * (1.0 - p0sq) +
                                     2.0 * a * (1.0 + p0sq));
    return {(a * a - 1.0) * (1.0 - p0sq) / D, 4.0 * p0 * a / D,
            -2.0 * a * p0sq * (a - 1.0) / D, 2.0 * a * (a + 1.0) / D};
  }
  case GeometryId::sigma4:
    return {-1.0, 0.0, 0.0, 0.0};
  }
  return {};
}

CoefficientSet interface_matching_oracle(cplx a_M, cplx k_M, double k0, double L) {
  require(k0 > 0.0 && L > 0.0, ErrorCode::parameter, "k0 and L must be positive");
  require(std::abs(k_M) > 0.0, ErrorCode::parameter, "k_M must be nonzero");

  const cplx p = std::exp(I * k_M * L);
  const cplx ip = 1.0 / p;

  // Unknown order: R, T, T_M, R_M.
  //   E at x1 = 0 :   T_M + R_M - R = 1
  //   H at x1 = 0 :   a (T_M - R_M) + R = 1
  //   E at x1 = -L:   p T_M + R_M / p - T = 0
  //   H at x1 = -L:   a (p T_M - R_M / p) - T = 0
  std::array<std::array<cplx, 5>, 4> m{{
      {{-1.0, 0.0, 1.0, 1.0, 1.0}},
      {{1.0, 0.0, a_M, -a_M, 1.0}},
      {{0.0, -1.0, p, ip, 0.0}},
      {{0.0, -1.0, a_M * p, -a_M * ip, 0.0}},
  }};

  double scale = 0.0;
  for (const auto &row : m)
    for (int j = 0; j < 4; ++j)
      scale = std::max(scale, std::abs(row[j]));

  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col]))
        piv = r;
    if (std::abs(m[piv][col]) < degenerate_tol * scale)
      fail(ErrorCode::degenerate, "interface system is singular");
    std::swap(m[col], m[piv]);
    for (int r = col + 1; r < 4; ++r) {
      const cplx f = m[r][col] / m[col][col];
      for (int j = col; j < 5; ++j)
        m[r][j] -= f * m[col][j];
    }
  }
  std::array<cplx, 4> x{};
  for (int r = 3; r >= 0; --r) {
    cplx s = m[r][4];
    for (int j = r + 1; j < 4; ++j)
      s -= m[r][j] * x[j];
    x[r] = s / m[r][r];
  }
  return {x[0], x[1], x[3], x[2]};
}

FieldSample field_ansatz_eval(GeometryId id, const SlabParams &p,
                              const CoefficientSet &c, double x1) {
  const double k0 = p.k0();
  const double wmu = p.omega * p.mu0;
  FieldSample f{};
  if (x1 >= 0.0) {
    const cplx in = std::exp(-I * k0 * x1), out = std::exp(I * k0 * x1);
    f.E[1] = in + c.R * out;
    f.H[2] = -(k0 / wmu) * (in - c.R * out);
  } else if (x1 > -p.L) {
    if (id == GeometryId::sigma4)
      return f;
    const SlabMedium med = slab_medium(id, p);
    const cplx in = std::exp(-I * med.k_M * x1), out = std::exp(I * med.k_M * x1);
    f.E[1] = c.T_M * in + c.R_M * out;
    f.H[2] = -(med.k_M / (wmu * med.mu_M)) * (c.T_M * in - c.R_M * out);
  } else {
    const cplx t = c.T * std::exp(-I * k0 * (x1 + p.L));
    f.E[1] = t;
    f.H[2] = -(k0 / wmu) * t;
  }
  return f;
}

} // namespace metawave

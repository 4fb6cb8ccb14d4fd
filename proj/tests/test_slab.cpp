#include "doctest.h"

#include "core/error.hpp"
#include "core/runner.hpp"
#include "core/slab.hpp"

#include <cmath>
#include <random>

using namespace metawave;

namespace {

constexpr cplx I{0.0, 1.0};

// Transfer-matrix route: propagate (E, flux) from x1 = -L to x1 = 0 with
// [[cos kL, -(i/a) sin kL], [-i a sin kL, cos kL]] and match to the
// incident/reflected pair on the right.
CoefficientSet transfer_matrix(cplx a, cplx k, double L) {
  const cplx c = std::cos(k * L), s = std::sin(k * L);
  const cplx T = 2.0 / (2.0 * c - I * (a + 1.0 / a) * s);
  const cplx R = T * (c - I / a * s) - 1.0;
  return {R, T, ((1.0 + R) - (1.0 - R) / a) / 2.0, ((1.0 + R) + (1.0 - R) / a) / 2.0};
}

double max_dev(const CoefficientSet &a, const CoefficientSet &b) {
  return std::max({std::abs(a.R - b.R), std::abs(a.T - b.T), std::abs(a.R_M - b.R_M),
                   std::abs(a.T_M - b.T_M)});
}

SlabParams params(double alpha, double gamma, double k0, double L) {
  SlabParams p;
  p.alpha = alpha;
  p.gamma = gamma;
  p.omega = k0;
  p.L = L;
  return p;
}

ErrorCode code_of(auto &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::solver;
}

} // namespace

TEST_CASE("principal square root") {
  CHECK(principal_sqrt(cplx{-4.0, 0.0}) == cplx{0.0, 2.0});
  CHECK(principal_sqrt(cplx{-4.0, -0.0}).real() >= 0.0);
  CHECK(principal_sqrt(cplx{-1.0, -1e-3}).real() > 0.0);
  CHECK(std::abs(principal_sqrt(cplx{4.0, 0.0}) - 2.0) < 1e-15);
}

TEST_CASE("sigma4 reflects totally and carries no field in the slab") {
  const SlabParams p = params(0.3, 2.0, 12.0, 0.5);
  const CoefficientSet c = closed_form_coeffs(GeometryId::sigma4, p);
  CHECK(c.R == cplx{-1.0, 0.0});
  CHECK(c.T == cplx{0.0, 0.0});
  CHECK(c.R_M == cplx{0.0, 0.0});
  CHECK(c.T_M == cplx{0.0, 0.0});
  for (double x : {-0.1, -0.25, -0.49}) {
    const FieldSample f = field_ansatz_eval(GeometryId::sigma4, p, c, x);
    CHECK(std::abs(f.E[1]) == 0.0);
    CHECK(std::abs(f.H[2]) == 0.0);
  }
}

TEST_CASE("zero-width slab is transparent") {
  for (GeometryId id : {GeometryId::sigma1, GeometryId::sigma2, GeometryId::sigma3}) {
    const CoefficientSet c = closed_form_coeffs(id, params(0.6, 2.5, 7.0, 0.0));
    CHECK(std::abs(c.R) < 1e-15);
    CHECK(std::abs(c.T - 1.0) < 1e-15);
  }
}

TEST_CASE("impedance-matched sigma1 slab only delays the wave") {
  const SlabParams p = params(0.6, 0.6, 9.0, 0.4);
  const CoefficientSet c = closed_form_coeffs(GeometryId::sigma1, p);
  const cplx p1 = std::exp(I * 9.0 * 0.6 * 0.4);
  CHECK(std::abs(c.R) < 1e-14);
  CHECK(std::abs(c.T - p1) < 1e-14);
}

TEST_CASE("closed forms agree with the 4x4 interface system") {
  SUBCASE("sigma1 reference point") {
    const SlabParams p = params(0.75, 1.5, 12.0, 0.5);
    CHECK(max_dev(closed_form_coeffs(GeometryId::sigma1, p),
                  oracle_coeffs(GeometryId::sigma1, p)) < 1e-10);
  }
  SUBCASE("sigma2") {
    const SlabParams p = params(0.75, 1.5, 12.0, 0.5);
    CHECK(max_dev(closed_form_coeffs(GeometryId::sigma2, p),
                  oracle_coeffs(GeometryId::sigma2, p)) < 1e-10);
  }
  SUBCASE("sigma3") {
    const SlabParams p = params(0.5, 1.0, 12.0, 0.5);
    CHECK(max_dev(closed_form_coeffs(GeometryId::sigma3, p),
                  oracle_coeffs(GeometryId::sigma3, p)) < 1e-10);
  }
}

TEST_CASE("transparent interface system") {
  const CoefficientSet c = interface_matching_oracle(1.0, 12.0, 12.0, 0.5);
  CHECK(std::abs(c.R) < 1e-14);
  CHECK(std::abs(c.T - std::exp(I * 6.0)) < 1e-14);
  CHECK(std::abs(c.T_M - 1.0) < 1e-14);
  CHECK(std::abs(c.R_M) < 1e-14);
}

TEST_CASE("independent transfer-matrix oracle") {
  const double k0 = 12.0, L = 0.5;
  struct Case {
    GeometryId id;
    double alpha, gamma;
    cplx a, k;
    CoefficientSet frozen;
  };
  const Case cases[] = {
      {GeometryId::sigma1, 0.75, 1.5, std::sqrt(2.0), k0 * std::sqrt(1.125),
       {{-0.00243946691946284, 0.0284113470460269},
        {0.995928910415117, 0.0855128631232593},
        {0.144364394146379, 0.0242506016024585},
        {0.853196138934159, 0.00416074544356845}}},
      {GeometryId::sigma2, 0.75, 1.5, std::sqrt(1.5), k0 * std::sqrt(1.5),
       {{-0.154548951988135, 0.0838117643114383},
        {0.469287575184264, 0.865366616746941},
        {-0.0486171119000686, 0.0761218916566241},
        {0.894068159911933, 0.00768987265481426}}},
      {GeometryId::sigma3, 0.5, 1.0, 2.0, k0,
       {{-0.0701143115425178, -0.192750020084122},
        {0.919777279483123, -0.334576103780762},
        {0.197414266343112, -0.144562515063092},
        {0.732471422114371, -0.0481875050210305}}},
  };
  for (const Case &c : cases) {
    CAPTURE(to_string(c.id));
    const CoefficientSet tm = transfer_matrix(c.a, c.k, L);
    CHECK(max_dev(tm, c.frozen) < 1e-13);
    const CoefficientSet cf = closed_form_coeffs(c.id, params(c.alpha, c.gamma, k0, L));
    CHECK(max_dev(cf, c.frozen) < 1e-12);
  }
}

TEST_CASE("energy conservation on a random lossless set") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.1, 0.9), ug(1.0, 5.0), uk(1.0, 20.0),
      uL(0.1, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SlabParams p = params(ua(rng), ug(rng), uk(rng), uL(rng));
    for (GeometryId id : {GeometryId::sigma1, GeometryId::sigma2, GeometryId::sigma3}) {
      const CoefficientSet c = closed_form_coeffs(id, p);
      worst = std::max(worst, std::abs(std::norm(c.R) + std::norm(c.T) - 1.0));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("thin-slab limit") {
  for (GeometryId id : {GeometryId::sigma1, GeometryId::sigma2, GeometryId::sigma3}) {
    const CoefficientSet c = closed_form_coeffs(id, params(0.5, 3.0, 12.0, 1e-7));
    CHECK(std::abs(c.R) < 1e-5);
    CHECK(std::abs(c.T - 1.0) < 1e-5);
  }
}

TEST_CASE("tangential E and H are continuous at both interfaces") {
  const double d = 1e-12;
  for (GeometryId id : {GeometryId::sigma1, GeometryId::sigma2, GeometryId::sigma3}) {
    const SlabParams p = params(0.7, 2.2, 11.0, 0.45);
    const CoefficientSet c = closed_form_coeffs(id, p);
    for (double x : {0.0, -p.L}) {
      const FieldSample r = field_ansatz_eval(id, p, c, x + d);
      const FieldSample l = field_ansatz_eval(id, p, c, x - d);
      CHECK(std::abs(r.E[1] - l.E[1]) < 1e-9);
      CHECK(std::abs(r.H[2] - l.H[2]) < 1e-9);
    }
  }
}

TEST_CASE("sigma3 ignores gamma") {
  const CoefficientSet a = closed_form_coeffs(GeometryId::sigma3, params(0.5, 1.0, 12.0, 0.5));
  const CoefficientSet b = closed_form_coeffs(GeometryId::sigma3, params(0.5, 4.0, 12.0, 0.5));
  CHECK(max_dev(a, b) == 0.0);
}

TEST_CASE("invalid slab parameters") {
  CHECK(code_of([] { closed_form_coeffs(GeometryId::sigma1, params(0.0, 1.5, 12.0, 0.5)); }) ==
        ErrorCode::parameter);
  CHECK(code_of([] { closed_form_coeffs(GeometryId::sigma1, params(1.2, 1.5, 12.0, 0.5)); }) ==
        ErrorCode::parameter);
  CHECK(code_of([] { closed_form_coeffs(GeometryId::sigma1, params(0.5, 1.5, -1.0, 0.5)); }) ==
        ErrorCode::parameter);
  CHECK(code_of([] { closed_form_coeffs(GeometryId::sigma1, params(0.5, 1.5, 12.0, -0.1)); }) ==
        ErrorCode::parameter);
  CHECK(code_of([] { interface_matching_oracle(1.0, 0.0, 12.0, 0.5); }) ==
        ErrorCode::parameter);
}

TEST_CASE("randomised oracle check helper") {
  const OracleCheck c = check_slab_oracle(200, 20240101);
  CHECK(c.draws == 200);
  CHECK(c.max_deviation < 1e-10);
  CHECK(c.max_energy_defect < 1e-10);
}

#include "core/fem.hpp"

#include "core/error.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>

namespace metawave {

P1Element p1_element(const TriMesh &m, int t) {
  const auto &v = m.tris[t];
  const Point2 a = m.nodes[v[0]], b = m.nodes[v[1]], c = m.nodes[v[2]];
  const double det = (b.x1 - a.x1) * (c.x2 - a.x2) - (c.x1 - a.x1) * (b.x2 - a.x2);
  P1Element e;
  e.area = 0.5 * std::abs(det);
  e.grad[0] = Eigen::Vector2d(b.x2 - c.x2, c.x1 - b.x1) / det;
  e.grad[1] = Eigen::Vector2d(c.x2 - a.x2, a.x1 - c.x1) / det;
  e.grad[2] = Eigen::Vector2d(a.x2 - b.x2, b.x1 - a.x1) / det;
  return e;
}

const std::array<QuadPoint, 7> &triangle_rule() {
  static const std::array<QuadPoint, 7> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, b1 = (9.0 + 2.0 * s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0, b2 = (9.0 - 2.0 * s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0, w2 = (155.0 + s15) / 1200.0;
    return std::array<QuadPoint, 7>{{
        {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.225},
        {{a1, a1, b1}, w1},
        {{a1, b1, a1}, w1},
        {{b1, a1, a1}, w1},
        {{a2, a2, b2}, w2},
        {{a2, b2, a2}, w2},
        {{b2, a2, a2}, w2},
    }};
  }();
  return rule;
}

const std::array<LinePoint, 3> &line_rule() {
  static const std::array<LinePoint, 3> rule = [] {
    const double d = 0.5 * std::sqrt(3.0 / 5.0);
    return std::array<LinePoint, 3>{{{0.5 - d, 5.0 / 18.0},
                                     {0.5, 8.0 / 18.0},
                                     {0.5 + d, 5.0 / 18.0}}};
  }();
  return rule;
}

double relative_residual(const SpMatC &K, const VecC &u, const VecC &f) {
  const VecC r = K * u - f;
  const double fn = f.norm();
  return fn > 0.0 ? r.norm() / fn : r.norm();
}

VecC solve_sparse_lu(const SpMatC &K, const VecC &f, double tol) {
  Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(K);
  lu.factorize(K);
  if (lu.info() != Eigen::Success)
    fail(ErrorCode::solver, "sparse LU factorisation failed: " + lu.lastErrorMessage());
  VecC u = lu.solve(f);
  if (lu.info() != Eigen::Success || !u.allFinite())
    fail(ErrorCode::solver, "sparse LU solve failed");
  const double res = relative_residual(K, u, f);
  if (!(res < tol)) {
    std::ostringstream os;
    os << "linear solve residual " << res << " exceeds " << tol;
    fail(ErrorCode::accuracy, os.str());
  }
  return u;
}

VecR solve_spd(const SpMatR &K, const VecR &f, double tol) {
  Eigen::SimplicialLDLT<SpMatR> ldlt;
  ldlt.compute(K);
  if (ldlt.info() != Eigen::Success)
    fail(ErrorCode::solver, "LDL^T factorisation failed (singular cell system?)");
  VecR u = ldlt.solve(f);
  const VecR r = K * u - f;
  const double fn = f.norm();
  const double res = fn > 0.0 ? r.norm() / fn : r.norm();
  if (!(res < tol) || !u.allFinite()) {
    std::ostringstream os;
    os << "linear solve residual " << res << " exceeds " << tol;
    fail(ErrorCode::accuracy, os.str());
  }
  return u;
}

} // namespace metawave

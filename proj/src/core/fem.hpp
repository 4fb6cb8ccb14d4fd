#pragma once

#include "core/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <vector>

namespace metawave {

using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using SpMatC = Eigen::SparseMatrix<cplx>;
using SpMatR = Eigen::SparseMatrix<double>;
using Mat2c = Eigen::Matrix2cd;

/// Gradients of the three P1 hat functions on triangle t (constant per
/// triangle) and its area.
struct P1Element {
  std::array<Eigen::Vector2d, 3> grad;
  double area = 0.0;
};

P1Element p1_element(const TriMesh &m, int t);

/// Local mass matrix entry of P1 on a triangle of the given area.
inline double p1_mass(double area, int i, int j) {
  return area / 12.0 * (i == j ? 2.0 : 1.0);
}

struct QuadPoint {
  std::array<double, 3> bary;
  double weight; // relative to the triangle area
};

/// Degree-5 seven-point rule on triangles.
const std::array<QuadPoint, 7> &triangle_rule();

struct LinePoint {
  double s; // in [0,1] along the edge
  double weight;
};

/// Three-point Gauss-Legendre rule on [0,1].
const std::array<LinePoint, 3> &line_rule();

/// Relative residual ||K u - f|| / ||f|| (||K u|| when f = 0).
double relative_residual(const SpMatC &K, const VecC &u, const VecC &f);

/// Direct sparse LU solve; raises solver errors on factorisation failure
/// and accuracy errors when the residual exceeds `tol`.
VecC solve_sparse_lu(const SpMatC &K, const VecC &f, double tol);

/// Sparse LDL^T for symmetric positive definite systems.
VecR solve_spd(const SpMatR &K, const VecR &f, double tol);

} // namespace metawave

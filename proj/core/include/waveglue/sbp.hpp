#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace waveglue {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

/// Diagonal-norm SBP approximation of d^2/dx^2 on a uniform grid,
/// D = H^{-1}(-A + e_n d_n^T - e_1 d_1^T) with H diagonal SPD and A symmetric PSD.
struct SbpOperator1D {
  int n = 0;
  double h = 0.0;
  int interior_order = 0;  // 2p
  int boundary_order = 0;  // p
  Vec H;    // diagonal entries of the norm (length n)
  Mat A;    // symmetric stiffness-like matrix
  SpMat D;  // assembled second-derivative stencils
  Vec d1;   // boundary first-derivative functional at x_1
  Vec dn;   // boundary first-derivative functional at x_n

  int closure_width() const { return interior_order == 4 ? 4 : 1; }
};

struct BorrowingResult {
  double beta = 0.0;
  int n_used = 0;
  double residual_eig = 0.0;  // smallest eigenvalue of A - beta*h*(d1 d1^T + dn dn^T)
};

/// Build the (2,1) or (4,2) diagonal-norm operator. Throws std::invalid_argument
/// when the order is unsupported or n is below the minimal closure size.
SbpOperator1D build_sbp(int interior_order, int n, double h);

/// Largest beta such that A - beta*h*(d1 d1^T + dn dn^T) stays positive
/// semidefinite, found by bisection on a symmetric eigenvalue oracle.
/// Verified h-independent and stable under n -> 2n before returning.
BorrowingResult borrowing_capacity(const SbpOperator1D& op, double tol);

/// Apply D without forming it densely: H^{-1}(-A f + e_n (dn.f) - e_1 (d1.f)).
Vec apply_D(const SbpOperator1D& op, const Vec& f);

}  // namespace waveglue

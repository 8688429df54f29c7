#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "waveglue/dg1d.hpp"

namespace waveglue {

using Cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

/// Penalty for which the interface-mode analysis data below is tabulated;
/// differs from the stencil-table penalty (see recover_penalty).
inline constexpr double kModePenalty = 10.0;

struct FdRoots {
  std::vector<Cplx> all;  // the four characteristic roots
  Cplx kappa1;            // branch continuing 1 - s_tilde
  Cplx kappa2;            // branch continuing 7 - 4*sqrt(3)
};

/// Roots of the fourth-order interior stencil's characteristic equation at
/// dual variable s_tilde = s*h; the s_tilde = 0 case is resolved by continuation.
FdRoots fd_roots(Cplx s_tilde);

struct DgRoots {
  std::vector<Cplx> alphas;  // finite roots of the degree-6 determinant
  Cplx alpha1;               // branch continuing the root near 0.139
  Cplx alpha2;               // branch continuing 1 - s_tilde
  Eigen::Vector4cd z1, z2;   // null vectors at alpha1, alpha2 (last entry 1)
  Eigen::Vector4d z3, z4;    // kernel of the left-coupling block (alpha = 0 modes)
};

/// Quadratic matrix polynomial roots det(D1 + (D2 - s^2 I) a + D3 a^2) = 0 via a
/// shift-inverted linearization. Throws if the left block's kernel is not 2D.
DgRoots dg_roots(double tau, Cplx s_tilde);

struct NormalModeData {
  Cplx s_tilde;
  double tau = 0.0;
  FdRoots fd;
  DgRoots dg;
  MatC C;                  // 8x8 boundary system
  Vec T_gamma;             // truncation right-hand side (8 rationals)
  Vec singular_values;     // descending
  VecC Ut_T;               // U^H * T_gamma
  double colspace_residual = 0.0;  // |last component| / ||T_gamma||
};

/// Substitute the general interface solutions into the eight interface rows to
/// form C(s_tilde); unknown order [sigma1, sigma2, d1, d2, c1, c2, c3, c4].
NormalModeData boundary_system(double tau, Cplx s_tilde);

/// JSON record of roots, vectors, singular values and the column-space check.
std::string nma_report_json(const NormalModeData& d);

}  // namespace waveglue

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "waveglue/rational.hpp"

namespace waveglue {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Lagrange basis of degree k on the k+1 equispaced nodes j/k of [0,1].
struct LagrangeBasis1D {
  int degree = 3;
  Vec nodes;       // reference nodes j/k
  Mat coeff;       // column i: monomial coefficients of phi_i (ascending powers)

  double eval(int i, double x) const;
  double eval_deriv(int i, double x) const;
};

LagrangeBasis1D make_lagrange_basis(int k);

/// The 1D interior-penalty DG machinery realized as neighbor-coupling stencils:
/// M_loc u_tt = A1 u^{j-1} + A2 u^j + A3 u^{j+1}, D_i = M_loc^{-1} A_i.
struct DgBlocks1D {
  int degree = 3;
  double h = 0.0;
  double tau = 0.0;
  Mat M_loc;           // (k+1)x(k+1) local mass, scales with h
  Mat D1, D2, D3;      // stencil blocks (scale 1/h^2)
  Vec gL, gR;          // basis derivative values at the element endpoints (scale 1/h)
};

/// Penalty embedded in the fourth-order reference stencil tables; recoverable
/// from any such block via recover_penalty.
inline constexpr double kDefaultPenalty = 25.0;

/// Exact local mass matrix of the equispaced Lagrange basis on an element of length h.
Mat local_mass(int k, double h);
/// Same matrix with exact rational entries, for the unit element (multiply by h).
RatMat local_mass_rational(int k);

DgBlocks1D assemble_dg1d_blocks(int k, double h, double tau);

/// Exact rational [h^2*D1 | h^2*D2 | h^2*D3] for degree k and rational penalty tau.
RatMat dg1d_block_rational(int k, const Rat& tau);

/// Solve for the penalty that a given (k+1) x 3(k+1) stencil block embeds.
/// Throws if no single value reproduces every entry.
double recover_penalty(const Mat& block, int k = 3, double tol = 1e-9);

/// Smooth test function with the derivatives the truncation fits need.
struct SmoothFunction {
  std::function<double(double)> f;
  std::function<double(double)> d2;
  std::function<double(double)> d4;
  std::function<double(double)> d5;
  std::function<double(double)> d6;
};

struct TruncationFit {
  Vec lead;        // leading-order coefficient per node
  Vec next;        // next-order coefficient per node
  double fit_residual = 0.0;
};

/// Apply the interior block to samples of f near x0 over a refinement sweep,
/// subtract f'' at the nodes, and fit the h^2 and h^3 error coefficients.
TruncationFit dg1d_truncation_probe(int k, double tau, const SmoothFunction& f, double x0,
                                    const std::vector<double>& hs);

/// Mass-weighted variant: fits the h^3 (times f'''') and h^4 (times f''''')
/// coefficients of M_loc times the truncation residual.
TruncationFit dg1d_truncation_probe_mass_weighted(int k, double tau, const SmoothFunction& f,
                                                  double x0, const std::vector<double>& hs);

}  // namespace waveglue

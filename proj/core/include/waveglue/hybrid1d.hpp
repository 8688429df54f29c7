#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <vector>

#include "waveglue/dg1d.hpp"
#include "waveglue/rational.hpp"
#include "waveglue/sbp.hpp"

namespace waveglue {

/// Sharp constant of (u_x,u_x)_I >= beta_inv * h * (u_x(left)^2 + u_x(right)^2)
/// over polynomials of degree k on an element.
struct InverseConstant {
  double beta_inv = 0.0;
  int degree = 0;
  Vec extremal;  // monomial coefficients of the extremizing u_x
};

InverseConstant inverse_constant(int k);

struct Hybrid1dOptions {
  double tau_left = -1.0;   // FD Dirichlet penalty; auto = 1.1/beta
  double tau_right = -1.0;  // DG Dirichlet penalty; auto = 1.1/beta_inv
  bool allow_unstable_tau = false;
};

/// Coupled FD-DG semidiscretization z_tt = Q z on [-L, 0] u [0, m*h],
/// Dirichlet closures at the outer ends, interface penalties tau.
struct Hybrid1D {
  SbpOperator1D fd;   // FD operator on [-L, 0]; x_n sits on the interface
  DgBlocks1D dg;      // element blocks (element length = fd.h)
  int m = 0;          // DG element count
  double tau = 0.0;
  double tau_left = 0.0;
  double tau_right = 0.0;
  double beta = 0.0;
  double beta_inv = 0.0;
  double beta_tilde = 0.0;  // min(beta, beta_inv); 1/(2*beta_tilde) is the tau bound
  SpMat Q;
  SpMat H_tilde;
  std::array<int, 8> iface_rows{};
  Vec bc_left;   // z_tt += g_left(t) * bc_left   (Dirichlet data directions)
  Vec bc_right;  // z_tt += g_right(t) * bc_right

  int size() const { return fd.n + 4 * m; }
  double x_left() const { return -(fd.n - 1) * fd.h; }
  double x_right() const { return m * dg.h; }
  /// coordinate of unknown i
  double position(int i) const;
};

Hybrid1D assemble_hybrid1d(const SbpOperator1D& fd, const DgBlocks1D& dg, int m, double tau,
                           const Hybrid1dOptions& opts = {});

/// Semidiscrete energy by the explicit flux/penalty sum (homogeneous data).
double energy(const Vec& z, const Vec& zt, const Hybrid1D& sys);
/// The same energy through the matrix form z_t^T Htilde z_t - z^T Htilde Q z.
double energy_quadratic(const Vec& z, const Vec& zt, const Hybrid1D& sys);

struct InterfaceTruncation {
  Vec h2_coeffs;  // 8 fitted leading coefficients (times f'''' at the row point)
  double fit_residual = 0.0;
};

/// Fit the h^2 truncation coefficients of the eight interface rows over a sweep.
InterfaceTruncation truncation_interface(double tau, const SmoothFunction& f,
                                         const std::vector<double>& hs);

/// Exact rational 8x14 interface block (rows x4..x1 then the first DG element;
/// columns x6..x1 then two DG elements), scaled by h^2.
RatMat interface_block_rational(const Rat& tau);

}  // namespace waveglue

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

#include "waveglue/ipdg2d.hpp"
#include "waveglue/mesh2d.hpp"
#include "waveglue/projection.hpp"
#include "waveglue/sbp.hpp"

namespace waveglue {

struct Hybrid2dOptions {
  double tau_w = -1.0;    // continuity penalty, FD side; auto = 1.1/(4 beta)
  double tau_u = -1.0;    // continuity penalty, DG side; auto from trace constants
  double tau_fd = -1.0;   // FD outer Dirichlet penalty; auto = 1.1/beta
  bool allow_unstable = false;
  bool swap_pairs = false;  // exchange the roles of the two projection pairs
};

/// Coupled semidiscretization z_tt = Q z + forcing on
/// Omega_1 (Cartesian, n x n) over Omega_2 (triangulated), interface at y = y0.
struct Hybrid2D {
  int n = 0;
  double h1 = 0.0;
  double b1 = 1.0, b2 = 1.0;
  Rect omega1;
  SbpOperator1D fd;
  DgSpace2D space;
  TriMesh mesh;
  DgOperator2D dg;
  ProjectionPair pair_gd;  // P_d2f good / P_f2d bad
  ProjectionPair pair_gf;  // P_d2f bad  / P_f2d good
  double beta = 0.0;
  double tau_w = 0.0, sigma_w = 0.0, tau_u = 0.0, sigma_u = 0.0, tau_fd = 0.0;
  SpMat Q;
  SpMat H_tilde;

  int n_fd() const { return n * n; }
  int size() const { return n * n + dg.ndof; }
  int fd_index(int i, int j) const { return i * n + j; }  // j is the y index
  double x_of(int i) const { return omega1.x0 + h1 * i; }
  double y_of(int j) const { return omega1.y0 + h1 * j; }

  /// forcing vector from Dirichlet data g(x, y, t) on all outer boundaries
  Vec forcing(const std::function<double(double, double)>& g) const;
};

/// mesh must be a triangulation of Omega_2 whose interface faces lie on
/// y = omega1.y0 and span [omega1.x0, omega1.x1].
Hybrid2D assemble_hybrid2d(int n, const Rect& omega1, const TriMesh& mesh, int q, double b1,
                           double b2, const Hybrid2dOptions& opts = {});

struct SatSurveyRow {
  double interior_order = 0.0;
  double edge_order = 0.0;
};

/// Observed decay orders of the four interface SAT groups on exact data:
/// 1 solution continuity (derivative-weighted), 2 flux, 3 continuity penalty,
/// 4 round-trip penalty; split into interface-interior and edge rows.
std::array<SatSurveyRow, 4> sat_truncation_survey(
    const std::vector<int>& ns, const Rect& omega1, InterfaceConfig config, double depth,
    double b1, double b2, const std::function<double(double, double)>& U,
    const std::function<double(double, double)>& Uy);

}  // namespace waveglue

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace waveglue {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// 1D piecewise-polynomial mesh on an interface segment: strictly increasing
/// breakpoints, degree-q Lagrange elements with duplicated endpoint DOFs.
struct GlueMesh {
  std::vector<double> breakpoints;
  int degree = 3;

  int n_elements() const { return static_cast<int>(breakpoints.size()) - 1; }
  int n_dofs() const { return n_elements() * (degree + 1); }
  /// All Lagrange node positions, element by element.
  Vec node_positions() const;
  /// Block-diagonal mass matrix (dense blocks of size degree+1).
  Mat mass() const;
};

/// Union of FD grid points and DG element boundaries; points closer than
/// merge_tol are merged keeping the FD coordinate.
GlueMesh build_glue_mesh(const std::vector<double>& fd_points,
                         const std::vector<double>& dg_breaks, double merge_tol, int degree = 3);

/// Basis transfer between nested piecewise-polynomial meshes of equal degree.
/// Refinement direction: exact re-expansion. Coarsening: L2 projection
/// M_dst^{-1} (mixed mass), which satisfies M_dst P = (M_src P_reverse)^T.
Mat build_basis_transfer(const GlueMesh& src, const GlueMesh& dst);

enum class PairFlavor { good_d2f, good_f2d };

/// A compatible pair between pointwise FD values and piecewise polynomials on
/// the FD-interval mesh: H P_p2f = (M_p P_f2p)^T.
struct FdPolyPair {
  Mat P_f2p;  // pointwise -> element nodal coefficients
  Mat P_p2f;  // element nodal coefficients -> pointwise
  int edge_elements = 0;  // elements per side whose rows form the edge class
  int edge_points = 0;    // grid points per side in the edge class
};

/// Build the pair on n FD points for half-order p (p = 2 supported).
/// flavor good_d2f: P_p2f edge rows one order better (the "good" side of pair 1);
/// flavor good_f2d: P_f2p edge rows one order better (pair 2).
/// Throws on infeasible accuracy demands (e.g. both sides good) naming the rank gap.
FdPolyPair build_f2p_pair(int n, int p, PairFlavor flavor);

/// Same solve with explicit edge exactness degrees, used for the infeasibility probes.
FdPolyPair build_f2p_pair_degrees(int n, int p, int deg_f2p_edge, int deg_p2f_edge);

/// Composite FD <-> DG projection pair with its norms.
struct ProjectionPair {
  PairFlavor flavor = PairFlavor::good_d2f;
  Mat P_f2d;   // FD pointwise -> DG face coefficients
  Mat P_d2f;   // DG face coefficients -> FD pointwise
  Vec H;       // FD interface norm (diagonal)
  Mat M_d;     // DG interface mass (block diagonal)
  int edge_points = 0;
  int edge_faces = 0;
  double compat_residual = 0.0;  // ||H P_d2f - (M_d P_f2d)^T||_max
};

/// Compose the stage operators through the glue mesh for the given interface:
/// fd_points are the FD interface coordinates, dg_breaks the DG face endpoints.
ProjectionPair compose_fd_dg(const std::vector<double>& fd_points,
                             const std::vector<double>& dg_breaks, const Vec& H_fd, int p,
                             PairFlavor flavor, double merge_tol);

/// Largest monomial degree reproduced exactly per row, split into edge and
/// interior classes. src/dst positions are the geometric locations of the
/// operator's input/output degrees of freedom.
struct AccuracyReport {
  std::vector<int> row_degree;   // per destination row
  int interior_degree = -1;      // min over interior-class rows
  int edge_degree = -1;          // min over edge-class rows
};

AccuracyReport verify_accuracy(const Mat& P, const Vec& src_positions, const Vec& dst_positions,
                               int max_degree, int edge_rows_front, int edge_rows_back,
                               double tol = 1e-8);

}  // namespace waveglue

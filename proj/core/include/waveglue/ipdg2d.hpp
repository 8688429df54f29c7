#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "waveglue/mesh2d.hpp"

namespace waveglue {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

/// Nodal Lagrange space of degree q on the principal lattice of each triangle.
struct DgSpace2D {
  int degree = 3;
  int ndof_tri = 10;                       // (q+1)(q+2)/2
  std::vector<std::array<int, 2>> lattice; // barycentric index pairs (i, j)
  Mat coeff;                               // monomial coefficients, column per basis fn
  std::vector<std::array<int, 2>> monos;   // monomial exponents (a, b)

  /// basis value / gradient at a reference point
  double eval(int l, double x, double y) const;
  Eigen::Vector2d eval_grad(int l, double x, double y) const;
  /// reference coordinates of lattice node l
  Eigen::Vector2d node(int l) const;
};

DgSpace2D make_dg_space(int q);

/// Symmetric triangle quadrature, exact for polynomials of total degree <= d
/// (collapsed tensor Gauss rule, positive weights).
struct TriQuad {
  Mat pts;  // nq x 2 reference points
  Vec w;    // weights summing to 1/2
};
TriQuad tri_quadrature(int d);

struct InterfaceFaceData {
  int face = -1;        // index into mesh.faces
  int tri = -1;         // owner triangle
  double x0 = 0, x1 = 0;  // x-extent (sorted)
  double length = 0;
  double h_elem = 0;    // owner diameter, used in the penalty denominators
};

/// Assembled IPDG pieces; interface faces only contribute their own-element
/// terms here, the projection couplings are added by the hybrid assembly.
struct DgOperator2D {
  int ndof = 0;
  double b2 = 1.0;
  double tau_u = 0.0;
  SpMat M;          // block-diagonal mass
  SpMat Minv;       // exact block inverse
  SpMat K;          // everything on the right-hand side of M u_tt = K u + data
  double C_tr = 0.0;      // borrowing-style interface trace constant
  double tau_min = 0.0;   // sufficient penalty for negative semidefiniteness
  std::vector<InterfaceFaceData> iface;  // sorted by x
  SpMat R_iface;    // interface face-node values from dofs (4 per face)
  SpMat G_iface;    // interface normal derivative (toward the FD side, -d/dy)
  Mat M_face;       // block-diagonal interface face mass (dense, small)
  // Dirichlet boundary forcing: M u_tt += ... + sum_faces W_f * g(quadnodes_f)
  struct BoundaryFace {
    int face = -1;
    int tri = -1;
    Mat weight;             // ndof_tri x (q+1): data values at face nodes -> forcing
    Mat face_nodes;         // (q+1) x 2 physical positions
  };
  std::vector<BoundaryFace> boundary;
};

SpMat assemble_mass(const DgSpace2D& space, const TriMesh& mesh);

struct IpdgOptions {
  bool allow_low_penalty = false;
};

/// Volume terms, interior SIPG fluxes, Dirichlet boundary fluxes, and the
/// element-local half of the interface fluxes. Throws when tau_u is below the
/// computed threshold unless overridden.
DgOperator2D assemble_ipdg(const DgSpace2D& space, const TriMesh& mesh, double b2, double tau_u,
                           const IpdgOptions& opts = {});

/// Largest C such that ||grad u||_K^2 >= C * h_K * ||grad u . n||_F^2 on every
/// interface-adjacent element (reported h-independent by the scaling).
double trace_constant(const DgSpace2D& space, const TriMesh& mesh);

/// Evaluate a scalar field given per-triangle dof values at a physical point.
double eval_dg(const DgSpace2D& space, const TriMesh& mesh, const Vec& u, int tri, double x,
               double y);

/// Physical positions of all dofs (ndof x 2).
Mat dof_positions(const DgSpace2D& space, const TriMesh& mesh);

/// Dirichlet boundary forcing vector for data g(x, y, t) at time t (adds to K u).
Vec boundary_forcing(const DgOperator2D& op, const DgSpace2D& space,
                     const std::function<double(double, double)>& g);

}  // namespace waveglue

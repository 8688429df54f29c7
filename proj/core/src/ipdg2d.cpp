#include "waveglue/ipdg2d.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "waveglue/dg1d.hpp"

namespace waveglue {

namespace {

void gauss_legendre01(int n, Vec& x, Vec& w) {
  x = Vec(n);
  w = Vec(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x(n - 1 - i) = 0.5 * (1.0 + t);
    w(n - 1 - i) = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

struct TriGeom {
  Eigen::Vector2d v0;
  Eigen::Matrix2d J;     // [v1-v0, v2-v0]
  Eigen::Matrix2d JinvT;
  double detJ = 0.0;
};

TriGeom tri_geom(const TriMesh& mesh, int t) {
  TriGeom g;
  const int a = mesh.triangles(t, 0), b = mesh.triangles(t, 1), c = mesh.triangles(t, 2);
  g.v0 = mesh.vertices.row(a).transpose();
  g.J.col(0) = (mesh.vertices.row(b) - mesh.vertices.row(a)).transpose();
  g.J.col(1) = (mesh.vertices.row(c) - mesh.vertices.row(a)).transpose();
  g.detJ = g.J.determinant();
  g.JinvT = g.J.inverse().transpose();
  return g;
}

Eigen::Vector2d to_reference(const TriGeom& g, double x, double y) {
  return g.J.inverse() * (Eigen::Vector2d(x, y) - g.v0);
}

}  // namespace

DgSpace2D make_dg_space(int q) {
  if (q < 1) throw std::invalid_argument("make_dg_space: degree must be >= 1");
  DgSpace2D s;
  s.degree = q;
  s.ndof_tri = (q + 1) * (q + 2) / 2;
  for (int j = 0; j <= q; ++j)
    for (int i = 0; i <= q - j; ++i) s.lattice.push_back({i, j});
  for (int j = 0; j <= q; ++j)
    for (int i = 0; i <= q - j; ++i) s.monos.push_back({i, j});
  const int m = s.ndof_tri;
  Mat V(m, m);
  for (int n = 0; n < m; ++n) {
    const double x = static_cast<double>(s.lattice[n][0]) / q;
    const double y = static_cast<double>(s.lattice[n][1]) / q;
    for (int k = 0; k < m; ++k)
      V(n, k) = std::pow(x, s.monos[k][0]) * std::pow(y, s.monos[k][1]);
  }
  s.coeff = V.inverse();
  return s;
}

double DgSpace2D::eval(int l, double x, double y) const {
  double acc = 0.0;
  for (size_t k = 0; k < monos.size(); ++k)
    acc += coeff(static_cast<int>(k), l) * std::pow(x, monos[k][0]) * std::pow(y, monos[k][1]);
  return acc;
}

Eigen::Vector2d DgSpace2D::eval_grad(int l, double x, double y) const {
  Eigen::Vector2d g(0.0, 0.0);
  for (size_t k = 0; k < monos.size(); ++k) {
    const int a = monos[k][0], b = monos[k][1];
    const double c = coeff(static_cast<int>(k), l);
    if (a > 0) g(0) += c * a * std::pow(x, a - 1) * std::pow(y, b);
    if (b > 0) g(1) += c * b * std::pow(x, a) * std::pow(y, b - 1);
  }
  return g;
}

Eigen::Vector2d DgSpace2D::node(int l) const {
  return Eigen::Vector2d(static_cast<double>(lattice[static_cast<size_t>(l)][0]) / degree,
                         static_cast<double>(lattice[static_cast<size_t>(l)][1]) / degree);
}

TriQuad tri_quadrature(int d) {
  // collapsed tensor rule: x = u, y = v(1-u), weight w_u w_v (1-u);
  // exact for total degree d when both 1D rules integrate degree d+1
  const int n = (d + 3) / 2 + 1;
  Vec gx, gw;
  gauss_legendre01(n, gx, gw);
  TriQuad q;
  q.pts = Mat(n * n, 2);
  q.w = Vec(n * n);
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = gx(i), v = gx(j);
      q.pts(c, 0) = u;
      q.pts(c, 1) = v * (1.0 - u);
      q.w(c) = gw(i) * gw(j) * (1.0 - u);
      ++c;
    }
  return q;
}

SpMat assemble_mass(const DgSpace2D& space, const TriMesh& mesh) {
  const int nd = space.ndof_tri, N = nd * mesh.n_triangles();
  const TriQuad quad = tri_quadrature(2 * space.degree);
  Mat Mref = Mat::Zero(nd, nd);
  for (int qp = 0; qp < quad.w.size(); ++qp) {
    Vec phi(nd);
    for (int l = 0; l < nd; ++l) phi(l) = space.eval(l, quad.pts(qp, 0), quad.pts(qp, 1));
    Mref += quad.w(qp) * phi * phi.transpose();
  }
  std::vector<Eigen::Triplet<double>> T;
  T.reserve(static_cast<size_t>(N) * nd);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double scale = std::abs(tri_geom(mesh, t).detJ);
    if (scale <= 0.0) throw std::runtime_error("assemble_mass: degenerate triangle");
    for (int a = 0; a < nd; ++a)
      for (int b = 0; b < nd; ++b) T.emplace_back(t * nd + a, t * nd + b, scale * Mref(a, b));
  }
  SpMat M(N, N);
  M.setFromTriplets(T.begin(), T.end());
  return M;
}

namespace {

// trace matrices for a face: values and normal gradients of a triangle's basis
// at given physical points; n is a fixed unit vector.
void face_traces(const DgSpace2D& space, const TriMesh& mesh, int tri, const Mat& pts,
                 const Eigen::Vector2d& n, Mat& Rt, Mat& Gt) {
  const TriGeom g = tri_geom(mesh, tri);
  const int nd = space.ndof_tri, np = static_cast<int>(pts.rows());
  Rt = Mat(np, nd);
  Gt = Mat(np, nd);
  for (int p = 0; p < np; ++p) {
    const Eigen::Vector2d xi = to_reference(g, pts(p, 0), pts(p, 1));
    for (int l = 0; l < nd; ++l) {
      Rt(p, l) = space.eval(l, xi(0), xi(1));
      Gt(p, l) = (g.JinvT * space.eval_grad(l, xi(0), xi(1))).dot(n);
    }
  }
}

Mat face_node_points(const TriMesh& mesh, const Face& f, int q, bool sort_by_x) {
  Eigen::Vector2d a = mesh.vertices.row(f.v0).transpose();
  Eigen::Vector2d b = mesh.vertices.row(f.v1).transpose();
  if (sort_by_x && a(0) > b(0)) std::swap(a, b);
  Mat pts(q + 1, 2);
  for (int i = 0; i <= q; ++i)
    pts.row(i) = (a + (b - a) * static_cast<double>(i) / q).transpose();
  return pts;
}

Eigen::Vector2d outward_normal(const TriMesh& mesh, const Face& f) {
  // owner is CCW, so the outward normal of edge v0->v1 is the right-hand one
  const Eigen::Vector2d a = mesh.vertices.row(f.v0).transpose();
  const Eigen::Vector2d b = mesh.vertices.row(f.v1).transpose();
  Eigen::Vector2d t = (b - a).normalized();
  return Eigen::Vector2d(t(1), -t(0));
}

// minimal c with ||grad u||_K^2 >= c * h_scale * ||grad u . n||_F^2
double face_trace_bound(const DgSpace2D& space, const TriMesh& mesh, int tri, const Face& f,
                        double h_scale) {
  const int nd = space.ndof_tri;
  const int q = space.degree;
  Mat pts = face_node_points(mesh, f, q, false);
  const Eigen::Vector2d n = outward_normal(mesh, f);
  Mat Rt, Gt;
  face_traces(space, mesh, tri, pts, n, Rt, Gt);
  const double len = (mesh.vertices.row(f.v1) - mesh.vertices.row(f.v0)).norm();
  const Mat Mf = local_mass(q, len);
  const Mat B = h_scale * Gt.transpose() * Mf * Gt;

  const TriQuad quad = tri_quadrature(2 * space.degree);
  const TriGeom g = tri_geom(mesh, tri);
  Mat S = Mat::Zero(nd, nd);
  for (int qp = 0; qp < quad.w.size(); ++qp) {
    Mat grads(2, nd);
    for (int l = 0; l < nd; ++l)
      grads.col(l) = g.JinvT * space.eval_grad(l, quad.pts(qp, 0), quad.pts(qp, 1));
    S += (quad.w(qp) * std::abs(g.detJ)) * grads.transpose() * grads;
  }
  // regularize the constant null direction shared by both forms
  const Vec ones = Vec::Ones(nd);
  const Mat Sreg = S + (S.trace() / nd) * (ones * ones.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(B, Sreg);
  const double lam_max = es.eigenvalues().maxCoeff();
  return 1.0 / lam_max;
}

}  // namespace

double trace_constant(const DgSpace2D& space, const TriMesh& mesh) {
  double c = 1e300;
  bool any = false;
  for (const Face& f : mesh.faces) {
    if (f.kind != FaceKind::interface) continue;
    any = true;
    c = std::min(c, face_trace_bound(space, mesh, f.owner, f,
                                     mesh.h_K[static_cast<size_t>(f.owner)]));
  }
  if (!any) throw std::runtime_error("trace_constant: mesh has no interface faces");
  return c;
}

DgOperator2D assemble_ipdg(const DgSpace2D& space, const TriMesh& mesh, double b2, double tau_u,
                           const IpdgOptions& opts) {
  const int nd = space.ndof_tri, q = space.degree;
  const int N = nd * mesh.n_triangles();
  DgOperator2D op;
  op.ndof = N;
  op.b2 = b2;
  op.tau_u = tau_u;
  op.M = assemble_mass(space, mesh);

  // exact block inverse of the mass
  {
    std::vector<Eigen::Triplet<double>> T;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      Mat blk(nd, nd);
      for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b) blk(a, b) = op.M.coeff(t * nd + a, t * nd + b);
      const Mat inv = blk.inverse();
      for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b) T.emplace_back(t * nd + a, t * nd + b, inv(a, b));
    }
    op.Minv = SpMat(N, N);
    op.Minv.setFromTriplets(T.begin(), T.end());
  }

  // penalty threshold from per-element per-face trace bounds (each element has
  // three penalized faces; budget split evenly)
  double tau_min = 0.0;
  for (const Face& f : mesh.faces) {
    const double hf = 0.5 * (mesh.h_K[static_cast<size_t>(f.owner)] +
                             (f.neighbor >= 0 ? mesh.h_K[static_cast<size_t>(f.neighbor)]
                                              : mesh.h_K[static_cast<size_t>(f.owner)]));
    const double c_own = face_trace_bound(space, mesh, f.owner, f, hf);
    double c = c_own;
    if (f.neighbor >= 0) c = std::min(c, face_trace_bound(space, mesh, f.neighbor, f, hf));
    tau_min = std::max(tau_min, 3.0 / (2.0 * c));
  }
  op.tau_min = tau_min;
  if (tau_u < tau_min && !opts.allow_low_penalty)
    throw std::invalid_argument("assemble_ipdg: tau_u = " + std::to_string(tau_u) +
                                " below the stability threshold " + std::to_string(tau_min));

  const TriQuad quad = tri_quadrature(2 * q);
  std::vector<Eigen::Triplet<double>> T;
  T.reserve(static_cast<size_t>(N) * nd * 3);

  // volume term -(b2 grad u, grad phi)
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const TriGeom g = tri_geom(mesh, t);
    Mat S = Mat::Zero(nd, nd);
    for (int qp = 0; qp < quad.w.size(); ++qp) {
      Mat grads(2, nd);
      for (int l = 0; l < nd; ++l)
        grads.col(l) = g.JinvT * space.eval_grad(l, quad.pts(qp, 0), quad.pts(qp, 1));
      S += (quad.w(qp) * std::abs(g.detJ)) * grads.transpose() * grads;
    }
    for (int a = 0; a < nd; ++a)
      for (int b = 0; b < nd; ++b)
        if (S(a, b) != 0.0) T.emplace_back(t * nd + a, t * nd + b, -b2 * S(a, b));
  }

  auto add_block = [&](int ti, int tj, const Mat& B) {
    for (int a = 0; a < nd; ++a)
      for (int b = 0; b < nd; ++b)
        if (B(a, b) != 0.0) T.emplace_back(ti * nd + a, tj * nd + b, B(a, b));
  };

  for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    const double len = (mesh.vertices.row(f.v1) - mesh.vertices.row(f.v0)).norm();
    const Mat Mf = local_mass(q, len);
    const Eigen::Vector2d n = outward_normal(mesh, f);
    const Mat pts = face_node_points(mesh, f, q, f.kind == FaceKind::interface);

    if (f.kind == FaceKind::interior) {
      const double hf = 0.5 * (mesh.h_K[static_cast<size_t>(f.owner)] +
                               mesh.h_K[static_cast<size_t>(f.neighbor)]);
      const double gam = tau_u * b2 / hf;
      Mat Rp, Gp, Rm, Gm;
      face_traces(space, mesh, f.owner, pts, n, Rp, Gp);
      face_traces(space, mesh, f.neighbor, pts, n, Rm, Gm);
      // +b({grad u . n},[phi]) + b([u],{grad phi . n}) - gam([u],[phi])
      const Mat J_p = Rp, J_m = -Rm;          // jump contributions
      const Mat A_p = 0.5 * Gp, A_m = 0.5 * Gm;  // average contributions
      add_block(f.owner, f.owner, b2 * (J_p.transpose() * Mf * A_p + A_p.transpose() * Mf * J_p) -
                                      gam * J_p.transpose() * Mf * J_p);
      add_block(f.owner, f.neighbor,
                b2 * (J_p.transpose() * Mf * A_m + A_p.transpose() * Mf * J_m) -
                    gam * J_p.transpose() * Mf * J_m);
      add_block(f.neighbor, f.owner,
                b2 * (J_m.transpose() * Mf * A_p + A_m.transpose() * Mf * J_p) -
                    gam * J_m.transpose() * Mf * J_p);
      add_block(f.neighbor, f.neighbor,
                b2 * (J_m.transpose() * Mf * A_m + A_m.transpose() * Mf * J_m) -
                    gam * J_m.transpose() * Mf * J_m);
    } else if (f.kind == FaceKind::boundary) {
      const double hf = mesh.h_K[static_cast<size_t>(f.owner)];
      const double gam = 2.0 * tau_u * b2 / hf;  // full-weight flux needs the doubled penalty
      Mat Rt, Gt;
      face_traces(space, mesh, f.owner, pts, n, Rt, Gt);
      add_block(f.owner, f.owner,
                b2 * (Rt.transpose() * Mf * Gt + Gt.transpose() * Mf * Rt) -
                    gam * Rt.transpose() * Mf * Rt);
      DgOperator2D::BoundaryFace bf;
      bf.face = static_cast<int>(fi);
      bf.tri = f.owner;
      bf.face_nodes = pts;
      bf.weight = -b2 * Gt.transpose() * Mf + gam * Rt.transpose() * Mf;
      op.boundary.push_back(std::move(bf));
    } else {
      // interface: own-element half fluxes and penalty; couplings added later
      const double hf = mesh.h_K[static_cast<size_t>(f.owner)];
      const double gam = tau_u * b2 / hf;
      Mat Rt, Gt;
      face_traces(space, mesh, f.owner, pts, n, Rt, Gt);
      add_block(f.owner, f.owner,
                0.5 * b2 * (Rt.transpose() * Mf * Gt + Gt.transpose() * Mf * Rt) -
                    gam * Rt.transpose() * Mf * Rt);
    }
  }
  op.K = SpMat(N, N);
  op.K.setFromTriplets(T.begin(), T.end());

  // interface trace/extension maps, sorted by x
  const std::vector<int> ifaces = mesh.interface_faces();
  std::vector<Eigen::Triplet<double>> TR, TG;
  int nfc = 0;
  Mat Mface = Mat::Zero(4 * static_cast<int>(ifaces.size()), 4 * static_cast<int>(ifaces.size()));
  for (int idx : ifaces) {
    const Face& f = mesh.faces[static_cast<size_t>(idx)];
    const Mat pts = face_node_points(mesh, f, q, true);
    // normal derivative toward the FD side: -d/dy on a horizontal interface
    Mat Rt, Gt;
    face_traces(space, mesh, f.owner, pts, Eigen::Vector2d(0.0, -1.0), Rt, Gt);
    for (int p = 0; p <= q; ++p)
      for (int l = 0; l < nd; ++l) {
        if (Rt(p, l) != 0.0) TR.emplace_back(4 * nfc + p, f.owner * nd + l, Rt(p, l));
        if (Gt(p, l) != 0.0) TG.emplace_back(4 * nfc + p, f.owner * nd + l, Gt(p, l));
      }
    InterfaceFaceData d;
    d.face = idx;
    d.tri = f.owner;
    d.x0 = pts(0, 0);
    d.x1 = pts(q, 0);
    d.length = (mesh.vertices.row(f.v1) - mesh.vertices.row(f.v0)).norm();
    d.h_elem = mesh.h_K[static_cast<size_t>(f.owner)];
    op.iface.push_back(d);
    Mface.block(4 * nfc, 4 * nfc, 4, 4) = local_mass(q, d.length);
    ++nfc;
  }
  op.R_iface = SpMat(4 * nfc, N);
  op.R_iface.setFromTriplets(TR.begin(), TR.end());
  op.G_iface = SpMat(4 * nfc, N);
  op.G_iface.setFromTriplets(TG.begin(), TG.end());
  op.M_face = Mface;
  op.C_tr = mesh.has_interface ? trace_constant(space, mesh) : 0.0;
  return op;
}

double eval_dg(const DgSpace2D& space, const TriMesh& mesh, const Vec& u, int tri, double x,
               double y) {
  const TriGeom g = tri_geom(mesh, tri);
  const Eigen::Vector2d xi = to_reference(g, x, y);
  double acc = 0.0;
  for (int l = 0; l < space.ndof_tri; ++l)
    acc += u(tri * space.ndof_tri + l) * space.eval(l, xi(0), xi(1));
  return acc;
}

Mat dof_positions(const DgSpace2D& space, const TriMesh& mesh) {
  Mat X(space.ndof_tri * mesh.n_triangles(), 2);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const TriGeom g = tri_geom(mesh, t);
    for (int l = 0; l < space.ndof_tri; ++l)
      X.row(t * space.ndof_tri + l) = (g.v0 + g.J * space.node(l)).transpose();
  }
  return X;
}

Vec boundary_forcing(const DgOperator2D& op, const DgSpace2D& space,
                     const std::function<double(double, double)>& g) {
  Vec f = Vec::Zero(op.ndof);
  const int q = space.degree;
  for (const auto& bf : op.boundary) {
    Vec gv(q + 1);
    for (int p = 0; p <= q; ++p) gv(p) = g(bf.face_nodes(p, 0), bf.face_nodes(p, 1));
    f.segment(bf.tri * space.ndof_tri, space.ndof_tri) += bf.weight * gv;
  }
  return f;
}

}  // namespace waveglue

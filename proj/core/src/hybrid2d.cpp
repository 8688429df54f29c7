#include "waveglue/hybrid2d.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace waveglue {

namespace {

void append_sparse(std::vector<Eigen::Triplet<double>>& T, const SpMat& A, int row_off, int col_off,
                   double scale = 1.0) {
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      T.emplace_back(row_off + static_cast<int>(it.row()), col_off + static_cast<int>(it.col()),
                     scale * it.value());
}

SpMat to_sparse(const Mat& A, double prune = 1e-14) {
  std::vector<Eigen::Triplet<double>> T;
  const double scale = A.cwiseAbs().maxCoeff();
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (std::abs(A(i, j)) > prune * scale) T.emplace_back(i, j, A(i, j));
  SpMat S(A.rows(), A.cols());
  S.setFromTriplets(T.begin(), T.end());
  return S;
}

}  // namespace

Hybrid2D assemble_hybrid2d(int n, const Rect& omega1, const TriMesh& mesh, int q, double b1,
                           double b2, const Hybrid2dOptions& opts) {
  Hybrid2D sys;
  sys.n = n;
  sys.omega1 = omega1;
  sys.b1 = b1;
  sys.b2 = b2;
  sys.h1 = (omega1.x1 - omega1.x0) / (n - 1);
  if (std::abs((omega1.y1 - omega1.y0) / (n - 1) - sys.h1) > 1e-12 * sys.h1)
    throw std::invalid_argument("assemble_hybrid2d: Omega_1 grid must be square");
  sys.mesh = mesh;
  if (!mesh.has_interface)
    throw std::invalid_argument("assemble_hybrid2d: mesh has no interface faces");
  if (std::abs(mesh.y_gamma - omega1.y0) > 1e-12 * sys.h1)
    throw std::invalid_argument("assemble_hybrid2d: interface line mismatch");

  sys.fd = build_sbp(4, n, sys.h1);
  sys.space = make_dg_space(q);
  sys.beta = borrowing_capacity(build_sbp(4, 24, 1.0), 1e-10).beta;

  // interface geometry check and the projection pairs
  std::vector<double> fd_pts(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) fd_pts[static_cast<size_t>(i)] = omega1.x0 + sys.h1 * i;
  // need a provisional operator for interface faces
  DgOperator2D dg_probe;
  {
    IpdgOptions io;
    io.allow_low_penalty = true;
    dg_probe = assemble_ipdg(sys.space, mesh, b2, 1.0, io);
  }
  std::vector<double> dg_breaks;
  for (const auto& f : dg_probe.iface) dg_breaks.push_back(f.x0);
  dg_breaks.push_back(dg_probe.iface.back().x1);
  const double merge_tol = 1e-12 * (omega1.x1 - omega1.x0);
  if (std::abs(dg_breaks.front() - omega1.x0) > merge_tol ||
      std::abs(dg_breaks.back() - omega1.x1) > merge_tol)
    throw std::invalid_argument("assemble_hybrid2d: interface extents do not match");

  Vec Hfd = sys.fd.H;
  sys.pair_gd = compose_fd_dg(fd_pts, dg_breaks, Hfd, 2, PairFlavor::good_d2f, merge_tol);
  sys.pair_gf = compose_fd_dg(fd_pts, dg_breaks, Hfd, 2, PairFlavor::good_f2d, merge_tol);
  const ProjectionPair& pg = opts.swap_pairs ? sys.pair_gf : sys.pair_gd;  // P_d2f good
  const ProjectionPair& pf = opts.swap_pairs ? sys.pair_gd : sys.pair_gf;  // P_f2d good
  const Mat& P_u2w_g = pg.P_d2f;
  const Mat& P_w2u_b = pg.P_f2d;
  const Mat& P_u2w_b = pf.P_d2f;
  const Mat& P_w2u_g = pf.P_f2d;

  // resolved penalties
  const double tau_w_bound = 1.0 / (4.0 * sys.beta);
  sys.tau_w = opts.tau_w > 0 ? opts.tau_w : 1.1 * tau_w_bound;
  sys.tau_fd = opts.tau_fd > 0 ? opts.tau_fd : 1.1 / sys.beta;
  double tau_u_auto = 0.0;
  {
    IpdgOptions io;
    io.allow_low_penalty = true;
    DgOperator2D tmp = assemble_ipdg(sys.space, mesh, b2, 1.0, io);
    // theorem bound 1/C_tr and the per-element budget bound, with margin
    tau_u_auto = 1.1 * std::max(tmp.tau_min, 1.0 / tmp.C_tr);
  }
  sys.tau_u = opts.tau_u > 0 ? opts.tau_u : tau_u_auto;
  sys.sigma_u = sys.tau_w;  // required for the energy identity
  sys.sigma_w = sys.tau_u;
  if (!opts.allow_unstable) {
    if (sys.tau_w < tau_w_bound * (1 - 1e-12))
      throw std::invalid_argument("assemble_hybrid2d: tau_w below 1/(4 beta)");
  }
  IpdgOptions io;
  io.allow_low_penalty = opts.allow_unstable;
  sys.dg = assemble_ipdg(sys.space, mesh, b2, sys.tau_u, io);

  const int nfd = n * n, Ndg = sys.dg.ndof;
  const int N = nfd + Ndg;
  const int Nd = static_cast<int>(sys.dg.M_face.rows());
  const double h1 = sys.h1;

  std::vector<Eigen::Triplet<double>> T;
  T.reserve(static_cast<size_t>(N) * 40);

  // ---- FD block: b1 (D (x) I + I (x) D) ----
  const SpMat& D = sys.fd.D;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SpMat::InnerIterator it(D, k); it; ++it) {
      const int a = static_cast<int>(it.row()), b = static_cast<int>(it.col());
      for (int j = 0; j < n; ++j)  // D acting in x
        T.emplace_back(sys.fd_index(a, j), sys.fd_index(b, j), b1 * it.value());
      for (int i = 0; i < n; ++i)  // D acting in y
        T.emplace_back(sys.fd_index(i, a), sys.fd_index(i, b), b1 * it.value());
    }

  // ---- FD outer Dirichlet SATs (x = x0, x = x1, y = y1) ----
  const Vec Hinv = sys.fd.H.cwiseInverse();
  for (int a = 0; a < n; ++a) {
    const double cl_d = -Hinv(a) * sys.fd.d1(a);               // -H^{-1} d1 (w_left)
    const double cr_d = Hinv(a) * sys.fd.dn(a);                // +H^{-1} dn (w_right)
    for (int j = 0; j < n; ++j) {
      if (cl_d != 0.0) T.emplace_back(sys.fd_index(a, j), sys.fd_index(0, j), b1 * cl_d);
      if (cr_d != 0.0) T.emplace_back(sys.fd_index(a, j), sys.fd_index(n - 1, j), b1 * cr_d);
      if (a == 0)
        T.emplace_back(sys.fd_index(0, j), sys.fd_index(0, j), -b1 * (sys.tau_fd / h1) * Hinv(0));
      if (a == n - 1)
        T.emplace_back(sys.fd_index(n - 1, j), sys.fd_index(n - 1, j),
                       -b1 * (sys.tau_fd / h1) * Hinv(n - 1));
    }
    // top boundary y = y1 (1D right end in y)
    for (int i = 0; i < n; ++i) {
      if (cr_d != 0.0) T.emplace_back(sys.fd_index(i, a), sys.fd_index(i, n - 1), b1 * cr_d);
      if (a == n - 1)
        T.emplace_back(sys.fd_index(i, n - 1), sys.fd_index(i, n - 1),
                       -b1 * (sys.tau_fd / h1) * Hinv(n - 1));
    }
  }

  // ---- interface couplings ----
  // per-face penalty scale: block diagonal 1/h_elem over face node blocks
  Vec dh(Nd);
  for (size_t f = 0; f < sys.dg.iface.size(); ++f)
    dh.segment(4 * static_cast<int>(f), 4).setConstant(1.0 / sys.dg.iface[f].h_elem);
  const SpMat& R = sys.dg.R_iface;
  const SpMat& G = sys.dg.G_iface;  // derivative toward the FD side (-d/dy)
  const Mat& Mf = sys.dg.M_face;

  // FD-side SAT kernels applied along the j = 0 interface row with the 1D
  // y-weights H^{-1} d_1 (SAT1) or H^{-1} e_1 (SAT2..4):
  // v1 = w_G - P_u2w_g u_G ; flux = b1 dG^T w + b2 P_u2w_b u_Gy ;
  // v4 = P_u2w_b Dh (P_w2u_g w_G - u_G)
  // SAT1: -(1/2) b1 (I (x) H^{-1} d1) v1
  // SAT2: -(1/2)    (I (x) H^{-1} e1) flux
  // SAT3: -(b1 tau_w / h1) (I (x) H^{-1} e1) v1
  // SAT4: -(b2 sigma_w)    (I (x) H^{-1} e1) v4
  const Mat P_u2w_b_Dh = P_u2w_b * dh.asDiagonal();
  const SpMat S1_w = to_sparse(Mat::Identity(n, n));       // v1's w_G part
  const SpMat S1_u = SpMat(to_sparse(-P_u2w_g) * R);       // v1's u part (n x Ndg)
  const SpMat S2_u = SpMat(to_sparse(b2 * P_u2w_b) * G);   // flux's u part
  const SpMat S4_w = to_sparse(P_u2w_b_Dh * P_w2u_g);      // v4's w_G part (n x n)
  const SpMat S4_u = SpMat(to_sparse(-P_u2w_b_Dh) * R);    // v4's u part

  auto add_fd_rows = [&](const Vec& ywt, double scale, const SpMat* w_part, const SpMat* u_part,
                         bool with_dgt, double dgt_scale) {
    // rows (i, j) += ywt(j) * scale * [ (w_part row i) . w_G + (u_part row i) . u
    //                                   + dgt_scale * (d_G^T w)_i ]
    for (int j = 0; j < n; ++j) {
      if (ywt(j) == 0.0) continue;
      const double s = ywt(j) * scale;
      if (w_part)
        for (int k = 0; k < w_part->outerSize(); ++k)
          for (SpMat::InnerIterator it(*w_part, k); it; ++it)
            T.emplace_back(sys.fd_index(static_cast<int>(it.row()), j),
                           sys.fd_index(static_cast<int>(it.col()), 0), s * it.value());
      if (u_part)
        for (int k = 0; k < u_part->outerSize(); ++k)
          for (SpMat::InnerIterator it(*u_part, k); it; ++it)
            T.emplace_back(sys.fd_index(static_cast<int>(it.row()), j),
                           nfd + static_cast<int>(it.col()), s * it.value());
      if (with_dgt) {
        // (d_G^T w)_i = - sum_jj d1(jj) w(i, jj)
        for (int i = 0; i < n; ++i)
          for (int jj = 0; jj < n; ++jj)
            if (sys.fd.d1(jj) != 0.0)
              T.emplace_back(sys.fd_index(i, j), sys.fd_index(i, jj),
                             -s * dgt_scale * sys.fd.d1(jj));
      }
    }
  };

  Vec yw_d1 = Vec::Zero(n), yw_e1 = Vec::Zero(n);
  for (int j = 0; j < n; ++j) yw_d1(j) = Hinv(j) * sys.fd.d1(j);
  yw_e1(0) = Hinv(0);

  add_fd_rows(yw_d1, -0.5 * b1, &S1_w, &S1_u, false, 0.0);
  add_fd_rows(yw_e1, -0.5, nullptr, &S2_u, true, b1);
  add_fd_rows(yw_e1, -b1 * sys.tau_w / h1, &S1_w, &S1_u, false, 0.0);
  add_fd_rows(yw_e1, -b2 * sys.sigma_w, &S4_w, &S4_u, false, 0.0);

  // ---- DG rows: Minv (K + couplings) ----
  append_sparse(T, SpMat(sys.dg.Minv * sys.dg.K), nfd, nfd);
  // couplings before Minv:
  //   term2 w-part: +(1/2) b2 G^T Mf P_w2u_g E_G
  //   term3 w-part: -(1/2) b1 R^T Mf P_w2u_b E_d   (E_d = d_G^T extraction)
  //   term4 w-part: +tau_u b2 R^T Mf Dh P_w2u_g E_G
  //   term5: -(sigma_u b1 / h1) R^T Mf P_w2u_b (P_u2w_g R u - E_G w)
  const SpMat Rt = SpMat(R.transpose());
  const SpMat Gt = SpMat(G.transpose());
  const SpMat C2 = SpMat(Gt * to_sparse(0.5 * b2 * (Mf * P_w2u_g)));
  const SpMat C3 = SpMat(Rt * to_sparse(-0.5 * b1 * (Mf * P_w2u_b)));
  const SpMat C4 = SpMat(Rt * to_sparse(sys.tau_u * b2 * (dh.asDiagonal() * Mf * P_w2u_g)));
  const SpMat C5w = SpMat(Rt * to_sparse((sys.sigma_u * b1 / h1) * (Mf * P_w2u_b)));
  const SpMat C5u = SpMat(
      Rt * SpMat(to_sparse(-(sys.sigma_u * b1 / h1) * (Mf * P_w2u_b * P_u2w_g)) * R));

  const SpMat& Minv = sys.dg.Minv;
  auto add_dg_coupling_wG = [&](const SpMat& C) {
    const SpMat Cs = SpMat(Minv * C);
    for (int k = 0; k < Cs.outerSize(); ++k)
      for (SpMat::InnerIterator it(Cs, k); it; ++it)
        T.emplace_back(nfd + static_cast<int>(it.row()),
                       sys.fd_index(static_cast<int>(it.col()), 0), it.value());
  };
  add_dg_coupling_wG(C2);
  add_dg_coupling_wG(C4);
  add_dg_coupling_wG(C5w);
  {  // C3 acts on d_G^T w = -sum_j d1(j) w(i, j)
    const SpMat C3s = SpMat(Minv * C3);
    for (int k = 0; k < C3s.outerSize(); ++k)
      for (SpMat::InnerIterator it(C3s, k); it; ++it)
        for (int jj = 0; jj < n; ++jj)
          if (sys.fd.d1(jj) != 0.0)
            T.emplace_back(nfd + static_cast<int>(it.row()),
                           sys.fd_index(static_cast<int>(it.col()), jj),
                           -it.value() * sys.fd.d1(jj));
  }
  append_sparse(T, SpMat(Minv * C5u), nfd, nfd);

  sys.Q = SpMat(N, N);
  sys.Q.setFromTriplets(T.begin(), T.end());

  // ---- H tilde ----
  std::vector<Eigen::Triplet<double>> Ht;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      Ht.emplace_back(sys.fd_index(i, j), sys.fd_index(i, j), sys.fd.H(i) * sys.fd.H(j));
  append_sparse(Ht, sys.dg.M, nfd, nfd);
  sys.H_tilde = SpMat(N, N);
  sys.H_tilde.setFromTriplets(Ht.begin(), Ht.end());
  return sys;
}

Vec Hybrid2D::forcing(const std::function<double(double, double)>& g) const {
  Vec f = Vec::Zero(size());
  const Vec Hinv = fd.H.cwiseInverse();
  // x = x0 (1D left end): +b1 [H^{-1} d1 + (tau_fd/h) H^{-1} e1] g per y-line
  for (int j = 0; j < n; ++j) {
    const double gl = g(omega1.x0, y_of(j));
    const double gr = g(omega1.x1, y_of(j));
    for (int a = 0; a < n; ++a) {
      if (fd.d1(a) != 0.0) f(fd_index(a, j)) += b1 * Hinv(a) * fd.d1(a) * gl;
      if (fd.dn(a) != 0.0) f(fd_index(a, j)) -= b1 * Hinv(a) * fd.dn(a) * gr;
    }
    f(fd_index(0, j)) += b1 * (tau_fd / h1) * Hinv(0) * gl;
    f(fd_index(n - 1, j)) += b1 * (tau_fd / h1) * Hinv(n - 1) * gr;
  }
  // y = y1 (1D right end in y) per x-line
  for (int i = 0; i < n; ++i) {
    const double gt = g(x_of(i), omega1.y1);
    for (int a = 0; a < n; ++a)
      if (fd.dn(a) != 0.0) f(fd_index(i, a)) -= b1 * Hinv(a) * fd.dn(a) * gt;
    f(fd_index(i, n - 1)) += b1 * (tau_fd / h1) * Hinv(n - 1) * gt;
  }
  // DG outer boundary
  const Vec fb = boundary_forcing(dg, space, g);
  f.tail(dg.ndof) = dg.Minv * fb;
  return f;
}

std::array<SatSurveyRow, 4> sat_truncation_survey(
    const std::vector<int>& ns, const Rect& omega1, InterfaceConfig config, double depth,
    double b1, double b2, const std::function<double(double, double)>& U,
    const std::function<double(double, double)>& Uy) {
  if (ns.size() < 2) throw std::invalid_argument("sat_truncation_survey: need >= 2 levels");
  const int L = static_cast<int>(ns.size());
  Mat in_res(L, 4), ed_res(L, 4);
  Vec hs(L);
  for (int lev = 0; lev < L; ++lev) {
    const int n = ns[static_cast<size_t>(lev)];
    const double h1 = (omega1.x1 - omega1.x0) / (n - 1);
    hs(lev) = h1;
    Rect om2{omega1.x0, omega1.x1, omega1.y0 - depth, omega1.y0};
    const double dx = config == InterfaceConfig::every_point ? h1 : 3.0 * h1;
    const int ny = std::max(2, static_cast<int>(std::lround(depth / dx)) + 1);
    TriMesh mesh = structured_interface_mesh(n, config, om2, ny);
    Hybrid2dOptions opts;
    Hybrid2D sys = assemble_hybrid2d(n, omega1, mesh, 3, b1, b2, opts);

    // exact data
    Vec wG(n), dG(n);
    for (int i = 0; i < n; ++i) {
      const double x = sys.x_of(i);
      wG(i) = U(x, omega1.y0);
      dG(i) = -Uy(x, omega1.y0);  // d_G is the -y derivative
    }
    const Mat X = dof_positions(sys.space, sys.mesh);
    Vec u(sys.dg.ndof);
    for (int d = 0; d < sys.dg.ndof; ++d) u(d) = U(X(d, 0), X(d, 1));
    const SpMat& R = sys.dg.R_iface;
    const SpMat& G = sys.dg.G_iface;
    const int Nd = static_cast<int>(R.rows());
    Vec dh(Nd);
    for (size_t f = 0; f < sys.dg.iface.size(); ++f)
      dh.segment(4 * static_cast<int>(f), 4).setConstant(1.0 / sys.dg.iface[f].h_elem);

    const ProjectionPair& pg = sys.pair_gd;
    const ProjectionPair& pf = sys.pair_gf;
    // group residuals, scaled like their w_tt contributions
    const Vec v1 = (wG - pg.P_d2f * (R * u)) * (b1 / (2.0 * h1 * h1));
    const Vec v2 = (b1 * dG + b2 * (pf.P_d2f * (G * u))) * (1.0 / (2.0 * h1));
    const Vec v3 = (wG - pg.P_d2f * (R * u)) * (b1 * sys.tau_w / (h1 * h1));
    const Vec v4 =
        (pf.P_d2f * (dh.asDiagonal() * (pf.P_f2d * wG - R * u))) * (b2 * sys.sigma_w / h1);
    const int ew = std::max(4, sys.pair_gd.edge_points);
    auto split = [&](const Vec& v, int g) {
      double edge = 0.0, interior = 0.0;
      for (int i = 0; i < n; ++i) {
        const double a = std::abs(v(i));
        if (i < ew || i >= n - ew)
          edge = std::max(edge, a);
        else
          interior = std::max(interior, a);
      }
      in_res(lev, g) = interior;
      ed_res(lev, g) = edge;
    };
    split(v1, 0);
    split(v2, 1);
    split(v3, 2);
    split(v4, 3);
  }
  std::array<SatSurveyRow, 4> out;
  auto fit_order = [&](const Mat& resm, int g) {
    // least squares slope of log r vs log h
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int l = 0; l < L; ++l) {
      const double x = std::log(hs(l)), y = std::log(std::max(resm(l, g), 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (L * sxy - sx * sy) / (L * sxx - sx * sx);
  };
  for (int g = 0; g < 4; ++g) {
    out[static_cast<size_t>(g)].interior_order = fit_order(in_res, g);
    out[static_cast<size_t>(g)].edge_order = fit_order(ed_res, g);
  }
  return out;
}

}  // namespace waveglue

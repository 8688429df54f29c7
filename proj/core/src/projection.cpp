#include "waveglue/projection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "waveglue/dg1d.hpp"

namespace waveglue {

namespace {

Vec ref_nodes(int q) { return Vec::LinSpaced(q + 1, 0.0, 1.0); }

// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
void gauss_legendre(int n, Vec& x, Vec& w) {
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
    w(n - 1 - i) = 1.0 / ((1.0 - t * t) * dp * dp) * 2.0 * 0.5;
  }
}

}  // namespace

Vec GlueMesh::node_positions() const {
  const int q = degree, ne = n_elements();
  Vec out(n_dofs());
  for (int e = 0; e < ne; ++e) {
    const double a = breakpoints[e], b = breakpoints[e + 1];
    for (int i = 0; i <= q; ++i) out(e * (q + 1) + i) = a + (b - a) * i / q;
  }
  return out;
}

Mat GlueMesh::mass() const {
  const int q = degree, ne = n_elements();
  const Mat M1 = local_mass(q, 1.0);
  Mat M = Mat::Zero(n_dofs(), n_dofs());
  for (int e = 0; e < ne; ++e) {
    const double len = breakpoints[e + 1] - breakpoints[e];
    M.block(e * (q + 1), e * (q + 1), q + 1, q + 1) = len * M1;
  }
  return M;
}

GlueMesh build_glue_mesh(const std::vector<double>& fd_points,
                         const std::vector<double>& dg_breaks, double merge_tol, int degree) {
  if (fd_points.size() < 2 || dg_breaks.size() < 2)
    throw std::invalid_argument("build_glue_mesh: need at least two points per side");
  if (std::abs(fd_points.front() - dg_breaks.front()) > merge_tol ||
      std::abs(fd_points.back() - dg_breaks.back()) > merge_tol)
    throw std::invalid_argument("build_glue_mesh: endpoint mismatch beyond merge_tol");
  GlueMesh g;
  g.degree = degree;
  g.breakpoints = fd_points;  // FD coordinates are kept on merges
  for (double x : dg_breaks) {
    bool merged = false;
    for (double y : fd_points)
      if (std::abs(x - y) <= merge_tol) {
        merged = true;
        break;
      }
    if (!merged) g.breakpoints.push_back(x);
  }
  std::sort(g.breakpoints.begin(), g.breakpoints.end());
  for (size_t i = 1; i < g.breakpoints.size(); ++i)
    if (g.breakpoints[i] - g.breakpoints[i - 1] <= merge_tol)
      throw std::invalid_argument("build_glue_mesh: breakpoints collapse under merge_tol");
  return g;
}

Mat build_basis_transfer(const GlueMesh& src, const GlueMesh& dst) {
  if (src.degree != dst.degree)
    throw std::invalid_argument("build_basis_transfer: degree mismatch");
  const int q = src.degree;
  const double span = src.breakpoints.back() - src.breakpoints.front();
  const double tol = 1e-12 * span;
  auto contains = [&](const std::vector<double>& big, const std::vector<double>& small) {
    for (double x : small) {
      bool found = false;
      for (double y : big)
        if (std::abs(x - y) <= tol) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  };
  const LagrangeBasis1D basis = make_lagrange_basis(q);

  if (contains(dst.breakpoints, src.breakpoints)) {
    // dst refines src: exact re-expansion by evaluation.
    Mat P = Mat::Zero(dst.n_dofs(), src.n_dofs());
    for (int E = 0; E < dst.n_elements(); ++E) {
      const double a = dst.breakpoints[E], b = dst.breakpoints[E + 1];
      // containing src element
      int e = -1;
      for (int s = 0; s < src.n_elements(); ++s)
        if (src.breakpoints[s] <= a + tol && b <= src.breakpoints[s + 1] + tol) {
          e = s;
          break;
        }
      if (e < 0) throw std::invalid_argument("build_basis_transfer: meshes are not nested");
      const double sa = src.breakpoints[e], sl = src.breakpoints[e + 1] - sa;
      for (int i = 0; i <= q; ++i) {
        const double x = a + (b - a) * i / q;
        const double xi = (x - sa) / sl;
        for (int j = 0; j <= q; ++j) P(E * (q + 1) + i, e * (q + 1) + j) = basis.eval(j, xi);
      }
    }
    return P;
  }
  if (contains(src.breakpoints, dst.breakpoints)) {
    // dst coarsens src: L2 projection M_dst^{-1} * mixed mass.
    Mat mixed = Mat::Zero(dst.n_dofs(), src.n_dofs());
    Vec gx, gw;
    gauss_legendre(q + 1, gx, gw);
    for (int e = 0; e < src.n_elements(); ++e) {
      const double a = src.breakpoints[e], b = src.breakpoints[e + 1], len = b - a;
      int E = -1;
      for (int s = 0; s < dst.n_elements(); ++s)
        if (dst.breakpoints[s] <= a + tol && b <= dst.breakpoints[s + 1] + tol) {
          E = s;
          break;
        }
      if (E < 0) throw std::invalid_argument("build_basis_transfer: meshes are not nested");
      const double Da = dst.breakpoints[E], Dl = dst.breakpoints[E + 1] - Da;
      for (int g = 0; g < gx.size(); ++g) {
        const double x = a + len * gx(g), wq = len * gw(g);
        const double xs = (x - a) / len, xd = (x - Da) / Dl;
        for (int i = 0; i <= q; ++i)
          for (int j = 0; j <= q; ++j)
            mixed(E * (q + 1) + i, e * (q + 1) + j) += wq * basis.eval(i, xd) * basis.eval(j, xs);
      }
    }
    return dst.mass().ldlt().solve(mixed);
  }
  throw std::invalid_argument("build_basis_transfer: neither space contains the other");
}

namespace {

struct SolveLayout {
  int W, EC, GC, edge_elems, edge_points;
};

// Joint interior + closure solve for the compatible pair; see build_f2p_pair.
FdPolyPair solve_pair(int n, int deg_f2p_edge, int deg_p2f_edge, const SolveLayout& L,
                      const Vec& Hw, bool* feasible) {
  const int q = 3;
  const Vec s = ref_nodes(q);
  const Mat M1 = local_mass(q, 1.0);
  const int W = L.W, EC = L.EC, GC = L.GC;
  const int n0 = 2 * W + 1;  // offsets -W..W   (node type 0, on grid points)
  const int n1 = 2 * W + 2;  // offsets -W..W+1 (node type 1, at 1/3)
  const int nclo = 4 * EC * GC;
  const int nunk = n0 + n1 + nclo;
  auto cidx = [&](int e, int nu, int g) { return n0 + n1 + (4 * e + nu) * GC + g; };

  // row (e, nu) described as unknown-index contributions at grid columns
  struct Entry {
    int g;
    int ui;
  };
  auto row_entries = [&](int e, int nu) {
    std::vector<Entry> out;
    if (e < EC) {
      for (int g = 0; g < GC; ++g) out.push_back({g, cidx(e, nu, g)});
    } else if (e >= n - 1 - EC) {
      for (int g = n - GC; g < n; ++g) out.push_back({g, cidx(n - 2 - e, 3 - nu, n - 1 - g)});
    } else if (nu == 0 || nu == 3) {
      for (int ii = 0; ii < n0; ++ii) {
        const int k = -W + ii;
        out.push_back({nu == 0 ? e + k : e + 1 - k, ii});
      }
    } else {
      for (int ii = 0; ii < n1; ++ii) {
        const int k = -W + ii;
        out.push_back({nu == 1 ? e + k : e + 1 - k, n0 + ii});
      }
    }
    return out;
  };

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  auto push = [&](const Eigen::RowVectorXd& r, double v) {
    rows.push_back(r);
    rhs.push_back(v);
  };
  auto powq = [](double x, int qq) { return qq == 0 ? 1.0 : std::pow(x, qq); };

  // (E1) interior node exactness, in element-local coordinates
  const int erep = EC + W + 1;
  for (int nu = 0; nu < 2; ++nu)
    for (int qq = 0; qq <= 3; ++qq) {
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nunk);
      for (const auto& en : row_entries(erep, nu)) r(en.ui) += powq(en.g - erep, qq);
      push(r, powq(s(nu), qq));
    }
  // (E1) closure element rows, coordinates local to the element
  for (int e = 0; e < EC; ++e)
    for (int nu = 0; nu < 4; ++nu) {
      const int dg = (e < L.edge_elems) ? deg_f2p_edge : 3;
      for (int qq = 0; qq <= dg; ++qq) {
        Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nunk);
        for (const auto& en : row_entries(e, nu)) r(en.ui) += powq(en.g - e, qq);
        push(r, powq(s(nu), qq));
      }
    }
  // (E2) dual-row exactness: sum_l P[l,i] mu_l = H_i * (x_i - c)^q with center c = i.
  auto mu = [&](int e, int qq, double c) {
    Vec v(4);
    for (int m = 0; m < 4; ++m) v(m) = powq(e + s(m) - c, qq);
    return Vec(M1 * v);
  };
  const int reach = W + 2;
  const int i0 = EC + reach + 2;  // representative interior dual row
  const int Imax = GC + reach + 2;
  auto dual_condition = [&](int i, int qq) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nunk);
    const int elo = std::max(0, i - reach - 2), ehi = std::min(n - 1, i + reach + 2);
    for (int e = elo; e < ehi; ++e) {
      const Vec m = mu(e, qq, i);
      for (int nu = 0; nu < 4; ++nu)
        for (const auto& en : row_entries(e, nu))
          if (en.g == i) r(en.ui) += m(nu);
    }
    push(r, Hw(i) * powq(0.0, qq));
  };
  for (int qq = 0; qq <= 3; ++qq) dual_condition(i0, qq);
  for (int i = 0; i < Imax; ++i) {
    const int dg = (i < L.edge_points) ? deg_p2f_edge : 3;
    for (int qq = 0; qq <= dg; ++qq) dual_condition(i, qq);
  }

  Mat Amat(static_cast<int>(rows.size()), nunk);
  Vec b(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    Amat.row(static_cast<int>(i)) = rows[i];
    b(static_cast<int>(i)) = rhs[i];
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(Amat);
  Vec x = cod.solve(b);
  for (int it = 0; it < 2; ++it) x += cod.solve(b - Amat * x);  // refinement
  const double resid = (Amat * x - b).norm() / std::max(1.0, b.norm());
  *feasible = resid < 1e-9;
  FdPolyPair out;
  if (!*feasible) return out;

  Mat P = Mat::Zero(4 * (n - 1), n);
  for (int e = 0; e < n - 1; ++e)
    for (int nu = 0; nu < 4; ++nu)
      for (const auto& en : row_entries(e, nu)) P(4 * e + nu, en.g) += x(en.ui);
  out.P_f2p = P;
  out.edge_elements = L.edge_elems;
  out.edge_points = L.edge_points;
  return out;
}

}  // namespace

FdPolyPair build_f2p_pair_degrees(int n, int p, int deg_f2p_edge, int deg_p2f_edge) {
  if (p != 2) throw std::invalid_argument("build_f2p_pair: only p = 2 is supported");
  static const SolveLayout ladder[] = {
      {2, 3, 6, 2, 4}, {2, 3, 8, 2, 4}, {3, 4, 8, 2, 4}, {3, 4, 10, 2, 4}, {4, 6, 12, 2, 4}};
  const int n_min = 2 * (6 + 2 + 4) + 2;
  if (n < n_min)
    throw std::invalid_argument("build_f2p_pair: n must be at least " + std::to_string(n_min));
  Vec Hw = Vec::Ones(n);
  Hw.head(4) = Vec{{17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48}};
  Hw.tail(4) = Vec{{49.0 / 48, 43.0 / 48, 59.0 / 48, 17.0 / 48}};
  for (const auto& L : ladder) {
    if (n < 2 * (L.GC + L.W + 3)) continue;
    bool ok = false;
    FdPolyPair pair = solve_pair(n, deg_f2p_edge, deg_p2f_edge, L, Hw, &ok);
    if (!ok) continue;
    // compatible reverse: P_p2f = H^{-1} (M_p P_f2p)^T on the unit-spacing grid
    GlueMesh tp;
    tp.degree = 3;
    tp.breakpoints.resize(n);
    for (int i = 0; i < n; ++i) tp.breakpoints[i] = i;
    pair.P_p2f = Hw.cwiseInverse().asDiagonal() * (tp.mass() * pair.P_f2p).transpose();
    return pair;
  }
  throw std::runtime_error(
      "build_f2p_pair: accuracy system infeasible (rank deficiency); the requested edge orders "
      "admit no norm-compatible pair");
}

FdPolyPair build_f2p_pair(int n, int p, PairFlavor flavor) {
  // good edge rows are exact one degree higher (order p+1 vs p)
  const int good = p, bad = p - 1;
  return flavor == PairFlavor::good_d2f ? build_f2p_pair_degrees(n, p, bad, good)
                                        : build_f2p_pair_degrees(n, p, good, bad);
}

ProjectionPair compose_fd_dg(const std::vector<double>& fd_points,
                             const std::vector<double>& dg_breaks, const Vec& H_fd, int p,
                             PairFlavor flavor, double merge_tol) {
  const int n = static_cast<int>(fd_points.size());
  if (H_fd.size() != n) throw std::invalid_argument("compose_fd_dg: H size mismatch");
  const double h = fd_points[1] - fd_points[0];
  for (int i = 1; i < n; ++i)
    if (std::abs(fd_points[i] - fd_points[i - 1] - h) > merge_tol)
      throw std::invalid_argument("compose_fd_dg: FD interface grid must be uniform");

  FdPolyPair base = build_f2p_pair(n, p, flavor);

  GlueMesh tp;
  tp.degree = 3;
  tp.breakpoints = fd_points;
  GlueMesh td;
  td.degree = 3;
  td.breakpoints = dg_breaks;
  GlueMesh tg = build_glue_mesh(fd_points, dg_breaks, merge_tol);

  const Mat P_p2g = build_basis_transfer(tp, tg);
  const Mat P_g2p = build_basis_transfer(tg, tp);
  const Mat P_g2d = build_basis_transfer(tg, td);
  const Mat P_d2g = build_basis_transfer(td, tg);

  // The unit-spacing pair maps values; positions scale by h but nodal values do
  // not, so P_f2p carries over to the physical grid unchanged. The compatible
  // reverse must use the physical H and M_p; both scale by h, so P_p2f is
  // unchanged as well.
  ProjectionPair out;
  out.flavor = flavor;
  out.P_f2d = P_g2d * P_p2g * base.P_f2p;
  out.P_d2f = base.P_p2f * P_g2p * P_d2g;
  out.H = H_fd;
  out.M_d = td.mass();
  out.edge_points = base.edge_points;
  out.edge_faces = 0;
  const double x0 = fd_points.front(), x1 = fd_points.back();
  for (int f = 0; f < td.n_elements(); ++f) {
    if (td.breakpoints[f] < x0 + base.edge_points * h - merge_tol ||
        td.breakpoints[f + 1] > x1 - base.edge_points * h + merge_tol)
      ++out.edge_faces;
  }
  out.edge_faces /= 2;  // per side
  out.compat_residual =
      (out.H.asDiagonal() * out.P_d2f - (out.M_d * out.P_f2d).transpose()).cwiseAbs().maxCoeff();
  return out;
}

AccuracyReport verify_accuracy(const Mat& P, const Vec& src_positions, const Vec& dst_positions,
                               int max_degree, int edge_rows_front, int edge_rows_back,
                               double tol) {
  const int nr = static_cast<int>(P.rows());
  AccuracyReport rep;
  rep.row_degree.assign(nr, -1);
  for (int i = 0; i < nr; ++i) {
    const double c = dst_positions(i);
    for (int q = 0; q <= max_degree; ++q) {
      double acc = 0.0, scale = 1.0;
      for (int j = 0; j < P.cols(); ++j) {
        const double t = q == 0 ? 1.0 : std::pow(src_positions(j) - c, q);
        acc += P(i, j) * t;
        scale += std::abs(P(i, j) * t);
      }
      const double want = q == 0 ? 1.0 : 0.0;
      if (std::abs(acc - want) > tol * scale) break;
      rep.row_degree[i] = q;
    }
  }
  auto cls_min = [&](int lo, int hi) {
    int m = max_degree;
    for (int i = lo; i < hi; ++i) m = std::min(m, rep.row_degree[i]);
    return m;
  };
  rep.edge_degree = std::min(cls_min(0, edge_rows_front), cls_min(nr - edge_rows_back, nr));
  rep.interior_degree = cls_min(edge_rows_front, nr - edge_rows_back);
  return rep;
}

}  // namespace waveglue

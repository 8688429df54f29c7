#include "waveglue/hybrid1d.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

namespace waveglue {

InverseConstant inverse_constant(int k) {
  if (k < 1) throw std::invalid_argument("inverse_constant: degree must be >= 1");
  // u in P^k on [0,1]; q = u_x in P^{k-1}. Minimize int q^2 / (q(0)^2 + q(1)^2).
  const int d = k;  // dim of P^{k-1}
  Mat G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = 1.0 / (i + j + 1);
  Vec v0 = Vec::Zero(d), v1 = Vec::Ones(d);
  v0(0) = 1.0;
  const Mat B = v0 * v0.transpose() + v1 * v1.transpose();
  // B x = mu G x; beta_inv = 1/mu_max
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(B, G);
  const int last = d - 1;
  InverseConstant out;
  out.degree = k;
  out.beta_inv = 1.0 / es.eigenvalues()(last);
  out.extremal = es.eigenvectors().col(last);
  return out;
}

namespace {

void add_outer(std::vector<Eigen::Triplet<double>>& T, int row, const Vec& col_pattern,
               int col_off, double scale) {
  for (int j = 0; j < col_pattern.size(); ++j)
    if (col_pattern(j) != 0.0) T.emplace_back(row, col_off + j, scale * col_pattern(j));
}

}  // namespace

double Hybrid1D::position(int i) const {
  if (i < fd.n) return -(fd.n - 1 - i) * fd.h;
  const int l = i - fd.n;
  const int e = l / 4, nu = l % 4;
  return (e + nu / 3.0) * dg.h;
}

Hybrid1D assemble_hybrid1d(const SbpOperator1D& fd, const DgBlocks1D& dg, int m, double tau,
                           const Hybrid1dOptions& opts) {
  if (std::abs(fd.h - dg.h) > 1e-14 * fd.h)
    throw std::invalid_argument("assemble_hybrid1d: FD and DG must share h at the interface");
  if (dg.degree != 3) throw std::invalid_argument("assemble_hybrid1d: degree 3 DG required");
  if (m < 2) throw std::invalid_argument("assemble_hybrid1d: need at least 2 elements");

  Hybrid1D sys;
  sys.fd = fd;
  sys.dg = dg;
  sys.m = m;
  sys.tau = tau;
  sys.beta = borrowing_capacity(build_sbp(fd.interior_order, 24, 1.0), 1e-10).beta;
  sys.beta_inv = inverse_constant(dg.degree).beta_inv;
  sys.beta_tilde = std::min(sys.beta, sys.beta_inv);
  const double tau_bound = 1.0 / (2.0 * sys.beta_tilde);
  if (tau < tau_bound * (1.0 - 1e-12) && !opts.allow_unstable_tau)
    throw std::invalid_argument(
        "assemble_hybrid1d: tau = " + std::to_string(tau) + " is below the stability bound "
        "1/(2*beta_tilde) = " + std::to_string(tau_bound) +
        " (energy estimate); pass allow_unstable_tau to override");
  sys.tau_left = opts.tau_left > 0 ? opts.tau_left : 1.1 / sys.beta;
  sys.tau_right = opts.tau_right > 0 ? opts.tau_right : 1.1 / sys.beta_inv;

  const int nf = fd.n, N = nf + 4 * m;
  const double h = fd.h;
  const Vec Hinv = fd.H.cwiseInverse();
  std::vector<Eigen::Triplet<double>> T;
  T.reserve(static_cast<size_t>(N) * 14);

  // FD rows: D2 plus interface and left-boundary SATs
  for (int k = 0; k < fd.D.outerSize(); ++k)
    for (SpMat::InnerIterator it(fd.D, k); it; ++it)
      T.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  // interface: u_G = u(elem0,node0) at col nf; u_xG = gL . u(elem0)
  for (int i = 0; i < nf; ++i) {
    const double en_i = (i == nf - 1) ? 1.0 : 0.0;
    const double dn_i = fd.dn(i);
    const double e1_i = (i == 0) ? 1.0 : 0.0;
    const double d1_i = fd.d1(i);
    // SAT1: -(1/2) H^{-1} e_n (d_n^T w - u_xG)
    if (en_i != 0.0) {
      add_outer(T, i, fd.dn, 0, -0.5 * Hinv(i));
      add_outer(T, i, dg.gL, nf, 0.5 * Hinv(i));
    }
    // SAT3: +(1/2) H^{-1} d_n (e_n^T w - u_G)
    if (dn_i != 0.0) {
      T.emplace_back(i, nf - 1, 0.5 * Hinv(i) * dn_i);
      T.emplace_back(i, nf, -0.5 * Hinv(i) * dn_i);
    }
    // SAT2: -(tau/h) H^{-1} e_n (e_n^T w - u_G)
    if (en_i != 0.0) {
      T.emplace_back(i, nf - 1, -(tau / h) * Hinv(i));
      T.emplace_back(i, nf, (tau / h) * Hinv(i));
    }
    // left Dirichlet: -H^{-1} d_1 (w_1 - g) - (tau_left/h) H^{-1} e_1 (w_1 - g)
    if (d1_i != 0.0) T.emplace_back(i, 0, -Hinv(i) * d1_i);
    if (e1_i != 0.0) T.emplace_back(i, 0, -(sys.tau_left / h) * Hinv(i));
  }

  // DG rows
  const Mat Minv = dg.M_loc.inverse();
  const Vec eL = Vec::Unit(4, 0), eR = Vec::Unit(4, 3);
  for (int j = 0; j < m; ++j) {
    const int r0 = nf + 4 * j;
    Mat self = dg.D2;
    if (j > 0) {
      const Mat& left = dg.D1;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (left(a, b) != 0.0) T.emplace_back(r0 + a, r0 - 4 + b, left(a, b));
    } else {
      // interface neighbor data: value e_n^T w, derivative d_n^T w
      const Vec cval = Minv * (0.5 * dg.gL + (tau / h) * eL);
      const Vec cder = Minv * (-0.5 * eL);
      for (int a = 0; a < 4; ++a) {
        if (cval(a) != 0.0) T.emplace_back(r0 + a, nf - 1, cval(a));
        add_outer(T, r0 + a, fd.dn, 0, cder(a));
      }
    }
    if (j < m - 1) {
      const Mat& right = dg.D3;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (right(a, b) != 0.0) T.emplace_back(r0 + a, r0 + 4 + b, right(a, b));
    } else {
      // right Dirichlet: replace the half-weight face terms by full SIPG ones
      Mat fix = 0.5 * (eR * dg.gR.transpose() + dg.gR * eR.transpose()) -
                (sys.tau_right - tau) / h * (eR * eR.transpose());
      self += Minv * fix;
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (self(a, b) != 0.0) T.emplace_back(r0 + a, r0 + b, self(a, b));
  }

  sys.Q = SpMat(N, N);
  sys.Q.setFromTriplets(T.begin(), T.end());

  std::vector<Eigen::Triplet<double>> Ht;
  for (int i = 0; i < nf; ++i) Ht.emplace_back(i, i, fd.H(i));
  for (int j = 0; j < m; ++j)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) Ht.emplace_back(nf + 4 * j + a, nf + 4 * j + b, dg.M_loc(a, b));
  sys.H_tilde = SpMat(N, N);
  sys.H_tilde.setFromTriplets(Ht.begin(), Ht.end());

  for (int r = 0; r < 4; ++r) sys.iface_rows[r] = nf - 4 + r;
  for (int r = 0; r < 4; ++r) sys.iface_rows[4 + r] = nf + r;

  // Dirichlet data directions (z_tt += g(t) * bc)
  sys.bc_left = Vec::Zero(N);
  for (int i = 0; i < nf; ++i) {
    if (fd.d1(i) != 0.0) sys.bc_left(i) += Hinv(i) * fd.d1(i);
    if (i == 0) sys.bc_left(i) += (sys.tau_left / h) * Hinv(i);
  }
  sys.bc_right = Vec::Zero(N);
  const Vec bcr = Minv * (-dg.gR + (sys.tau_right / h) * eR);
  for (int a = 0; a < 4; ++a) sys.bc_right(nf + 4 * (m - 1) + a) = bcr(a);
  return sys;
}

double energy(const Vec& z, const Vec& zt, const Hybrid1D& sys) {
  const int nf = sys.fd.n, m = sys.m;
  const double h = sys.fd.h, tau = sys.tau;
  if (z.size() != sys.size() || zt.size() != sys.size())
    throw std::invalid_argument("energy: dimension mismatch");

  double E = zt.dot(sys.H_tilde * zt);
  const Vec w = z.head(nf);
  E += w.dot(sys.fd.A.selfadjointView<Eigen::Lower>() * w);
  // unit element stiffness: (u_x, u_x)_I = u^T (K1/h) u
  static const Mat K1 = [] {
    const LagrangeBasis1D basis = make_lagrange_basis(3);
    Mat Kd(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int a = 1; a < 4; ++a)
          for (int bq = 1; bq < 4; ++bq)
            s += a * basis.coeff(a, i) * bq * basis.coeff(bq, j) / (a + bq - 1);
        Kd(i, j) = s;
      }
    return Kd;
  }();
  for (int j = 0; j < m; ++j) {
    const Vec u = z.segment(nf + 4 * j, 4);
    E += u.dot(K1 * u) / h;
  }
  // interface terms
  const double wn = z(nf - 1);
  const double dnw = sys.fd.dn.dot(w);
  const double uG = z(nf);
  const double uxG = sys.dg.gL.dot(z.segment(nf, 4));
  E += -(wn - uG) * (dnw + uxG) + (tau / h) * (wn - uG) * (wn - uG);
  // inter-element fluxes
  for (int j = 1; j < m; ++j) {
    const Vec um = z.segment(nf + 4 * (j - 1), 4), up = z.segment(nf + 4 * j, 4);
    const double jump = um(3) - up(0);
    const double ssum = sys.dg.gR.dot(um) + sys.dg.gL.dot(up);
    E += -jump * ssum + (tau / h) * jump * jump;
  }
  // outer boundaries (homogeneous data)
  const double d1w = sys.fd.d1.dot(w);
  E += 2.0 * z(0) * d1w + (sys.tau_left / h) * z(0) * z(0);
  const Vec ulast = z.segment(nf + 4 * (m - 1), 4);
  const double uR = ulast(3), uxR = sys.dg.gR.dot(ulast);
  E += -2.0 * uR * uxR + (sys.tau_right / h) * uR * uR;
  return E;
}

double energy_quadratic(const Vec& z, const Vec& zt, const Hybrid1D& sys) {
  return zt.dot(sys.H_tilde * zt) - z.dot(sys.H_tilde * (sys.Q * z));
}

InterfaceTruncation truncation_interface(double tau, const SmoothFunction& f,
                                         const std::vector<double>& hs) {
  if (hs.size() < 3) throw std::invalid_argument("truncation_interface: need >= 3 levels");
  const int nf = 16, m = 8;
  const int nh = static_cast<int>(hs.size());
  Mat res(nh, 8);
  Mat pos(nh, 8);
  for (int a = 0; a < nh; ++a) {
    const double h = hs[a];
    const SbpOperator1D fd = build_sbp(4, nf, h);
    const DgBlocks1D dg = assemble_dg1d_blocks(3, h, tau);
    Hybrid1dOptions opts;
    opts.allow_unstable_tau = true;  // truncation only; stability is irrelevant here
    const Hybrid1D sys = assemble_hybrid1d(fd, dg, m, tau, opts);
    Vec z(sys.size());
    for (int i = 0; i < sys.size(); ++i) z(i) = f.f(sys.position(i));
    const Vec qz = sys.Q * z;
    for (int r = 0; r < 8; ++r) {
      const int row = sys.iface_rows[r];
      const double x = sys.position(row);
      res(a, r) = qz(row) - f.d2(x);
      pos(a, r) = x;
    }
  }
  InterfaceTruncation out;
  out.h2_coeffs = Vec(8);
  double r2 = 0.0, n2 = 0.0;
  for (int r = 0; r < 8; ++r) {
    Mat Amat(nh, 3);
    Vec b(nh);
    for (int a = 0; a < nh; ++a) {
      const double h = hs[a], x = pos(a, r);
      Amat(a, 0) = h * h * f.d4(x);
      Amat(a, 1) = h * h * h * f.d5(x);
      Amat(a, 2) = h * h * h * h * f.d6(x);
      b(a) = res(a, r);
    }
    const Vec c = Amat.completeOrthogonalDecomposition().solve(b);
    out.h2_coeffs(r) = c(0);
    r2 += (Amat * c - b).squaredNorm();
    n2 += b.squaredNorm();
  }
  out.fit_residual = std::sqrt(r2 / std::max(n2, 1e-300));
  if (out.fit_residual > 1e-2)
    throw std::runtime_error("truncation_interface: poor fit (non-smooth input?)");
  return out;
}

RatMat interface_block_rational(const Rat& tau) {
  // rows: x4 x3 x2 x1 | DG element 1 ; cols: x6..x1 | u1 (4) | u2 (4)
  RatMat C(8, 14);
  // (4,2) closure rows of D2, left-boundary orientation
  const std::vector<std::vector<Rat>> D2rows = {
      {Rat(2), Rat(-5), Rat(4), Rat(-1)},
      {Rat(1), Rat(-2), Rat(1)},
      {Rat(-4, 43), Rat(59, 43), Rat(-110, 43), Rat(59, 43), Rat(-4, 43)},
      {Rat(-1, 49), Rat(0), Rat(59, 49), Rat(-118, 49), Rat(64, 49), Rat(-4, 49)}};
  const std::vector<Rat> Hc = {Rat(17, 48), Rat(59, 48), Rat(43, 48), Rat(49, 48)};
  const std::vector<Rat> d1c = {Rat(-11, 6), Rat(3), Rat(-3, 2), Rat(1, 3)};
  auto fdcol = [](int k) { return 6 - k; };  // x_k -> column, k = 1..6
  // d_n coefficient of w at x_r (times 1/h): mirror flips the sign of d1
  auto dnc = [&](int r) { return -d1c[static_cast<size_t>(r - 1)]; };

  // pure D2, mirrored: row of x_r uses closure row r reversed over x_1..x_len
  for (int r = 1; r <= 4; ++r) {
    const int row = 4 - r;
    const auto& c = D2rows[static_cast<size_t>(r - 1)];
    for (size_t idx = 0; idx < c.size(); ++idx) C(row, fdcol(static_cast<int>(idx) + 1)) += c[idx];
  }
  // SAT3 on every closure row with d_n support
  for (int r = 1; r <= 4; ++r) {
    const int row = 4 - r;
    const Rat c = Rat(1, 2) / Hc[static_cast<size_t>(r - 1)] * dnc(r);
    C(row, fdcol(1)) += c;
    C(row, 6) -= c;
  }
  // row x1: SAT1 and the penalty SAT
  {
    const int row = 3;
    const Rat H1 = Hc[0];
    for (int r = 1; r <= 4; ++r) C(row, fdcol(r)) += -Rat(1, 2) / H1 * dnc(r);
    const std::vector<Rat> gLh = {Rat(-11, 2), Rat(9), Rat(-9, 2), Rat(1)};
    for (int i = 0; i < 4; ++i) C(row, 6 + i) += Rat(1, 2) / H1 * gLh[static_cast<size_t>(i)];
    C(row, fdcol(1)) += -tau / H1;
    C(row, 6) += tau / H1;
  }
  // DG rows: self and right-neighbor blocks, interface data from w
  const RatMat blocks = dg1d_block_rational(3, tau);  // [D1 | D2 | D3] * h^2
  const RatMat Minv = local_mass_rational(3).inverse();
  const std::vector<Rat> gLh = {Rat(-11, 2), Rat(9), Rat(-9, 2), Rat(1)};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      C(4 + i, 6 + j) += blocks(i, 4 + j);
      C(4 + i, 10 + j) += blocks(i, 8 + j);
    }
    // value coupling: M^{-1}(gL/2 + tau eL); derivative coupling: M^{-1}(-eL/2) d_n^T
    Rat cval(0), cder(0);
    for (int j = 0; j < 4; ++j) {
      const Rat eL(j == 0 ? 1 : 0);
      cval += Minv(i, j) * (Rat(1, 2) * gLh[static_cast<size_t>(j)] + tau * eL);
      cder += Minv(i, j) * (-Rat(1, 2)) * eL;
    }
    C(4 + i, fdcol(1)) += cval;
    for (int r = 1; r <= 4; ++r) C(4 + i, fdcol(r)) += cder * dnc(r);
  }
  return C;
}

}  // namespace waveglue

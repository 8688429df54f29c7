#include "waveglue/dg1d.hpp"

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace waveglue {

namespace {

// Rational Lagrange basis on equispaced nodes j/k: column i holds the monomial
// coefficients of phi_i. Exact via Gauss-Jordan on the Vandermonde matrix.
RatMat lagrange_coeff_rational(int k) {
  const int m = k + 1;
  RatMat V(m, m);
  for (int i = 0; i < m; ++i) {
    Rat x(i, k == 0 ? 1 : k);
    Rat p(1);
    for (int j = 0; j < m; ++j) {
      V(i, j) = p;
      p = p * x;
    }
  }
  // phi_i coefficients solve V^T c = e_i, i.e. coeff = (V^{-1})^T? Work it out:
  // phi_i(x_j) = delta_ij with phi_i(x) = sum_m c_mi x^m  ->  V c_i = e_i.
  return V.inverse();
}

Rat integrate_poly_product(const RatMat& coeff, int i, int j, bool derivative) {
  // integral over [0,1] of p_i(x) p_j(x) (or p_i' p_j') with p columns of coeff
  const int m = coeff.rows();
  std::vector<Rat> a(m), b(m);
  for (int r = 0; r < m; ++r) { a[r] = coeff(r, i); b[r] = coeff(r, j); }
  if (derivative) {
    std::vector<Rat> da(m, Rat(0)), db(m, Rat(0));
    for (int r = 1; r < m; ++r) { da[r - 1] = Rat(r) * a[r]; db[r - 1] = Rat(r) * b[r]; }
    a = da; b = db;
  }
  Rat s(0);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      if (a[r].num == 0 || b[c].num == 0) continue;
      s += a[r] * b[c] / Rat(r + c + 1);
    }
  return s;
}

RatMat mass_rational(int k) {
  const RatMat coeff = lagrange_coeff_rational(k);
  const int m = k + 1;
  RatMat M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) M(i, j) = integrate_poly_product(coeff, i, j, false);
  return M;
}

RatMat stiffness_rational(int k) {
  const RatMat coeff = lagrange_coeff_rational(k);
  const int m = k + 1;
  RatMat K(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) K(i, j) = integrate_poly_product(coeff, i, j, true);
  return K;
}

// endpoint derivative values phi_i'(0) and phi_i'(1), unit element
void endpoint_derivs_rational(int k, std::vector<Rat>& gL, std::vector<Rat>& gR) {
  const RatMat coeff = lagrange_coeff_rational(k);
  const int m = k + 1;
  gL.assign(m, Rat(0));
  gR.assign(m, Rat(0));
  for (int i = 0; i < m; ++i) {
    Rat sL(0), sR(0);
    for (int r = 1; r < m; ++r) {
      sL += (r == 1) ? Rat(r) * coeff(r, i) : Rat(0);
      sR += Rat(r) * coeff(r, i);
    }
    gL[i] = sL;
    gR[i] = sR;
  }
}

Mat rat_to_mat(const RatMat& r) {
  Mat m(r.rows(), r.cols());
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) m(i, j) = r(i, j).to_double();
  return m;
}

// Weak-form neighbor blocks on the unit element with unit penalty scale:
// A1 = -1/2 eL gR^T + 1/2 gL eR^T + tau eL eR^T
// A2 = -K + 1/2(eR gR^T + gR eR^T) - 1/2(eL gL^T + gL eL^T) - tau(eR eR^T + eL eL^T)
// A3 =  1/2 eR gL^T - 1/2 gR eL^T + tau eR eL^T
void weak_blocks_rational(int k, const Rat& tau, RatMat& A1, RatMat& A2, RatMat& A3) {
  const int m = k + 1;
  const RatMat K = stiffness_rational(k);
  std::vector<Rat> gL, gR;
  endpoint_derivs_rational(k, gL, gR);
  const Rat half(1, 2);
  A1 = RatMat(m, m);
  A2 = RatMat(m, m);
  A3 = RatMat(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Rat eLi(i == 0 ? 1 : 0), eRi(i == m - 1 ? 1 : 0);
      const Rat eLj(j == 0 ? 1 : 0), eRj(j == m - 1 ? 1 : 0);
      A1(i, j) = -half * eLi * gR[j] + half * gL[i] * eRj + tau * eLi * eRj;
      A2(i, j) = -K(i, j) + half * (eRi * gR[j] + gR[i] * eRj) - half * (eLi * gL[j] + gL[i] * eLj)
                 - tau * (eRi * eRj + eLi * eLj);
      A3(i, j) = half * eRi * gL[j] - half * gR[i] * eLj + tau * eRi * eLj;
    }
}

}  // namespace

LagrangeBasis1D make_lagrange_basis(int k) {
  if (k < 1) throw std::invalid_argument("make_lagrange_basis: degree must be >= 1");
  LagrangeBasis1D b;
  b.degree = k;
  b.nodes = Vec::LinSpaced(k + 1, 0.0, 1.0);
  b.coeff = rat_to_mat(lagrange_coeff_rational(k));
  return b;
}

double LagrangeBasis1D::eval(int i, double x) const {
  double p = 0.0;
  for (int r = coeff.rows() - 1; r >= 0; --r) p = p * x + coeff(r, i);
  return p;
}

double LagrangeBasis1D::eval_deriv(int i, double x) const {
  double p = 0.0;
  for (int r = coeff.rows() - 1; r >= 1; --r) p = p * x + r * coeff(r, i);
  return p;
}

Mat local_mass(int k, double h) {
  if (h <= 0.0) throw std::invalid_argument("local_mass: h must be positive");
  return h * rat_to_mat(mass_rational(k));
}

RatMat local_mass_rational(int k) { return mass_rational(k); }

DgBlocks1D assemble_dg1d_blocks(int k, double h, double tau) {
  if (h <= 0.0) throw std::invalid_argument("assemble_dg1d_blocks: h must be positive");
  if (tau < 0.0) throw std::invalid_argument("assemble_dg1d_blocks: tau must be nonnegative");
  DgBlocks1D blk;
  blk.degree = k;
  blk.h = h;
  blk.tau = tau;
  blk.M_loc = local_mass(k, h);

  RatMat A1r, A2r, A3r;
  // Assemble exactly at tau=0 and tau=1; the blocks are affine in tau.
  weak_blocks_rational(k, Rat(0), A1r, A2r, A3r);
  Mat A1 = rat_to_mat(A1r), A2 = rat_to_mat(A2r), A3 = rat_to_mat(A3r);
  RatMat B1r, B2r, B3r;
  weak_blocks_rational(k, Rat(1), B1r, B2r, B3r);
  A1 += tau * (rat_to_mat(B1r) - A1);
  A2 += tau * (rat_to_mat(B2r) - A2);
  A3 += tau * (rat_to_mat(B3r) - A3);

  // physical scaling: volume terms carry 1/h, endpoint derivs 1/h, penalties tau/h;
  // all of A_i above are unit-element with that uniform 1/h, so divide once.
  const Mat Minv = blk.M_loc.inverse();
  blk.D1 = Minv * (A1 / h);
  blk.D2 = Minv * (A2 / h);
  blk.D3 = Minv * (A3 / h);

  std::vector<Rat> gL, gR;
  endpoint_derivs_rational(k, gL, gR);
  blk.gL = Vec(k + 1);
  blk.gR = Vec(k + 1);
  for (int i = 0; i <= k; ++i) {
    blk.gL(i) = gL[i].to_double() / h;
    blk.gR(i) = gR[i].to_double() / h;
  }
  return blk;
}

RatMat dg1d_block_rational(int k, const Rat& tau) {
  RatMat A1, A2, A3;
  weak_blocks_rational(k, tau, A1, A2, A3);
  const RatMat Minv = mass_rational(k).inverse();
  const RatMat D1 = Minv * A1, D2 = Minv * A2, D3 = Minv * A3;
  const int m = k + 1;
  RatMat out(m, 3 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      out(i, j) = D1(i, j);
      out(i, m + j) = D2(i, j);
      out(i, 2 * m + j) = D3(i, j);
    }
  return out;
}

double recover_penalty(const Mat& block, int k, double tol) {
  const Mat B0 = rat_to_mat(dg1d_block_rational(k, Rat(0)));
  const Mat B1 = rat_to_mat(dg1d_block_rational(k, Rat(1)));
  const Mat slope = B1 - B0;
  double tau = 0.0;
  bool found = false;
  const double scale = block.cwiseAbs().maxCoeff();
  for (int i = 0; i < block.rows(); ++i)
    for (int j = 0; j < block.cols(); ++j) {
      if (std::abs(slope(i, j)) < 1e-12) continue;
      const double t = (block(i, j) - B0(i, j)) / slope(i, j);
      if (!found) {
        tau = t;
        found = true;
      } else if (std::abs(t - tau) > tol * std::max(1.0, std::abs(tau))) {
        throw std::runtime_error("recover_penalty: block is not consistent with a single penalty");
      }
    }
  if (!found) throw std::runtime_error("recover_penalty: block has no penalty-dependent entries");
  const Mat fit = B0 + tau * slope;
  if ((fit - block).cwiseAbs().maxCoeff() > tol * scale)
    throw std::runtime_error("recover_penalty: residual too large at fitted penalty");
  return tau;
}

namespace {

TruncationFit fit_probe(int k, double tau, const SmoothFunction& f, double x0,
                        const std::vector<double>& hs, bool mass_weighted) {
  if (hs.size() < 3) throw std::invalid_argument("truncation probe: need >= 3 sweep levels");
  const int m = k + 1;
  const int nh = static_cast<int>(hs.size());
  Mat res(nh, m);
  for (int a = 0; a < nh; ++a) {
    const double h = hs[a];
    DgBlocks1D blk = assemble_dg1d_blocks(k, h, tau);
    Vec um(m), uc(m), up(m), xc(m);
    for (int i = 0; i < m; ++i) {
      const double s = static_cast<double>(i) / k;
      um(i) = f.f(x0 + (s - 1.0) * h);
      uc(i) = f.f(x0 + s * h);
      up(i) = f.f(x0 + (s + 1.0) * h);
      xc(i) = x0 + s * h;
    }
    Vec r = blk.D1 * um + blk.D2 * uc + blk.D3 * up;
    for (int i = 0; i < m; ++i) r(i) -= f.d2(xc(i));
    if (mass_weighted) r = blk.M_loc * r;
    res.row(a) = r.transpose();
  }
  // per-node least squares: r(h) = c_lead * h^p0 * dA(node) + c_next * h^{p0+1} * dB(node)
  //                                + c_rem * h^{p0+2} * dC(node)
  const int p0 = mass_weighted ? 3 : 2;
  TruncationFit out;
  out.lead = Vec(m);
  out.next = Vec(m);
  double resid2 = 0.0, norm2 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double s = static_cast<double>(i) / k;
    Mat Amat(nh, 3);
    Vec b(nh);
    for (int a = 0; a < nh; ++a) {
      const double h = hs[a], x = x0 + s * h;
      const double dA = mass_weighted ? f.d4(x) : f.d4(x);
      const double dB = mass_weighted ? f.d5(x) : f.d5(x);
      const double dC = f.d6(x);
      Amat(a, 0) = std::pow(h, p0) * dA;
      Amat(a, 1) = std::pow(h, p0 + 1) * dB;
      Amat(a, 2) = std::pow(h, p0 + 2) * dC;
      b(a) = res(a, i);
    }
    Vec c = Amat.completeOrthogonalDecomposition().solve(b);
    out.lead(i) = c(0);
    out.next(i) = c(1);
    resid2 += (Amat * c - b).squaredNorm();
    norm2 += b.squaredNorm();
  }
  out.fit_residual = std::sqrt(resid2 / std::max(norm2, 1e-300));
  if (out.fit_residual > 1e-2)
    throw std::runtime_error("truncation probe: poor fit (input not smooth enough?)");
  return out;
}

}  // namespace

TruncationFit dg1d_truncation_probe(int k, double tau, const SmoothFunction& f, double x0,
                                    const std::vector<double>& hs) {
  return fit_probe(k, tau, f, x0, hs, false);
}

TruncationFit dg1d_truncation_probe_mass_weighted(int k, double tau, const SmoothFunction& f,
                                                  double x0, const std::vector<double>& hs) {
  return fit_probe(k, tau, f, x0, hs, true);
}

}  // namespace waveglue

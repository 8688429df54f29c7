#include "waveglue/sbp.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <string>
#include <vector>

namespace waveglue {

namespace {

void set_row(SpMat& D, int row, int col0, const std::vector<double>& c, double scale) {
  for (size_t k = 0; k < c.size(); ++k)
    if (c[k] != 0.0) D.coeffRef(row, col0 + static_cast<int>(k)) = c[k] * scale;
}

}  // namespace

SbpOperator1D build_sbp(int interior_order, int n, double h) {
  if (interior_order != 2 && interior_order != 4)
    throw std::invalid_argument("build_sbp: unsupported interior order " +
                                std::to_string(interior_order) + " (use 2 or 4)");
  if (h <= 0.0) throw std::invalid_argument("build_sbp: h must be positive");

  SbpOperator1D op;
  op.n = n;
  op.h = h;
  op.interior_order = interior_order;
  op.boundary_order = interior_order / 2;

  const double ih2 = 1.0 / (h * h);
  op.D = SpMat(n, n);
  op.H = Vec::Ones(n);
  op.d1 = Vec::Zero(n);
  op.dn = Vec::Zero(n);

  if (interior_order == 2) {
    const int nmin = 2 * 1 + 1;
    if (n < nmin)
      throw std::invalid_argument("build_sbp(2,1): n must be at least " + std::to_string(nmin));
    op.H(0) = op.H(n - 1) = 0.5;
    op.D.reserve(Eigen::VectorXi::Constant(n, 3));
    set_row(op.D, 0, 0, {1, -2, 1}, ih2);
    for (int i = 1; i < n - 1; ++i) set_row(op.D, i, i - 1, {1, -2, 1}, ih2);
    set_row(op.D, n - 1, n - 3, {1, -2, 1}, ih2);
    op.d1.head(3) = Vec{{-1.5, 2.0, -0.5}} / h;
    op.dn.tail(3) = Vec{{0.5, -2.0, 1.5}} / h;
  } else {
    const int nmin = 2 * 4 + 1;
    if (n < nmin)
      throw std::invalid_argument("build_sbp(4,2): n must be at least " + std::to_string(nmin));
    op.H.head(4) = Vec{{17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48}};
    op.H.tail(4) = Vec{{49.0 / 48, 43.0 / 48, 59.0 / 48, 17.0 / 48}};
    op.D.reserve(Eigen::VectorXi::Constant(n, 6));
    const std::vector<double> r1 = {2, -5, 4, -1};
    const std::vector<double> r2 = {1, -2, 1};
    const std::vector<double> r3 = {-4.0 / 43, 59.0 / 43, -110.0 / 43, 59.0 / 43, -4.0 / 43};
    const std::vector<double> r4 = {-1.0 / 49, 0, 59.0 / 49, -118.0 / 49, 64.0 / 49, -4.0 / 49};
    auto rev = [](std::vector<double> v) { std::reverse(v.begin(), v.end()); return v; };
    set_row(op.D, 0, 0, r1, ih2);
    set_row(op.D, 1, 0, r2, ih2);
    set_row(op.D, 2, 0, r3, ih2);
    set_row(op.D, 3, 0, r4, ih2);
    for (int i = 4; i < n - 4; ++i)
      set_row(op.D, i, i - 2, {-1.0 / 12, 4.0 / 3, -2.5, 4.0 / 3, -1.0 / 12}, ih2);
    set_row(op.D, n - 1, n - 4, rev(r1), ih2);
    set_row(op.D, n - 2, n - 3, rev(r2), ih2);
    set_row(op.D, n - 3, n - 5, rev(r3), ih2);
    set_row(op.D, n - 4, n - 6, rev(r4), ih2);
    op.d1.head(4) = Vec{{-11.0 / 6, 3.0, -1.5, 1.0 / 3}} / h;
    op.dn.tail(4) = Vec{{-1.0 / 3, 1.5, -3.0, 11.0 / 6}} / h;
  }
  op.H *= h;
  op.D.makeCompressed();

  // A = -H D + e_n dn^T - e_1 d1^T; symmetric PSD for these operators.
  op.A = Mat(op.H.asDiagonal() * Mat(op.D));
  op.A = -op.A;
  op.A.row(n - 1) += op.dn.transpose();
  op.A.row(0) -= op.d1.transpose();
  return op;
}

Vec apply_D(const SbpOperator1D& op, const Vec& f) {
  if (f.size() != op.n) throw std::invalid_argument("apply_D: length mismatch");
  Vec r = -(op.A.selfadjointView<Eigen::Lower>() * f);
  r(op.n - 1) += op.dn.dot(f);
  r(0) -= op.d1.dot(f);
  return r.cwiseQuotient(op.H);
}

namespace {

double smallest_eig_of_borrowed(const SbpOperator1D& op, double beta) {
  Mat At = op.A - beta * op.h * (op.d1 * op.d1.transpose() + op.dn * op.dn.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(At, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double bisect_beta(const SbpOperator1D& op, double tol) {
  const double scale = op.A.cwiseAbs().maxCoeff();
  const double eps_psd = 1e-12 * scale;
  auto psd = [&](double b) { return smallest_eig_of_borrowed(op, b) >= -eps_psd; };
  if (!psd(0.0))
    throw std::runtime_error("borrowing_capacity: A itself is not PSD; not an SBP operator");
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (psd(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 60) throw std::runtime_error("borrowing_capacity: failed to bracket");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (psd(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

BorrowingResult borrowing_capacity(const SbpOperator1D& op, double tol) {
  if (!(tol > 0.0 && tol <= 1e-3))
    throw std::invalid_argument("borrowing_capacity: tol must be in (0, 1e-3]");
  const double beta = bisect_beta(op, tol);

  // The capacity is a property of the closure tables: it must not move with n or h.
  const SbpOperator1D op2n = build_sbp(op.interior_order, 2 * op.n, op.h);
  const double beta2n = bisect_beta(op2n, tol);
  if (std::abs(beta2n - beta) > 4.0 * tol)
    throw std::runtime_error("borrowing_capacity: not stabilized in n");
  const SbpOperator1D oph2 = build_sbp(op.interior_order, op.n, 2.0 * op.h);
  const double betah2 = bisect_beta(oph2, tol);
  if (std::abs(betah2 - beta) > 4.0 * tol)
    throw std::runtime_error("borrowing_capacity: h dependence detected");

  BorrowingResult res;
  res.beta = beta;
  res.n_used = op.n;
  res.residual_eig = smallest_eig_of_borrowed(op, beta);
  return res;
}

}  // namespace waveglue

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "waveglue/sbp.hpp"

using namespace waveglue;

namespace {

Mat dense_D(const SbpOperator1D& op) { return Mat(op.D); }

}  // namespace

TEST_CASE("build_sbp rejects bad input") {
  CHECK_THROWS_AS(build_sbp(6, 32, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_sbp(4, 8, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_sbp(4, 32, -1.0), std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_sbp(4, 5, 0.1), doctest::Contains("at least 9"),
                       std::invalid_argument);
}

TEST_CASE("second derivative of a quadratic is exact at interior points") {
  const int n = 20;
  const double h = 0.05;
  const SbpOperator1D op = build_sbp(4, n, h);
  Vec f(n);
  for (int i = 0; i < n; ++i) f(i) = (i * h) * (i * h);
  const Vec d = apply_D(op, f);
  for (int i = 4; i < n - 4; ++i) CHECK(d(i) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("interior row equals the centered fourth-order stencil") {
  const double h = 0.2;
  const SbpOperator1D op = build_sbp(4, 16, h);
  const Mat D = dense_D(op);
  const double s = 1.0 / (h * h);
  const int i = 8;
  CHECK(D(i, i - 2) == doctest::Approx(-s / 12.0));
  CHECK(D(i, i - 1) == doctest::Approx(4.0 * s / 3.0));
  CHECK(D(i, i) == doctest::Approx(-2.5 * s));
  CHECK(D(i, i + 1) == doctest::Approx(4.0 * s / 3.0));
  CHECK(D(i, i + 2) == doctest::Approx(-s / 12.0));
}

TEST_CASE("decomposition residual is at round-off") {
  for (int order : {2, 4}) {
    const int n = 24;
    const double h = 1.0 / (n - 1);
    const SbpOperator1D op = build_sbp(order, n, h);
    Mat rhs = -op.A;
    rhs.row(n - 1) += op.dn.transpose();
    rhs.row(0) -= op.d1.transpose();
    const Mat lhs = op.H.asDiagonal() * dense_D(op);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13 / (h * h));
  }
}

TEST_CASE("H is SPD and A is symmetric PSD") {
  for (int order : {2, 4}) {
    const SbpOperator1D op = build_sbp(order, 28, 0.1);
    CHECK(op.H.minCoeff() > 0.0);
    CHECK((op.A - op.A.transpose()).cwiseAbs().maxCoeff() < 1e-14 * op.A.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Mat> es(op.A, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) > -1e-12 * op.A.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("apply_D matches the dense product on random input") {
  const SbpOperator1D op = build_sbp(4, 30, 0.07);
  std::mt19937 rng(5);
  std::normal_distribution<double> dist;
  Vec f(op.n);
  for (int i = 0; i < op.n; ++i) f(i) = dist(rng);
  const Vec a = apply_D(op, f);
  const Vec b = dense_D(op) * f;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10 * b.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(apply_D(op, Vec::Zero(op.n + 1)), std::invalid_argument);
}

TEST_CASE("constants and cubics") {
  const int n = 24;
  const double h = 0.11;
  const SbpOperator1D op = build_sbp(4, n, h);
  const Vec c = apply_D(op, Vec::Ones(n));
  CHECK(c.cwiseAbs().maxCoeff() < 1e-12 / (h * h));
  Vec f(n);
  for (int i = 0; i < n; ++i) f(i) = std::pow(i * h, 3);
  const Vec d = apply_D(op, f);
  for (int i = 4; i < n - 4; ++i)
    CHECK(d(i) == doctest::Approx(6.0 * i * h).epsilon(1e-10));
}

TEST_CASE("SBP identity on random pairs") {
  const SbpOperator1D op = build_sbp(4, 26, 0.1);
  std::mt19937 rng(17);
  std::normal_distribution<double> dist;
  for (int t = 0; t < 100; ++t) {
    Vec f(op.n), g(op.n);
    for (int i = 0; i < op.n; ++i) {
      f(i) = dist(rng);
      g(i) = dist(rng);
    }
    const double lhs = g.dot(op.H.asDiagonal() * apply_D(op, f));
    const double rhs = -g.dot(op.A * f) + g(op.n - 1) * op.dn.dot(f) - g(0) * op.d1.dot(f);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("borrowing capacity: positive, h-invariant, maximal") {
  const SbpOperator1D op = build_sbp(4, 32, 0.1);
  const BorrowingResult r = borrowing_capacity(op, 1e-8);
  CHECK(r.beta > 0.0);
  CHECK(r.n_used == 32);
  const BorrowingResult r2 = borrowing_capacity(build_sbp(4, 32, 0.2), 1e-8);
  CHECK(std::abs(r2.beta - r.beta) < 1e-7);
  Mat At = op.A - 2.0 * r.beta * op.h * (op.d1 * op.d1.transpose() + op.dn * op.dn.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(At, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) < -1e-12 * op.A.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(borrowing_capacity(op, 1.0), std::invalid_argument);
}

TEST_CASE("borrowing inequality on random vectors") {
  const SbpOperator1D op = build_sbp(4, 24, 0.3);
  const BorrowingResult r = borrowing_capacity(op, 1e-9);
  std::mt19937 rng(23);
  std::normal_distribution<double> dist;
  for (int t = 0; t < 100; ++t) {
    Vec f(op.n);
    for (int i = 0; i < op.n; ++i) f(i) = dist(rng);
    const double quad = f.dot(op.A * f);
    const double bnd = r.beta * op.h * (std::pow(op.d1.dot(f), 2) + std::pow(op.dn.dot(f), 2));
    CHECK(quad >= bnd - 1e-10 * quad - 1e-12);
  }
}

TEST_CASE("interior convergence at rate 2p, closure at rate >= p for sin") {
  double prev_int = 0, prev_bnd = 0;
  double rate_int = 0, rate_bnd = 0;
  for (int lev = 0; lev < 3; ++lev) {
    const int n = (32 << lev) + 1;
    const double h = 1.0 / (n - 1);
    const SbpOperator1D op = build_sbp(4, n, h);
    Vec f(n);
    for (int i = 0; i < n; ++i) f(i) = std::sin(i * h);
    const Vec d = apply_D(op, f);
    double ei = 0, eb = 0;
    for (int i = 0; i < n; ++i) {
      const double err = std::abs(d(i) + std::sin(i * h));
      if (i < 4 || i >= n - 4)
        eb = std::max(eb, err);
      else
        ei = std::max(ei, err);
    }
    if (lev) {
      rate_int = std::log2(prev_int / ei);
      rate_bnd = std::log2(prev_bnd / eb);
    }
    prev_int = ei;
    prev_bnd = eb;
  }
  CHECK(rate_int > 3.6);
  CHECK(rate_bnd > 1.9);
}

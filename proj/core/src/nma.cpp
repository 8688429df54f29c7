#include "waveglue/nma.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "waveglue/hybrid1d.hpp"
#include "waveglue/sbp.hpp"

#include <nlohmann/json.hpp>

namespace waveglue {

FdRoots fd_roots(Cplx s_tilde) {
  if (s_tilde.real() < -1e-14) throw std::invalid_argument("fd_roots: need Re(s_tilde) >= 0");
  // -1/12 k^4 + 4/3 k^3 - (5/2 + s^2) k^2 + 4/3 k - 1/12 = 0
  Eigen::Matrix4cd comp = Eigen::Matrix4cd::Zero();
  const Cplx a4(-1.0 / 12.0), a3(4.0 / 3.0), a2 = -(Cplx(2.5) + s_tilde * s_tilde),
      a1(4.0 / 3.0), a0(-1.0 / 12.0);
  comp(0, 3) = -a0 / a4;
  comp(1, 3) = -a1 / a4;
  comp(2, 3) = -a2 / a4;
  comp(3, 3) = -a3 / a4;
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(comp);
  if (es.info() != Eigen::Success) throw std::runtime_error("fd_roots: eigensolve failed");
  FdRoots out;
  for (int i = 0; i < 4; ++i) out.all.push_back(es.eigenvalues()(i));
  const Cplx t2 = 7.0 - 4.0 * std::sqrt(3.0);
  const Cplx t1 = 1.0 - s_tilde;
  auto nearest = [&](Cplx target, Cplx avoid, bool use_avoid) {
    Cplx best = out.all[0];
    double bd = 1e300;
    for (const Cplx& r : out.all) {
      if (use_avoid && std::abs(r - avoid) < 1e-14) continue;
      const double d = std::abs(r - target);
      if (d < bd) {
        bd = d;
        best = r;
      }
    }
    return best;
  };
  out.kappa2 = nearest(t2, 0.0, false);
  out.kappa1 = nearest(t1, out.kappa2, true);
  return out;
}

DgRoots dg_roots(double tau, Cplx s_tilde) {
  if (s_tilde.real() < -1e-14) throw std::invalid_argument("dg_roots: need Re(s_tilde) >= 0");
  const DgBlocks1D blk = assemble_dg1d_blocks(3, 1.0, tau);
  const Mat D1 = blk.D1, D2 = blk.D2, D3 = blk.D3;  // h = 1: already the scaled blocks

  // kernel of D1 must be two-dimensional
  Eigen::JacobiSVD<Mat> svd1(D1, Eigen::ComputeFullV);
  const Vec sv = svd1.singularValues();
  int null_dim = 0;
  for (int i = 0; i < 4; ++i)
    if (sv(i) < 1e-10 * sv(0)) ++null_dim;
  if (null_dim != 2)
    throw std::runtime_error("dg_roots: left-coupling block kernel is not 2-dimensional");

  // quadratic pencil linearization P0 + a R, shift-inverted at a generic sigma
  MatC P0 = MatC::Zero(8, 8), R = MatC::Zero(8, 8);
  P0.topLeftCorner(4, 4) = D1.cast<Cplx>();
  P0.bottomRightCorner(4, 4) = MatC::Identity(4, 4);
  R.topLeftCorner(4, 4) = (D2 - Mat::Identity(4, 4) * 0.0).cast<Cplx>();
  R.topLeftCorner(4, 4) -= MatC::Identity(4, 4) * (s_tilde * s_tilde);
  R.topRightCorner(4, 4) = D3.cast<Cplx>();
  R.bottomLeftCorner(4, 4) = -MatC::Identity(4, 4);
  const Cplx sigma(0.31234, 0.177);
  const MatC T = (P0 + sigma * R).partialPivLu().solve(R);
  Eigen::ComplexEigenSolver<MatC> es(T);
  if (es.info() != Eigen::Success) throw std::runtime_error("dg_roots: eigensolve failed");

  DgRoots out;
  std::vector<std::pair<Cplx, Eigen::Vector4cd>> finite;
  for (int i = 0; i < 8; ++i) {
    const Cplx th = es.eigenvalues()(i);
    if (std::abs(th) < 1e-12) continue;  // infinite alpha
    const Cplx a = sigma - 1.0 / th;
    out.alphas.push_back(a);
    finite.emplace_back(a, es.eigenvectors().col(i).head<4>());
  }
  auto pick = [&](Cplx target) {
    double bd = 1e300;
    size_t bi = 0;
    for (size_t i = 0; i < finite.size(); ++i) {
      const double d = std::abs(finite[i].first - target);
      if (d < bd) {
        bd = d;
        bi = i;
      }
    }
    return finite[bi];
  };
  auto a1 = pick(Cplx(0.139, 0.0));
  auto a2 = pick(Cplx(1.0, 0.0) - s_tilde);
  out.alpha1 = a1.first;
  out.alpha2 = a2.first;
  out.z1 = a1.second / a1.second(3);
  out.z2 = a2.second / a2.second(3);
  // kernel of D1: { z : z_4 = 0 and gR . z = 0 }, pivots as displayed
  const Vec gR = blk.gR;
  out.z3 = Eigen::Vector4d(-gR(1) / gR(0), 1.0, 0.0, 0.0);
  out.z4 = Eigen::Vector4d(-gR(2) / gR(0), 0.0, 1.0, 0.0);
  return out;
}

NormalModeData boundary_system(double tau, Cplx s_tilde) {
  NormalModeData d;
  d.s_tilde = s_tilde;
  d.tau = tau;
  d.fd = fd_roots(s_tilde);
  d.dg = dg_roots(tau, s_tilde);

  const int nf = 12, m = 4;
  const double h = 1.0;
  const SbpOperator1D fd = build_sbp(4, nf, h);
  const DgBlocks1D dg = assemble_dg1d_blocks(3, h, tau);
  Hybrid1dOptions opts;
  opts.allow_unstable_tau = true;
  const Hybrid1D sys = assemble_hybrid1d(fd, dg, m, tau, opts);
  Mat Q = Mat(sys.Q);

  const int N = sys.size();
  std::vector<int> rows(sys.iface_rows.begin(), sys.iface_rows.end());

  struct ModeColumn {
    VecC zfull;          // mode shape over the whole state
    Eigen::Vector4cd lhs_fd;  // delta at x4,x3,x2,x1
    Eigen::Vector4cd lhs_dg;  // delta over the first element
  };
  auto make_col = [&](const ModeColumn& mc) {
    VecC col(8);
    const VecC Qz = Q.cast<Cplx>() * mc.zfull;
    for (int r = 0; r < 8; ++r) {
      const Cplx lhs = r < 4 ? mc.lhs_fd(r) : mc.lhs_dg(r - 4);
      col(r) = s_tilde * s_tilde * lhs - (h * h) * Qz(rows[static_cast<size_t>(r)]);
    }
    return col;
  };
  auto fd_mode = [&](Cplx kappa) {
    ModeColumn mc;
    mc.zfull = VecC::Zero(N);
    for (int j = 3; j <= nf; ++j) mc.zfull(nf - j) = std::pow(kappa, j - 3);
    mc.lhs_fd = Eigen::Vector4cd(std::pow(kappa, 1), Cplx(1.0), Cplx(0.0), Cplx(0.0));
    mc.lhs_dg.setZero();
    return mc;
  };
  auto point_mode = [&](int j) {  // delta at FD point x_j
    ModeColumn mc;
    mc.zfull = VecC::Zero(N);
    mc.zfull(nf - j) = 1.0;
    mc.lhs_fd.setZero();
    if (j <= 4) mc.lhs_fd(4 - j) = 1.0;
    mc.lhs_dg.setZero();
    return mc;
  };
  auto dg_mode = [&](const Eigen::Vector4cd& z, Cplx alpha, bool alpha_zero) {
    ModeColumn mc;
    mc.zfull = VecC::Zero(N);
    mc.zfull.segment(nf, 4) = z;
    if (!alpha_zero)
      for (int j = 1; j < m; ++j) mc.zfull.segment(nf + 4 * j, 4) = std::pow(alpha, j) * z;
    mc.lhs_fd.setZero();
    mc.lhs_dg = z;
    return mc;
  };

  d.C = MatC(8, 8);
  d.C.col(0) = make_col(fd_mode(d.fd.kappa1));
  d.C.col(1) = make_col(fd_mode(d.fd.kappa2));
  d.C.col(2) = make_col(point_mode(1));
  d.C.col(3) = make_col(point_mode(2));
  d.C.col(4) = make_col(dg_mode(d.dg.z1, d.dg.alpha1, false));
  d.C.col(5) = make_col(dg_mode(d.dg.z2, d.dg.alpha2, false));
  d.C.col(6) = make_col(dg_mode(d.dg.z3.cast<Cplx>(), 0.0, true));
  d.C.col(7) = make_col(dg_mode(d.dg.z4.cast<Cplx>(), 0.0, true));

  d.T_gamma = Vec(8);
  d.T_gamma << -11.0 / 588, -5.0 / 516, 1.0 / 12, -337.0 / 612, 209.0 / 108, -893.0 / 2916,
      407.0 / 2916, -17.0 / 36;

  Eigen::JacobiSVD<MatC> svd(d.C, Eigen::ComputeFullU);
  d.singular_values = svd.singularValues();
  d.Ut_T = svd.matrixU().adjoint() * d.T_gamma.cast<Cplx>();
  d.colspace_residual = std::abs(d.Ut_T(7)) / d.T_gamma.norm();
  return d;
}

std::string nma_report_json(const NormalModeData& d) {
  nlohmann::json j;
  auto cplx = [](Cplx c) { return nlohmann::json{{"re", c.real()}, {"im", c.imag()}}; };
  j["s_tilde"] = cplx(d.s_tilde);
  j["tau"] = d.tau;
  j["fd_roots"] = nlohmann::json::array();
  for (const Cplx& r : d.fd.all) j["fd_roots"].push_back(cplx(r));
  j["kappa1"] = cplx(d.fd.kappa1);
  j["kappa2"] = cplx(d.fd.kappa2);
  j["dg_roots"] = nlohmann::json::array();
  for (const Cplx& r : d.dg.alphas) j["dg_roots"].push_back(cplx(r));
  j["alpha1"] = cplx(d.dg.alpha1);
  j["alpha2"] = cplx(d.dg.alpha2);
  for (const char* name : {"z1", "z2"}) {
    const auto& z = std::string(name) == "z1" ? d.dg.z1 : d.dg.z2;
    auto arr = nlohmann::json::array();
    for (int i = 0; i < 4; ++i) arr.push_back(cplx(z(i)));
    j[name] = arr;
  }
  j["z3"] = {d.dg.z3(0), d.dg.z3(1), d.dg.z3(2), d.dg.z3(3)};
  j["z4"] = {d.dg.z4(0), d.dg.z4(1), d.dg.z4(2), d.dg.z4(3)};
  j["singular_values"] = std::vector<double>(d.singular_values.data(),
                                             d.singular_values.data() + d.singular_values.size());
  auto arr = nlohmann::json::array();
  for (int i = 0; i < d.Ut_T.size(); ++i) arr.push_back(std::abs(d.Ut_T(i)));
  j["abs_Ut_T"] = arr;
  j["colspace_residual"] = d.colspace_residual;
  j["colspace_pass"] = d.colspace_residual < 1e-8;
  std::ostringstream os;
  os << j.dump(2) << "\n";
  return os.str();
}

}  // namespace waveglue

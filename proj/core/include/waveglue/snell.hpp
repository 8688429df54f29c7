#pragma once

#include <cmath>

namespace waveglue {

/// Plane-wave solution of U_tt = div(b grad U) with piecewise-constant b and
/// the interface at y = 0 (b1 above, b2 below): an incident wave plus the
/// reflected and transmitted branches matching continuity of U and of b U_y.
struct SnellSolution {
  double b1 = 1.0, b2 = 0.25;
  double k1 = 0.0;     // transmitted y-wavenumber sqrt(2 b1 / b2 - 1)
  double k2 = 0.0;     // reflection coefficient (b1 - k1 b2) / (b1 + k1 b2)
  double omega = 0.0;  // sqrt(2 b1)

  SnellSolution(double b1_, double b2_) : b1(b1_), b2(b2_) {
    k1 = std::sqrt(2.0 * b1 / b2 - 1.0);
    k2 = (b1 - k1 * b2) / (b1 + k1 * b2);
    omega = std::sqrt(2.0 * b1);
  }

  double U(double x, double y, double t) const {
    if (y >= 0.0)
      return std::cos(x + y - omega * t) + k2 * std::cos(x - y - omega * t);
    return (1.0 + k2) * std::cos(x + k1 * y - omega * t);
  }
  double Ut(double x, double y, double t) const {
    if (y >= 0.0)
      return omega * (std::sin(x + y - omega * t) + k2 * std::sin(x - y - omega * t));
    return (1.0 + k2) * omega * std::sin(x + k1 * y - omega * t);
  }
  double Utt(double x, double y, double t) const {
    if (y >= 0.0)
      return -omega * omega * (std::cos(x + y - omega * t) + k2 * std::cos(x - y - omega * t));
    return -(1.0 + k2) * omega * omega * std::cos(x + k1 * y - omega * t);
  }
  double Ux(double x, double y, double t) const {
    if (y >= 0.0)
      return -std::sin(x + y - omega * t) - k2 * std::sin(x - y - omega * t);
    return -(1.0 + k2) * std::sin(x + k1 * y - omega * t);
  }
  double Uy(double x, double y, double t) const {
    if (y >= 0.0)
      return -std::sin(x + y - omega * t) + k2 * std::sin(x - y - omega * t);
    return -(1.0 + k2) * k1 * std::sin(x + k1 * y - omega * t);
  }
};

}  // namespace waveglue

#pragma once

#include <array>

#include "waveglue/rational.hpp"

namespace waveglue::reference {

/// Expected element mass matrix (degree 3, unit element).
inline RatMat mass_matrix() {
  RatMat M(4, 4);
  const Rat v[4][4] = {{{8, 105}, {33, 560}, {-3, 140}, {19, 1680}},
                       {{33, 560}, {27, 70}, {-27, 560}, {-3, 140}},
                       {{-3, 140}, {-27, 560}, {27, 70}, {33, 560}},
                       {{19, 1680}, {-3, 140}, {33, 560}, {8, 105}}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) M(i, j) = v[i][j];
  return M;
}

/// Expected interior stencil block [D1 | D2 | D3] * h^2 for the fourth-order
/// coupling (penalty 25).
inline RatMat interior_block() {
  RatMat B(4, 12);
  const Rat r0[12] = {{8},       {-36},     {72},      {296},    {-368},  {36},
                      {-18},     {80},      {-59},     {-18},    {9},     {-2}};
  const Rat r1[12] = {{-34, 27}, {17, 3},   {-34, 3},  {-943, 27}, {1576, 27}, {-32},
                      {20},      {-622, 27}, {412, 27}, {16, 3},  {-8, 3}, {16, 27}};
  const Rat r2[12] = {{16, 27},  {-8, 3},   {16, 3},   {412, 27}, {-622, 27}, {20},
                      {-32},     {1576, 27}, {-943, 27}, {-34, 3}, {17, 3}, {-34, 27}};
  const Rat r3[12] = {{-2},      {9},       {-18},     {-59},    {80},    {-18},
                      {36},      {-368},    {296},     {72},     {-36},   {8}};
  for (int j = 0; j < 12; ++j) {
    B(0, j) = r0[j];
    B(1, j) = r1[j];
    B(2, j) = r2[j];
    B(3, j) = r3[j];
  }
  return B;
}

/// Expected 8x14 interface stencil block * h^2 (rows x4..x1 then the first DG
/// element; columns x6..x1, first DG element, second DG element; penalty 25).
inline RatMat interface_block() {
  RatMat B(8, 14);
  const Rat rows[8][14] = {
      {{-4, 49}, {64, 49}, {-118, 49}, {59, 49}, {0}, {-9, 49}, {8, 49}, {0}, {0}, {0}, {0}, {0},
       {0}, {0}},
      {{0}, {-4, 43}, {59, 43}, {-110, 43}, {59, 43}, {32, 43}, {-36, 43}, {0}, {0}, {0}, {0}, {0},
       {0}, {0}},
      {{0}, {0}, {0}, {1}, {-2}, {-13, 59}, {72, 59}, {0}, {0}, {0}, {0}, {0}, {0}, {0}},
      {{0}, {0}, {-9, 17}, {32, 17}, {-13, 17}, {-1166, 17}, {1024, 17}, {216, 17}, {-108, 17},
       {24, 17}, {0}, {0}, {0}, {0}},
      {{0}, {0}, {8, 3}, {-12}, {24}, {976, 3}, {-368}, {36}, {-18}, {80}, {-59}, {-18}, {9},
       {-2}},
      {{0}, {0}, {-34, 81}, {17, 9}, {-34, 9}, {-3203, 81}, {1576, 27}, {-32}, {20}, {-622, 27},
       {412, 27}, {16, 3}, {-8, 3}, {16, 27}},
      {{0}, {0}, {16, 81}, {-8, 9}, {16, 9}, {1412, 81}, {-622, 27}, {20}, {-32}, {1576, 27},
       {-943, 27}, {-34, 3}, {17, 3}, {-34, 27}},
      {{0}, {0}, {-2, 3}, {3}, {-6}, {-199, 3}, {80}, {-18}, {36}, {-368}, {296}, {72}, {-36},
       {8}}};
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 14; ++j) B(i, j) = rows[i][j];
  return B;
}

/// Expected h^2 truncation coefficients on the eight interface rows.
inline std::array<Rat, 8> interface_truncation() {
  return {Rat{-11, 588}, Rat{-5, 516},   Rat{1, 12},     Rat{-337, 612},
          Rat{209, 108}, Rat{-893, 2916}, Rat{407, 2916}, Rat{-17, 36}};
}

/// Expected interior DG truncation coefficient vectors.
inline std::array<Rat, 4> dg_h2_coeffs() {
  return {Rat{1, 108}, Rat{-1, 324}, Rat{-1, 324}, Rat{1, 108}};
}
inline std::array<Rat, 4> dg_h3_coeffs() {
  return {Rat{-2, 27}, Rat{11, 729}, Rat{-11, 729}, Rat{2, 27}};
}
inline std::array<Rat, 4> dg_mass_weighted_h3() {
  return {Rat{1, 1440}, Rat{-1, 1440}, Rat{-1, 1440}, Rat{1, 1440}};
}
inline std::array<Rat, 4> dg_mass_weighted_h4() {
  return {Rat{-163, 45360}, Rat{1, 1680}, Rat{-1, 1680}, Rat{163, 45360}};
}

/// Interface-mode reference data (penalty 10): determinant roots at s = 0 and
/// the normalized null vectors.
inline std::array<double, 6> mode_roots() { return {0.0, 0.0, 0.1390, 1.0, 1.0, 7.1943}; }
inline std::array<double, 4> mode_z1() { return {-7.1943, 2.7016, -0.6368, 1.0}; }
inline std::array<Rat, 4> mode_z3() { return {Rat{9, 2}, Rat{1}, Rat{0}, Rat{0}}; }
inline std::array<Rat, 4> mode_z4() { return {Rat{-9}, Rat{0}, Rat{1}, Rat{0}}; }

/// FD characteristic root limit 7 - 4 sqrt(3).
inline double fd_root_limit() { return 0.0717967697244908; }

}  // namespace waveglue::reference

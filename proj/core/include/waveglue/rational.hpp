#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace waveglue {

/// Exact rational arithmetic on int64 with 128-bit intermediates.
/// Used for the element matrices and interface stencils whose entries are
/// small rationals, so they can be compared entrywise without tolerances.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rat() = default;
  Rat(std::int64_t n) : num(n), den(1) {}
  Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }

  static Rat from_i128(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("Rat: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    const __int128 lim = static_cast<__int128>(INT64_MAX);
    if (n > lim || n < -lim || d > lim) throw std::overflow_error("Rat: overflow");
    Rat r; r.num = static_cast<std::int64_t>(n); r.den = static_cast<std::int64_t>(d);
    return r;
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return from_i128(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                     static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return from_i128(static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den,
                     static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return from_i128(static_cast<__int128>(a.num) * b.num,
                     static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw std::domain_error("Rat: division by zero");
    return from_i128(static_cast<__int128>(a.num) * b.den,
                     static_cast<__int128>(a.den) * b.num);
  }
  Rat operator-() const { Rat r(*this); r.num = -r.num; return r; }
  Rat& operator+=(const Rat& b) { *this = *this + b; return *this; }
  Rat& operator-=(const Rat& b) { *this = *this - b; return *this; }
  Rat& operator*=(const Rat& b) { *this = *this * b; return *this; }
  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
};

/// Dense matrix of rationals, row-major.
class RatMat {
 public:
  RatMat() = default;
  RatMat(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rat& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const Rat& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  friend RatMat operator*(const RatMat& a, const RatMat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("RatMat: dimension mismatch");
    RatMat c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const Rat& aik = a(i, k);
        if (aik.num == 0) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend RatMat operator+(const RatMat& a, const RatMat& b) {
    RatMat c(a.rows_, a.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
  }
  friend RatMat operator-(const RatMat& a, const RatMat& b) {
    RatMat c(a.rows_, a.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Rat> data_;

 public:
  /// Inverse by exact Gauss-Jordan elimination with partial pivoting on nonzeros.
  RatMat inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("RatMat: inverse of non-square");
    const int n = rows_;
    RatMat a(*this), inv(n, n);
    for (int i = 0; i < n; ++i) inv(i, i) = Rat(1);
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int r = col; r < n; ++r)
        if (a(r, col).num != 0) { piv = r; break; }
      if (piv < 0) throw std::domain_error("RatMat: singular matrix");
      if (piv != col)
        for (int j = 0; j < n; ++j) {
          std::swap(a(piv, j), a(col, j));
          std::swap(inv(piv, j), inv(col, j));
        }
      const Rat d = a(col, col);
      for (int j = 0; j < n; ++j) { a(col, j) = a(col, j) / d; inv(col, j) = inv(col, j) / d; }
      for (int r = 0; r < n; ++r) {
        if (r == col || a(r, col).num == 0) continue;
        const Rat f = a(r, col);
        for (int j = 0; j < n; ++j) {
          a(r, j) -= f * a(col, j);
          inv(r, j) -= f * inv(col, j);
        }
      }
    }
    return inv;
  }
};

}  // namespace waveglue

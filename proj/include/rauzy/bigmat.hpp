// Exact dense matrices over arbitrary-precision integers and rationals.
// Sizes here are tiny (d <= 5) so naive algorithms are fine; the point is
// exactness: cocycle products grow like Fibonacci and leave 64-bit range
// near level 90.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace rauzy {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

struct BigMat {
  int n = 0;
  std::vector<BigInt> a;  // row-major n x n

  BigMat() = default;
  explicit BigMat(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, BigInt(0)) {}

  static BigMat identity(int n) {
    BigMat m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  BigInt& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const BigInt& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  BigMat transpose() const {
    BigMat t(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const BigMat& o) const { return n == o.n && a == o.a; }
};

inline BigMat operator*(const BigMat& x, const BigMat& y) {
  if (x.n != y.n) throw std::invalid_argument("BigMat: size mismatch");
  BigMat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      const BigInt& xik = x(i, k);
      if (xik == 0) continue;
      for (int j = 0; j < x.n; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

inline std::vector<BigInt> operator*(const BigMat& m, const std::vector<BigInt>& v) {
  if (static_cast<int>(v.size()) != m.n) throw std::invalid_argument("BigMat: vec size");
  std::vector<BigInt> r(v.size(), BigInt(0));
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) r[i] += m(i, j) * v[j];
  return r;
}

inline BigMat operator+(const BigMat& x, const BigMat& y) {
  BigMat r(x.n);
  for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}

inline BigMat operator-(const BigMat& x, const BigMat& y) {
  BigMat r(x.n);
  for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}

// Bareiss fraction-free determinant.
inline BigInt det(BigMat m) {
  BigInt sign = 1, prev = 1;
  for (int k = 0; k < m.n - 1; ++k) {
    if (m(k, k) == 0) {
      int p = -1;
      for (int i = k + 1; i < m.n; ++i)
        if (m(i, k) != 0) { p = i; break; }
      if (p < 0) return 0;
      for (int j = 0; j < m.n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < m.n; ++i)
      for (int j = k + 1; j < m.n; ++j)
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return m.n == 0 ? BigInt(1) : sign * m(m.n - 1, m.n - 1);
}

// Rational row echelon; returns rank, optionally accumulating the kernel.
inline int rank(const BigMat& m) {
  int n = m.n;
  std::vector<std::vector<BigRat>> r(n, std::vector<BigRat>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i][j] = BigRat(m(i, j));
  int rk = 0;
  for (int col = 0; col < n && rk < n; ++col) {
    int piv = -1;
    for (int i = rk; i < n; ++i)
      if (r[i][col] != 0) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(r[rk], r[piv]);
    for (int i = 0; i < n; ++i) {
      if (i == rk || r[i][col] == 0) continue;
      BigRat f = r[i][col] / r[rk][col];
      for (int j = col; j < n; ++j) r[i][j] -= f * r[rk][j];
    }
    ++rk;
  }
  return rk;
}

// Kernel basis of m (as column vectors), exact, denominators cleared.
inline std::vector<std::vector<BigInt>> kernel_basis(const BigMat& m) {
  int n = m.n;
  std::vector<std::vector<BigRat>> r(n, std::vector<BigRat>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i][j] = BigRat(m(i, j));
  std::vector<int> pivot_col;
  int rk = 0;
  for (int col = 0; col < n && rk < n; ++col) {
    int piv = -1;
    for (int i = rk; i < n; ++i)
      if (r[i][col] != 0) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(r[rk], r[piv]);
    BigRat d = r[rk][col];
    for (int j = 0; j < n; ++j) r[rk][j] /= d;
    for (int i = 0; i < n; ++i) {
      if (i == rk || r[i][col] == 0) continue;
      BigRat f = r[i][col];
      for (int j = 0; j < n; ++j) r[i][j] -= f * r[rk][j];
    }
    pivot_col.push_back(col);
    ++rk;
  }
  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<BigInt>> basis;
  for (int freec = 0; freec < n; ++freec) {
    if (is_pivot[freec]) continue;
    std::vector<BigRat> v(n, BigRat(0));
    v[freec] = 1;
    for (int i = 0; i < rk; ++i) v[pivot_col[i]] = -r[i][freec];
    BigInt lcm = 1;
    for (auto& x : v) lcm = boost::multiprecision::lcm(lcm, BigInt(denominator(x)));
    std::vector<BigInt> iv(n);
    for (int i = 0; i < n; ++i) {
      BigRat s = v[i] * BigRat(lcm);
      iv[i] = BigInt(numerator(s));
    }
    basis.push_back(std::move(iv));
  }
  return basis;
}

// Exact solve m*x = b over the rationals; throws if singular.
inline std::vector<BigRat> solve(const BigMat& m, const std::vector<BigRat>& b) {
  int n = m.n;
  std::vector<std::vector<BigRat>> r(n, std::vector<BigRat>(n + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r[i][j] = BigRat(m(i, j));
    r[i][n] = b[i];
  }
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (r[i][col] != 0) { piv = i; break; }
    if (piv < 0) throw std::runtime_error("BigMat::solve: singular matrix");
    std::swap(r[col], r[piv]);
    BigRat d = r[col][col];
    for (int j = col; j <= n; ++j) r[col][j] /= d;
    for (int i = 0; i < n; ++i) {
      if (i == col || r[i][col] == 0) continue;
      BigRat f = r[i][col];
      for (int j = col; j <= n; ++j) r[i][j] -= f * r[col][j];
    }
  }
  std::vector<BigRat> x(n);
  for (int i = 0; i < n; ++i) x[i] = r[i][n];
  return x;
}

inline double to_double(const BigInt& x) { return x.convert_to<double>(); }
inline double to_double(const BigRat& x) { return x.convert_to<double>(); }

}  // namespace rauzy

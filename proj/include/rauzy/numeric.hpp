// Scalar utilities: double-double arithmetic, quadrature, least-squares fits.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rauzy {

// ---------------------------------------------------------------------------
// Double-double scalar. Roughly 32 significant decimal digits; used as an
// optional precision mode for deep renormalization where return words are
// long and round-off accumulates.
// ---------------------------------------------------------------------------
struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  dd(double h) : hi(h), lo(0.0) {}
  dd(double h, double l) : hi(h), lo(l) {}

  static dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
  }
  static dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
  }
  static dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
  }

  explicit operator double() const { return hi; }
};

inline dd operator+(dd a, dd b) {
  dd s = dd::two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return dd::quick_two_sum(s.hi, s.lo);
}
inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }
inline dd operator*(dd a, dd b) {
  dd p = dd::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return dd::quick_two_sum(p.hi, p.lo);
}
inline dd operator/(dd a, dd b) {
  double q1 = a.hi / b.hi;
  dd r = a - dd(q1) * b;
  double q2 = r.hi / b.hi;
  r = r - dd(q2) * b;
  double q3 = r.hi / b.hi;
  dd q = dd::quick_two_sum(q1, q2);
  return q + dd(q3);
}
inline dd& operator+=(dd& a, dd b) { a = a + b; return a; }
inline dd& operator-=(dd& a, dd b) { a = a - b; return a; }
inline dd& operator*=(dd& a, dd b) { a = a * b; return a; }
inline dd& operator/=(dd& a, dd b) { a = a / b; return a; }

inline bool operator<(dd a, dd b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(dd a, dd b) { return b < a; }
inline bool operator<=(dd a, dd b) { return !(b < a); }
inline bool operator>=(dd a, dd b) { return !(a < b); }
inline bool operator==(dd a, dd b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(dd a, dd b) { return !(a == b); }

inline dd fabs(dd a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }

namespace detail {
inline const dd kLn2{0x1.62e42fefa39efp-1, 0x1.abc9e3b39803fp-56};
}

inline dd exp(dd x) {
  if (x.hi > 709.0) throw std::overflow_error("dd exp overflow");
  if (x.hi < -709.0) return dd(0.0);
  int k = static_cast<int>(std::round(x.hi / detail::kLn2.hi));
  dd r = x - dd(static_cast<double>(k)) * detail::kLn2;
  // Taylor on |r| <= ~0.35
  dd term(1.0), sum(1.0);
  for (int i = 1; i <= 24; ++i) {
    term = term * r / dd(static_cast<double>(i));
    sum += term;
    if (std::abs(term.hi) < 1e-35 * std::abs(sum.hi)) break;
  }
  return sum * dd(std::ldexp(1.0, k));
}

inline dd log(dd x) {
  if (x.hi <= 0.0) throw std::domain_error("dd log of nonpositive");
  dd y(std::log(x.hi));
  // one Newton step: y <- y + x*exp(-y) - 1
  y = y + x * exp(-y) - dd(1.0);
  return y;
}

inline dd pow(dd x, dd p) { return exp(p * log(x)); }
inline dd sqrt(dd x) { return exp(dd(0.5) * log(x)); }

inline double to_double(double x) { return x; }
inline double to_double(dd x) { return x.hi; }

// Unqualified-call shims so templated code works for both scalars.
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double pow(double x, double p) { return std::pow(x, p); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double fabs(double x) { return std::fabs(x); }

// ---------------------------------------------------------------------------
// Quadrature: composite 16-point Gauss-Legendre with panel doubling.
// ---------------------------------------------------------------------------
namespace detail {
// nodes/weights on (-1,1), positive half; mirrored.
inline constexpr std::array<double, 8> kGl16X = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGl16W = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};
}  // namespace detail

template <class F>
double gauss16(const F& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) {
    double dx = h * detail::kGl16X[i];
    s += detail::kGl16W[i] * (f(c - dx) + f(c + dx));
  }
  return s * h;
}

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
// tanh-sinh rule on one cell: robust for integrands with Hoelder kinks or
// integrable endpoint singularities (nodes never touch the endpoints).
template <class F>
double de_cell(const F& f, double a, double b, double abs_tol, int max_level = 9) {
  double c = 0.5 * (a + b), s = 0.5 * (b - a);
  constexpr double kPiHalf = 1.5707963267948966;
  constexpr double kTmax = 3.8;
  auto node = [&](double t, double& x, double& w) {
    double u = kPiHalf * std::sinh(t);
    double ch = std::cosh(u);
    x = c + s * std::tanh(u);
    w = s * kPiHalf * std::cosh(t) / (ch * ch);
  };
  double h = 1.0;
  double x, w;
  node(0.0, x, w);
  double sum = w * f(x);
  for (double t = h; t <= kTmax; t += h) {
    node(t, x, w);
    if (x > a && x < b) sum += w * f(x);
    node(-t, x, w);
    if (x > a && x < b) sum += w * f(x);
  }
  double prev = sum * h;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    for (double t = h; t <= kTmax; t += 2.0 * h) {
      node(t, x, w);
      if (x > a && x < b) sum += w * f(x);
      node(-t, x, w);
      if (x > a && x < b) sum += w * f(x);
    }
    double cur = sum * h;
    if (std::abs(cur - prev) < abs_tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw QuadratureError("quadrature did not reach tolerance");
}
}  // namespace detail

// Integrate f over [a,b], splitting at the sorted interior points in `splits`.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                 const std::vector<double>& splits = {}, int max_level = 9) {
  std::vector<double> cuts{a};
  for (double s : splits)
    if (s > a + 1e-15 && s < b - 1e-15) cuts.push_back(s);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  double total = 0.0;
  for (size_t k = 0; k + 1 < cuts.size(); ++k)
    total += detail::de_cell(f, cuts[k], cuts[k + 1], abs_tol, max_level);
  return total;
}

// ---------------------------------------------------------------------------
// Least-squares line fit y = c + s*x; returns slope.
// ---------------------------------------------------------------------------
inline double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_slope: need >= 2 samples");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

// Slope of log(y) against x, using the last-half window.
inline double fit_log_rate_last_half(const std::vector<double>& ys) {
  size_t n = ys.size();
  size_t from = n / 2;
  std::vector<double> xs, ls;
  for (size_t i = from; i < n; ++i) {
    xs.push_back(static_cast<double>(i));
    ls.push_back(std::log(std::max(ys[i], 1e-300)));
  }
  return fit_slope(xs, ls);
}

}  // namespace rauzy

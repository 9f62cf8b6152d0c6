// Concrete g.i.e.m. objects: branch families with exact derivatives,
// standard/affine constructors, nonlinearity and break data, Keane check.
//
// Every branch is an affine frame around a unit homeomorphism G of [0,1]
// with G(0)=0, G(1)=1. All nonlinearity integrals have closed forms since
// (ln f')' = f''/f'.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rauzy/combinatorics.hpp"
#include "rauzy/numeric.hpp"

namespace rauzy {

enum class BranchKind { affine, moebius, power_kink };

// Parameters of the unit homeomorphism; interpretation depends on kind.
//   affine:     G = id (slopes live in the frame).
//   moebius:    G(x) = x*m / (1 + x*(m-1)), m > 0.
//   power_kink: DG(x) proportional to exp(A * sign(x-c) * |x-c|^beta),
//               beta in (0,1); ln DG has a Hoelder kink at c, D2G is
//               unbounded there but lies in L_p for p < 1/(1-beta).
struct BranchSpec {
  BranchKind kind = BranchKind::affine;
  double m = 1.0;
  double center = 0.5;
  double beta = 0.5;
  double amplitude = 0.0;

  static BranchSpec affine() { return {}; }
  static BranchSpec moebius(double m) {
    if (m <= 0.0) throw std::invalid_argument("moebius parameter must be positive");
    BranchSpec s;
    s.kind = BranchKind::moebius;
    s.m = m;
    return s;
  }
  static BranchSpec power_kink(double center, double beta, double amplitude) {
    if (!(center > 0.0 && center < 1.0)) throw std::invalid_argument("kink center in (0,1)");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta in (0,1)");
    BranchSpec s;
    s.kind = BranchKind::power_kink;
    s.center = center;
    s.beta = beta;
    s.amplitude = amplitude;
    return s;
  }
};

namespace detail {
// S_A(y) = int_0^y exp(A*u^beta) du by the everywhere-convergent series
// sum_j A^j y^(j*beta+1) / (j! (j*beta+1)).
template <class R>
R power_kink_primitive(R amp, R beta, R y) {
  if (to_double(y) <= 0.0) return R(0.0);
  R yb = pow(y, beta);
  R term = y;  // j = 0
  R sum = term;
  R apow(1.0), fact(1.0);
  for (int j = 1; j < 200; ++j) {
    apow *= amp * yb;
    fact *= R(static_cast<double>(j));
    term = y * apow / (fact * (R(static_cast<double>(j)) * beta + R(1.0)));
    sum += term;
    if (std::abs(to_double(term)) < 1e-34 * std::abs(to_double(sum))) break;
  }
  return sum;
}
}  // namespace detail

template <class R>
struct UnitMap {
  BranchSpec spec;
  // power_kink precomputed normalizers.
  R pk_left{0.0};   // S_{-A}(c)
  R pk_total{1.0};  // S_{-A}(c) + S_{A}(1-c)

  static UnitMap make(const BranchSpec& s) {
    UnitMap u;
    u.spec = s;
    if (s.kind == BranchKind::power_kink) {
      R A(s.amplitude), beta(s.beta), c(s.center);
      u.pk_left = detail::power_kink_primitive(-A, beta, c);
      u.pk_total = u.pk_left + detail::power_kink_primitive(A, beta, R(1.0) - c);
    }
    return u;
  }

  R value(R x) const {
    switch (spec.kind) {
      case BranchKind::affine:
        return x;
      case BranchKind::moebius: {
        R m(spec.m);
        return x * m / (R(1.0) + x * (m - R(1.0)));
      }
      case BranchKind::power_kink: {
        R A(spec.amplitude), beta(spec.beta), c(spec.center);
        R phi = to_double(x) <= spec.center
                    ? pk_left - detail::power_kink_primitive(-A, beta, c - x)
                    : pk_left + detail::power_kink_primitive(A, beta, x - c);
        return phi / pk_total;
      }
    }
    throw std::logic_error("unreachable");
  }

  R deriv(R x) const {
    switch (spec.kind) {
      case BranchKind::affine:
        return R(1.0);
      case BranchKind::moebius: {
        R m(spec.m);
        R den = R(1.0) + x * (m - R(1.0));
        return m / (den * den);
      }
      case BranchKind::power_kink:
        return exp(signed_power(x)) / pk_total;
    }
    throw std::logic_error("unreachable");
  }

  R second(R x) const {
    switch (spec.kind) {
      case BranchKind::affine:
        return R(0.0);
      case BranchKind::moebius: {
        R m(spec.m);
        R den = R(1.0) + x * (m - R(1.0));
        return R(-2.0) * m * (m - R(1.0)) / (den * den * den);
      }
      case BranchKind::power_kink: {
        // DG * A*beta*|x-c|^(beta-1); guard the kink itself.
        R dx = fabs(x - R(spec.center));
        if (to_double(dx) < 1e-12) dx = R(1e-12);
        return deriv(x) * R(spec.amplitude) * R(spec.beta) * pow(dx, R(spec.beta - 1.0));
      }
    }
    throw std::logic_error("unreachable");
  }

  R log_deriv(R x) const {
    switch (spec.kind) {
      case BranchKind::affine:
        return R(0.0);
      case BranchKind::moebius: {
        R m(spec.m);
        return log(m) - R(2.0) * log(R(1.0) + x * (m - R(1.0)));
      }
      case BranchKind::power_kink:
        return signed_power(x) - log(pk_total);
    }
    throw std::logic_error("unreachable");
  }

 private:
  R signed_power(R x) const {  // A * sign(x-c) * |x-c|^beta
    R dx = x - R(spec.center);
    if (to_double(dx) == 0.0) return R(0.0);
    R mag = pow(fabs(dx), R(spec.beta));
    return to_double(dx) > 0.0 ? R(spec.amplitude) * mag : -R(spec.amplitude) * mag;
  }
};

template <class R>
struct Branch {
  R dom_a{0.0}, dom_len{1.0};
  R img_a{0.0}, img_len{1.0};
  UnitMap<R> unit;

  R unit_coord(R x) const { return (x - dom_a) / dom_len; }
  R value(R x) const { return img_a + img_len * unit.value(unit_coord(x)); }
  R deriv(R x) const { return (img_len / dom_len) * unit.deriv(unit_coord(x)); }
  R second(R x) const { return (img_len / (dom_len * dom_len)) * unit.second(unit_coord(x)); }
  R log_deriv(R x) const { return log(img_len / dom_len) + unit.log_deriv(unit_coord(x)); }
  // int_u^v f''/f' dt, closed form.
  R nonlinearity(R u, R v) const { return log_deriv(v) - log_deriv(u); }
};

struct MapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class R>
struct Giem {
  CombinatorialPair pair;
  std::vector<R> lengths;      // per letter, domain
  std::vector<R> img_lengths;  // per letter, |f(I_alpha)|
  std::vector<Branch<R>> branches;
  std::vector<BranchSpec> specs;

  int d() const { return pair.d(); }

  R domain_start(Letter l) const {
    R a(0.0);
    for (Letter b = 0; b < d(); ++b)
      if (pair.pi0[b] < pair.pi0[l]) a += lengths[b];
    return a;
  }
  R image_start(Letter l) const {
    R a(0.0);
    for (Letter b = 0; b < d(); ++b)
      if (pair.pi1[b] < pair.pi1[l]) a += img_lengths[b];
    return a;
  }

  Letter locate(R x) const {
    R a(0.0);
    for (int rank = 1; rank <= d(); ++rank) {
      Letter l = pair.letter_at(0, rank);
      a += lengths[l];
      if (to_double(x) < to_double(a) || rank == d()) return l;
    }
    throw std::logic_error("unreachable");
  }

  R apply(R x) const { return branches[locate(x)].value(x); }
};

template <class R>
std::vector<R> translation_vector(const CombinatorialPair& pair, const std::vector<R>& lengths) {
  if (!validate_pair(pair).ok()) throw MapError("translation_vector: invalid pair");
  int d = pair.d();
  std::vector<R> w(d, R(0.0));
  for (Letter a = 0; a < d; ++a) {
    for (Letter b = 0; b < d; ++b) {
      if (pair.pi1[b] < pair.pi1[a]) w[a] += lengths[b];
      if (pair.pi0[b] < pair.pi0[a]) w[a] -= lengths[b];
    }
  }
  return w;
}

namespace detail {
template <class R>
void check_unit_lengths(const std::vector<R>& lengths, const char* what) {
  R sum(0.0);
  for (R l : lengths) {
    if (to_double(l) <= 0.0) throw MapError(std::string(what) + ": lengths must be positive");
    sum += l;
  }
  if (std::abs(to_double(sum) - 1.0) > 1e-12)
    throw MapError(std::string(what) + ": lengths must sum to 1");
}

template <class R>
void attach_branches(Giem<R>& f) {
  f.branches.clear();
  for (Letter l = 0; l < f.d(); ++l) {
    Branch<R> b;
    b.dom_a = f.domain_start(l);
    b.dom_len = f.lengths[l];
    b.img_a = f.image_start(l);
    b.img_len = f.img_lengths[l];
    b.unit = UnitMap<R>::make(f.specs[l]);
    f.branches.push_back(b);
  }
}
}  // namespace detail

template <class R>
Giem<R> make_standard_iem(const CombinatorialPair& pair, const std::vector<R>& lengths) {
  if (!validate_pair(pair).ok()) throw MapError("make_standard_iem: invalid pair");
  detail::check_unit_lengths(lengths, "make_standard_iem");
  Giem<R> f;
  f.pair = pair;
  f.lengths = lengths;
  f.img_lengths = lengths;
  f.specs.assign(pair.d(), BranchSpec::affine());
  detail::attach_branches(f);
  return f;
}

// Affine i.e.m. with branch slopes exp(log_slopes[l]); image lengths must
// tile [0,1).
template <class R>
Giem<R> make_affine_iem(const CombinatorialPair& pair, const std::vector<R>& lengths,
                        const std::vector<R>& log_slopes, double tiling_tol = 1e-9) {
  if (!validate_pair(pair).ok()) throw MapError("make_affine_iem: invalid pair");
  detail::check_unit_lengths(lengths, "make_affine_iem");
  Giem<R> f;
  f.pair = pair;
  f.lengths = lengths;
  f.img_lengths.resize(pair.d());
  R total(0.0);
  for (Letter l = 0; l < pair.d(); ++l) {
    f.img_lengths[l] = exp(log_slopes[l]) * lengths[l];
    total += f.img_lengths[l];
  }
  if (std::abs(to_double(total) - 1.0) > tiling_tol)
    throw MapError("make_affine_iem: incompatible slopes, images do not tile [0,1)");
  f.specs.assign(pair.d(), BranchSpec::affine());
  detail::attach_branches(f);
  return f;
}

// General constructor: nonlinear unit branches, image lengths equal to the
// domain lengths (the map permutes equal-length intervals and distorts
// inside each).
template <class R>
Giem<R> make_giem(const CombinatorialPair& pair, const std::vector<R>& lengths,
                  const std::vector<BranchSpec>& specs) {
  if (!validate_pair(pair).ok()) throw MapError("make_giem: invalid pair");
  detail::check_unit_lengths(lengths, "make_giem");
  if (static_cast<int>(specs.size()) != pair.d())
    throw MapError("make_giem: one branch spec per letter");
  Giem<R> f;
  f.pair = pair;
  f.lengths = lengths;
  f.img_lengths = lengths;
  f.specs = specs;
  detail::attach_branches(f);
  return f;
}

// Total mean nonlinearity int_[0,1] f''/f'; zero characterizes the
// zero-mean class.
template <class R>
R mean_nonlinearity(const Giem<R>& f) {
  R sum(0.0);
  for (Letter l = 0; l < f.d(); ++l) {
    const Branch<R>& b = f.branches[l];
    sum += b.nonlinearity(b.dom_a, b.dom_a + b.dom_len);
  }
  return sum;
}

struct BreakData {
  double point = 0.0;
  double amplitude = 0.0;  // ln Df(x-) - ln Df(x+), one-sided closures
};

template <class R>
BreakData break_amplitude(const Giem<R>& f, double point, double tol = 1e-12) {
  int d = f.d();
  // Point 0 is read on the circle: left limit at 1.
  Letter right = -1, left = -1;
  if (std::abs(point) < tol) {
    right = f.pair.letter_at(0, 1);
    left = f.pair.last(0);
    point = 0.0;
  } else {
    for (Letter l = 0; l < d; ++l) {
      double a = to_double(f.domain_start(l));
      if (std::abs(a - point) < tol && f.pair.pi0[l] > 1) {
        right = l;
        left = f.pair.letter_at(0, f.pair.pi0[l] - 1);
        point = a;
        break;
      }
    }
  }
  if (right < 0) throw MapError("break_amplitude: point is not a partition endpoint");
  const Branch<R>& bl = f.branches[left];
  const Branch<R>& br = f.branches[right];
  double amp = to_double(bl.log_deriv(bl.dom_a + bl.dom_len)) - to_double(br.log_deriv(br.dom_a));
  return {point, amp};
}

struct KeaneReport {
  bool no_connection_up_to_depth = true;
  int m = 0;          // first colliding iterate
  Letter alpha = -1;  // orbit start
  Letter beta = -1;   // endpoint hit
};

template <class R>
KeaneReport keane_check(const Giem<R>& f, int depth, double tol = 1e-12) {
  int d = f.d();
  std::vector<double> endpoints(d);
  for (Letter l = 0; l < d; ++l) endpoints[l] = to_double(f.domain_start(l));
  KeaneReport best;
  for (Letter a = 0; a < d; ++a) {
    R x(endpoints[a]);
    for (int m = 1; m <= depth; ++m) {
      x = f.apply(x);
      for (Letter b = 0; b < d; ++b) {
        if (f.pair.pi0[b] == 1) continue;  // exempt: f(dI_alpha) = dI_beta there
        if (std::abs(to_double(x) - endpoints[b]) < tol) {
          if (best.no_connection_up_to_depth || m < best.m) {
            best = {false, m, a, b};
          }
          m = depth + 1;  // stop this orbit
          break;
        }
      }
    }
  }
  return best;
}

}  // namespace rauzy

// Convergence machinery: zoomed return-map branches, the Moebius comparison
// family, log-derivative mean vectors and their pseudo-orbit residuals,
// subspace decompositions, slope-vector extraction, the affine model, C^1 and
// L^1-second-derivative distances, and the l2 smoothing sequences.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rauzy/cocycle.hpp"
#include "rauzy/induction.hpp"
#include "rauzy/maps.hpp"
#include "rauzy/numeric.hpp"

namespace rauzy {

// ---------------------------------------------------------------------------
// ZoomedMap: a branch affinely conjugated to a homeomorphism of [0,1],
// sampled on a uniform grid with callable off-grid evaluators.
// ---------------------------------------------------------------------------
struct ZoomedMap {
  int grid_n = 4097;
  std::vector<double> values, derivs;  // at i/(grid_n-1)
  std::function<double(double)> value_fn, deriv_fn, second_fn;
  std::vector<double> kinks;  // interior points where D2 may jump or blow up
  std::string provenance;

  double node(int i) const { return static_cast<double>(i) / (grid_n - 1); }
};

namespace detail {
inline ZoomedMap make_zoomed(std::function<double(double)> v, std::function<double(double)> dv,
                             std::function<double(double)> d2v, int grid_n,
                             std::vector<double> kinks, std::string provenance,
                             double endpoint_tol = 1e-10) {
  if (grid_n < 3) throw std::invalid_argument("ZoomedMap: grid too small");
  ZoomedMap z;
  z.grid_n = grid_n;
  z.value_fn = std::move(v);
  z.deriv_fn = std::move(dv);
  z.second_fn = std::move(d2v);
  z.kinks = std::move(kinks);
  z.provenance = std::move(provenance);
  z.values.resize(grid_n);
  z.derivs.resize(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    double x = z.node(i);
    z.values[i] = z.value_fn(x);
    z.derivs[i] = z.deriv_fn(x);
  }
  if (std::abs(z.values.front()) > endpoint_tol || std::abs(z.values.back() - 1.0) > endpoint_tol)
    throw MapError("ZoomedMap: endpoints do not map to 0 and 1");
  for (int i = 1; i < grid_n; ++i)
    if (!(z.values[i] > z.values[i - 1]))
      throw MapError("ZoomedMap: samples are not strictly increasing");
  return z;
}

// Preimages (in [0,1] zoom coordinates) of power-kink centers crossed by the
// orbit of [a, a+len] under `word`.
template <class R>
std::vector<double> word_kink_preimages(const Giem<R>& f, const std::vector<Letter>& word, R a,
                                        R len) {
  std::vector<double> out;
  R p = a, q = a + len;
  for (size_t i = 0; i < word.size(); ++i) {
    const Branch<R>& b = f.branches[word[i]];
    if (b.unit.spec.kind == BranchKind::power_kink) {
      double xc = to_double(b.dom_a) + to_double(b.dom_len) * b.unit.spec.center;
      if (xc > to_double(p) + 1e-14 && xc < to_double(q) - 1e-14) {
        std::vector<Letter> prefix(word.begin(), word.begin() + i);
        R s = invert_word(f, prefix, a, a + len, R(xc));
        out.push_back((to_double(s) - to_double(a)) / to_double(len));
      }
    }
    p = b.value(p);
    q = b.value(q);
  }
  std::sort(out.begin(), out.end());
  return out;
}
}  // namespace detail

// Zoom of a single branch: the affine frame cancels, leaving the unit map.
template <class R>
ZoomedMap zoom_branch(const Branch<R>& b, int grid_n = 4097) {
  UnitMap<R> u = b.unit;
  std::vector<double> kinks;
  if (u.spec.kind == BranchKind::power_kink) kinks.push_back(u.spec.center);
  return detail::make_zoomed([u](double x) { return to_double(u.value(R(x))); },
                             [u](double x) { return to_double(u.deriv(R(x))); },
                             [u](double x) { return to_double(u.second(R(x))); }, grid_n,
                             std::move(kinks), "branch");
}

// Zoom of the return-map branch over the fundamental interval of `letter`.
template <class R>
ZoomedMap zoom(const InductionState<R>& s, const Giem<R>& f, Letter letter, int grid_n = 4097) {
  if (letter < 0 || letter >= s.pair.d()) throw std::invalid_argument("zoom: bad letter");
  R a = s.fund_start(letter);
  R len = s.lengths[letter];
  std::vector<Letter> word = s.words[letter];
  R wa = eval_word(f, word, a, 0).value;
  R wlen = eval_word(f, word, a + len, 0).value - wa;
  if (to_double(wlen) <= 0.0) throw MapError("zoom: branch image is degenerate");
  Giem<R> fc = f;
  auto vf = [fc, word, a, len, wa, wlen](double x) {
    return to_double((eval_word(fc, word, a + R(x) * len, 0).value - wa) / wlen);
  };
  auto df = [fc, word, a, len, wa, wlen](double x) {
    return to_double(eval_word(fc, word, a + R(x) * len, 1).deriv * len / wlen);
  };
  auto d2f = [fc, word, a, len, wa, wlen](double x) {
    return to_double(eval_word(fc, word, a + R(x) * len, 2).second * len * len / wlen);
  };
  std::vector<double> kinks = detail::word_kink_preimages(f, word, a, len);
  return detail::make_zoomed(vf, df, d2f, grid_n,
                             std::move(kinks),
                             "level " + std::to_string(s.level) + " letter " +
                                 f.pair.alphabet.symbols[letter]);
}

// The Moebius comparison family F(x) = x m / (1 + x (m-1)).
inline ZoomedMap moebius_F(double m, int grid_n = 4097) {
  if (m <= 0.0) throw std::invalid_argument("moebius_F: m must be positive");
  return detail::make_zoomed(
      [m](double x) { return x * m / (1.0 + x * (m - 1.0)); },
      [m](double x) {
        double den = 1.0 + x * (m - 1.0);
        return m / (den * den);
      },
      [m](double x) {
        double den = 1.0 + x * (m - 1.0);
        return -2.0 * m * (m - 1.0) / (den * den * den);
      },
      grid_n, {}, "moebius family");
}

// Comparison coefficient: exp of minus half the accumulated nonlinearity of
// the return branch. Closed form: the per-element integrals of f''/f'
// telescope to ln D of the composed word at the interval endpoints.
template <class R>
double m_n_coefficient(const InductionState<R>& s, const Giem<R>& f, Letter letter) {
  R a = s.fund_start(letter);
  R b = a + s.lengths[letter];
  double da = to_double(eval_word(f, s.words[letter], a, 1).deriv);
  double db = to_double(eval_word(f, s.words[letter], b, 1).deriv);
  if (!(da > 0.0) || !(db > 0.0)) throw MapError("m_n_coefficient: nonpositive derivative");
  return std::sqrt(da / db);
}

// ---------------------------------------------------------------------------
// Mean log-derivative vectors and their propagation residuals.
// ---------------------------------------------------------------------------
struct LVector {
  int level = 0;
  Eigen::VectorXd values;
};

template <class R>
LVector L_vector(const InductionState<R>& s, const Giem<R>& f, double quad_tol = 1e-10) {
  int d = s.pair.d();
  LVector lv;
  lv.level = s.level;
  lv.values.resize(d);
  for (Letter l = 0; l < d; ++l) {
    R a = s.fund_start(l);
    R len = s.lengths[l];
    std::vector<double> splits;
    for (double k : detail::word_kink_preimages(f, s.words[l], a, len))
      splits.push_back(to_double(a) + k * to_double(len));
    const auto& word = s.words[l];
    auto integrand = [&](double x) {
      return std::log(to_double(eval_word(f, word, R(x), 1).deriv));
    };
    lv.values(l) =
        integrate(integrand, to_double(a), to_double(a) + to_double(len),
                  quad_tol * std::max(1e-3, to_double(len)), splits) /
        to_double(len);
  }
  return lv;
}

inline Eigen::VectorXd apply_theta(const ThetaMatrix& t, const Eigen::VectorXd& v) {
  Eigen::VectorXd w = v;
  w(t.loser) += v(t.winner);
  return w;
}

inline Eigen::VectorXd apply_theta_inverse(const ThetaMatrix& t, const Eigen::VectorXd& v) {
  Eigen::VectorXd w = v;
  w(t.loser) -= v(t.winner);
  return w;
}

struct PseudoOrbitResidual {
  Eigen::VectorXd eps;
  double norm = 0.0;
};

inline PseudoOrbitResidual pseudo_orbit_residual(const LVector& ln, const LVector& ln1,
                                                 const ThetaMatrix& theta) {
  if (ln.values.size() != ln1.values.size())
    throw std::invalid_argument("pseudo_orbit_residual: dimension mismatch");
  PseudoOrbitResidual r;
  r.eps = ln1.values - apply_theta(theta, ln.values);
  r.norm = r.eps.norm();
  return r;
}

struct LDecomposition {
  Eigen::VectorXd stable, central, unstable;
  double residual = 0.0;
};

inline LDecomposition decompose_L(const Eigen::VectorXd& L,
                                  const std::vector<Eigen::VectorXd>& es,
                                  const std::vector<Eigen::VectorXd>& ec,
                                  const std::vector<Eigen::VectorXd>& eu) {
  int d = static_cast<int>(L.size());
  int cols = static_cast<int>(es.size() + ec.size() + eu.size());
  if (cols != d) throw std::invalid_argument("decompose_L: basis does not span (wrong count)");
  Eigen::MatrixXd B(d, d);
  int c = 0;
  for (const auto& v : es) B.col(c++) = v;
  for (const auto& v : ec) B.col(c++) = v;
  for (const auto& v : eu) B.col(c++) = v;
  Eigen::MatrixXd G = B.transpose() * B;
  if (std::abs(G.determinant()) < 1e-10)
    throw std::invalid_argument("decompose_L: degenerate basis");
  Eigen::VectorXd coef = B.fullPivLu().solve(L);
  LDecomposition out;
  out.residual = (B * coef - L).norm();
  if (out.residual > 1e-10 * std::max(1.0, L.norm()))
    throw std::runtime_error("decompose_L: solve residual too large");
  out.stable = Eigen::VectorXd::Zero(d);
  out.central = Eigen::VectorXd::Zero(d);
  out.unstable = Eigen::VectorXd::Zero(d);
  c = 0;
  for (const auto& v : es) out.stable += coef(c++) * v;
  for (const auto& v : ec) out.central += coef(c++) * v;
  for (const auto& v : eu) out.unstable += coef(c++) * v;
  return out;
}

// ---------------------------------------------------------------------------
// Slope vector: pull the central components of L^n back to level 0 and watch
// the sequence become Cauchy.
// ---------------------------------------------------------------------------
struct SlopeVector {
  Eigen::VectorXd omega;                    // at level 0
  std::vector<Eigen::VectorXd> omega_tilde;  // per level inspected
  std::vector<double> increments;
  bool accepted = false;
  bool warning = false;
};

template <class R>
SlopeVector slope_vector(const RenormResult<R>& r, const Giem<R>& f, int N,
                         double accept_tol = 1e-6, int stable_window = 20) {
  int d = f.d();
  int total = r.path.length();
  if (N < 1 || N > total) throw std::invalid_argument("slope_vector: depth out of range");
  SlopeVector sv;
  sv.omega = Eigen::VectorXd::Zero(d);

  if (d == 2) {
    // Trivial central space: the slope vector is 0 and the model is standard.
    sv.accepted = true;
    for (int n = 1; n <= N; ++n) {
      sv.omega_tilde.push_back(sv.omega);
      if (n > 1) sv.increments.push_back(0.0);
    }
    return sv;
  }

  CocyclePath cp = CocyclePath::from(r.path);
  // Central basis at level 0 from periodic closures of increasing prefixes.
  std::vector<int> ladder;
  for (int frac = 1; frac <= 4; ++frac) {
    int n = std::max(1, N * frac / 4);
    if (ladder.empty() || n > ladder.back()) ladder.push_back(n);
  }
  CentralLimit cl = central_space_limit(r.path, ladder);
  std::vector<Eigen::VectorXd> ec0 = cl.last.raw_vectors;

  Eigen::VectorXd u = canonical_unstable_seed(f.pair);
  for (int n = 1; n <= N; ++n) {
    u = apply_theta(cp.thetas[n - 1], u);
    int depth = std::min(n + stable_window, total);
    if (depth <= n) break;
    std::vector<Eigen::VectorXd> es{stable_subspace_at(cp, n, depth).vectors};
    std::vector<Eigen::VectorXd> ec;
    for (const auto& v : ec0) {
      Eigen::VectorXd w = v;
      for (int i = 0; i < n; ++i) w = apply_theta(cp.thetas[i], w);
      ec.push_back(w.normalized());
    }
    std::vector<Eigen::VectorXd> eu{u.normalized()};
    LVector lv = L_vector(r.levels[n], f);
    LDecomposition dec = decompose_L(lv.values, es, ec, eu);
    Eigen::VectorXd back = dec.central;
    for (int i = n - 1; i >= 0; --i) back = apply_theta_inverse(cp.thetas[i], back);
    if (!sv.omega_tilde.empty())
      sv.increments.push_back((back - sv.omega_tilde.back()).norm());
    sv.omega_tilde.push_back(back);
  }
  if (sv.omega_tilde.empty()) throw std::runtime_error("slope_vector: no levels inspected");
  sv.omega = sv.omega_tilde.back();
  if (!sv.increments.empty()) {
    sv.accepted = sv.increments.back() < accept_tol;
    size_t m = sv.increments.size();
    if (m >= 3 && sv.increments[m - 1] > sv.increments[m - 2] &&
        sv.increments[m - 2] > sv.increments[m - 3])
      sv.warning = true;
  }
  return sv;
}

// ---------------------------------------------------------------------------
// Affine model: the unique affine exchange following the same induction path,
// built by pulling a positive vector back through the slope-weighted
// inverse-step maps.
// ---------------------------------------------------------------------------
struct AffineModel {
  Giem<double> model;
  std::vector<double> lengths;
  std::vector<double> log_slopes;
  int matched_steps = 0;
  double tiling_shift = 0.0;  // constant added to the slopes for exact tiling
};

template <class R>
AffineModel affine_model(const RenormResult<R>& r, const Eigen::VectorXd& omega, int N) {
  int d = r.path.vertices.front().d();
  if (omega.size() != d) throw std::invalid_argument("affine_model: slope dimension mismatch");
  if (N < 1 || N > r.path.length()) throw std::invalid_argument("affine_model: bad depth");

  // Forward slope vectors omega^i at each level.
  std::vector<Eigen::VectorXd> om(N + 1);
  om[0] = omega;
  for (int i = 0; i < N; ++i) {
    const RauzyStep& st = r.path.steps[i];
    om[i + 1] = om[i];
    om[i + 1](st.loser) += om[i](st.winner);
  }

  // Backward pullback of a positive vector through the inverse steps.
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(d);
  for (int i = N - 1; i >= 0; --i) {
    const RauzyStep& st = r.path.steps[i];
    Letter a0 = st.before.last(0), a1 = st.before.last(1);
    double ew = std::exp(om[i](a1));
    if (st.eps == 0) {
      lam(a0) += ew * lam(a1);
    } else {
      double l0 = lam(a0), l1 = lam(a1);
      lam(a0) = ew * l0;
      lam(a1) = l1 + l0;
    }
  }
  lam /= lam.sum();

  double total = 0.0;
  for (int l = 0; l < d; ++l) total += std::exp(omega(l)) * lam(l);
  double shift = -std::log(total);

  AffineModel out;
  out.tiling_shift = shift;
  std::vector<double> lengths(d), slopes(d);
  for (int l = 0; l < d; ++l) {
    lengths[l] = lam(l);
    slopes[l] = omega(l) + shift;
  }
  out.lengths = lengths;
  out.log_slopes = slopes;
  out.model = make_affine_iem(r.path.vertices.front(), lengths, slopes);

  RenormResult<double> check = renormalize(out.model, N);
  int matched = 0;
  for (int i = 0; i < std::min<int>(N, check.path.length()); ++i) {
    const RauzyStep& a = r.path.steps[i];
    const RauzyStep& b = check.path.steps[i];
    if (a.eps != b.eps || a.winner != b.winner) break;
    ++matched;
  }
  out.matched_steps = matched;
  if (matched < (N + 1) / 2)
    throw std::runtime_error("affine_model: rejected, path diverges at level " +
                             std::to_string(matched));
  return out;
}

// ---------------------------------------------------------------------------
// Distances.
// ---------------------------------------------------------------------------
namespace detail {
inline double refined_max(const std::function<double(double)>& g, double lo, double hi,
                          double seed) {
  double best = seed;
  for (int it = 0; it < 60; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    double g1 = g(m1), g2 = g(m2);
    best = std::max({best, g1, g2});
    if (g1 < g2) lo = m1;
    else hi = m2;
  }
  return best;
}

inline double grid_sup(const ZoomedMap& a, const ZoomedMap& b, const std::vector<double>& va,
                       const std::vector<double>& vb, const std::function<double(double)>& fa,
                       const std::function<double(double)>& fb) {
  int n = a.grid_n;
  int arg = 0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double dv = std::abs(va[i] - vb[i]);
    if (dv > worst) {
      worst = dv;
      arg = i;
    }
  }
  if (fa && fb) {
    double lo = a.node(std::max(0, arg - 1));
    double hi = a.node(std::min(n - 1, arg + 1));
    worst = refined_max([&](double x) { return std::abs(fa(x) - fb(x)); }, lo, hi, worst);
  }
  return worst;
}
}  // namespace detail

// sup |a-b| + sup |Da-Db|, on the shared grid with local ternary refinement.
inline double c1_distance(const ZoomedMap& a, const ZoomedMap& b) {
  if (a.grid_n != b.grid_n) throw std::invalid_argument("c1_distance: grid mismatch");
  double dv = detail::grid_sup(a, b, a.values, b.values, a.value_fn, b.value_fn);
  double dd_ = detail::grid_sup(a, b, a.derivs, b.derivs, a.deriv_fn, b.deriv_fn);
  return dv + dd_;
}

inline double l1_second_derivative_distance(const ZoomedMap& a, const ZoomedMap& b,
                                            double quad_tol = 1e-8) {
  if (!a.second_fn || !b.second_fn)
    throw std::invalid_argument("l1_second_derivative_distance: order-2 evaluator missing");
  std::vector<double> splits = a.kinks;
  splits.insert(splits.end(), b.kinks.begin(), b.kinks.end());
  auto g = [&](double x) { return std::abs(a.second_fn(x) - b.second_fn(x)); };
  return integrate(g, 0.0, 1.0, quad_tol, splits);
}

// ---------------------------------------------------------------------------
// The l2 smoothing sequences (1-based):
//   x_n = sum_{j>=n} lambda^{j-n} r_j,
//   y_n = sum_{j=0}^{n-1} lambda^j r_{n+j},
//   z_n = sum_{j=0}^{n-1} lambda^j r_{n-j},
// with the bound  sum x_n^2, sum z_n^2 <= (1-lambda)^{-2} sum r_n^2.
// ---------------------------------------------------------------------------
struct SmoothingSequences {
  std::vector<double> x, y, z;  // index i holds the (i+1)-th term
  double sum_r2 = 0.0, sum_x2 = 0.0, sum_y2 = 0.0, sum_z2 = 0.0;
  bool x_bound_ok = false, z_bound_ok = false, y_le_x = false;
};

inline SmoothingSequences l2_smoothing_sequences(const std::vector<double>& r, double lambda,
                                                 int N) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("l2_smoothing_sequences: lambda outside (0,1)");
  for (double v : r)
    if (v < 0.0) throw std::invalid_argument("l2_smoothing_sequences: r must be nonnegative");
  int M = static_cast<int>(r.size());
  auto rr = [&](int n) { return (n >= 1 && n <= M) ? r[n - 1] : 0.0; };  // 1-based, zero tail
  SmoothingSequences s;
  for (int n = 1; n <= N; ++n) {
    double x = 0.0, pw = 1.0;
    for (int j = n; j <= M; ++j, pw *= lambda) x += pw * rr(j);
    double y = 0.0;
    pw = 1.0;
    for (int j = 0; j <= n - 1; ++j, pw *= lambda) y += pw * rr(n + j);
    double z = 0.0;
    pw = 1.0;
    for (int j = 0; j <= n - 1; ++j, pw *= lambda) z += pw * rr(n - j);
    s.x.push_back(x);
    s.y.push_back(y);
    s.z.push_back(z);
    s.sum_x2 += x * x;
    s.sum_y2 += y * y;
    s.sum_z2 += z * z;
  }
  for (double v : r) s.sum_r2 += v * v;
  double cap = s.sum_r2 / ((1.0 - lambda) * (1.0 - lambda));
  s.x_bound_ok = s.sum_x2 <= cap * (1.0 + 1e-12);
  s.z_bound_ok = s.sum_z2 <= cap * (1.0 + 1e-12);
  s.y_le_x = true;
  for (size_t i = 0; i < s.x.size(); ++i)
    if (s.y[i] > s.x[i] + 1e-12) s.y_le_x = false;
  return s;
}

}  // namespace rauzy

// Named constructions and experiment drivers: golden-combinatorics maps of
// each branch family (tuned by cylinder bisection on the first length), the
// zero-mean break-equivalent pair, seeded random exchanges, and the trend
// series behind the convergence experiments.
#pragma once

#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "rauzy/analysis.hpp"
#include "rauzy/cocycle.hpp"
#include "rauzy/induction.hpp"
#include "rauzy/maps.hpp"

namespace rauzy {

inline constexpr double kGoldenLength = 0.61803398874989485;  // 1/phi

inline CombinatorialPair pair_d2() { return pair_from_monodromy({2, 1}); }
inline CombinatorialPair pair_d3() { return pair_from_monodromy({3, 2, 1}); }

inline Giem<double> golden_standard() {
  // lambda = (2 - phi, phi - 1): first step is type 0 with winner B and the
  // q-history runs through consecutive Fibonacci pairs.
  return make_standard_iem(pair_d2(), std::vector<double>{1.0 - kGoldenLength, kGoldenLength});
}

// Observed type sequence of the first n induction steps (shorter on a
// suspected connection).
template <class R>
std::vector<int> achieved_types(const Giem<R>& f, int n) {
  RenormResult<R> r = renormalize(f, n);
  std::vector<int> t;
  for (const RauzyStep& s : r.path.steps) t.push_back(s.eps);
  return t;
}

namespace detail {
// Lexicographic comparison of type sequences with 0 > 1 at each slot;
// 0 when one is a prefix of the other.
inline int type_seq_cmp(const std::vector<int>& a, const std::vector<int>& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return a[i] == 0 ? 1 : -1;
  return 0;
}
}  // namespace detail

// Bisection on the first length of a one-parameter d=2 family until the
// induction path follows `target`. Works because each induction step is
// orientation-preserving on the length ratio, so type-sequence cylinders are
// nested intervals ordered consistently; the orientation is detected from
// the bracket ends.
inline double tune_d2_length(const std::function<Giem<double>(double)>& family,
                             const std::vector<int>& target, double lo = 0.05,
                             double hi = 0.95, int max_iter = 120) {
  int n = static_cast<int>(target.size());
  auto seq = [&](double lam) { return achieved_types(family(lam), n); };
  int orient = detail::type_seq_cmp(seq(hi), seq(lo));  // +1: key increasing in lambda
  if (orient == 0) throw std::runtime_error("tune_d2_length: bracket does not separate types");
  for (int it = 0; it < max_iter; ++it) {
    double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    std::vector<int> s = seq(mid);
    int c = detail::type_seq_cmp(s, target);
    if (c == 0) {
      if (s.size() >= target.size()) return mid;
      // connection boundary: nudge off it
      double nudged = mid + (hi - lo) * 1e-7;
      s = seq(nudged);
      c = detail::type_seq_cmp(s, target);
      if (c == 0 && s.size() >= target.size()) return nudged;
      if (c == 0) throw std::runtime_error("tune_d2_length: stuck on a connection boundary");
      mid = nudged;
    }
    if (c * orient > 0) hi = mid;
    else lo = mid;
  }
  double mid = 0.5 * (lo + hi);
  if (detail::type_seq_cmp(seq(mid), target) == 0 && seq(mid).size() >= target.size())
    return mid;
  throw std::runtime_error("tune_d2_length: bisection did not land in the target cylinder");
}

// d=2 map with the given branch specs, tuned to follow the golden
// (alternating-type) path for `depth` steps.
inline Giem<double> golden_giem(const std::vector<BranchSpec>& specs, int depth = 26) {
  std::vector<int> target = achieved_types(golden_standard(), depth);
  if (static_cast<int>(target.size()) < depth)
    throw std::runtime_error("golden_giem: reference path too short");
  auto family = [&](double lam) {
    return make_giem(pair_d2(), std::vector<double>{lam, 1.0 - lam}, specs);
  };
  double lam = tune_d2_length(family, target);
  return family(lam);
}

inline Giem<double> golden_moebius(double m, int depth = 26) {
  return golden_giem({BranchSpec::moebius(m), BranchSpec::moebius(m)}, depth);
}

// Zero mean nonlinearity: the two Moebius branches cancel exactly.
inline Giem<double> golden_moebius_zero_mean(double m, int depth = 26) {
  return golden_giem({BranchSpec::moebius(m), BranchSpec::moebius(1.0 / m)}, depth);
}

// ---------------------------------------------------------------------------
// Zero-mean break-equivalent pair with golden combinatorics: both maps mix a
// Moebius branch with a power kink, but g's kink sits at a different center.
// Zero mean ties each map's Moebius parameter to its kink amplitude; g's
// amplitude is then solved so the derivative jumps match at the interior
// partition point. Matching at 0 comes for free (the two jumps sum to the
// total nonlinearity, which is zero for both maps).
// ---------------------------------------------------------------------------
struct KoPair {
  Giem<double> f, g;
  double interior_jump = 0.0;  // shared break amplitude at the interior point
};

inline KoPair ko_break_equivalent_pair(int depth = 26, double m = 1.3, double beta = 0.6,
                                       double c_f = 0.4, double c_g = 0.25) {
  // Interior jump of a zero-mean (moebius, power_kink(c, beta, amp)) map.
  auto interior_jump = [beta](double c, double amp) {
    double k = std::pow(1.0 - c, beta) + std::pow(c, beta);
    BranchSpec kink = BranchSpec::power_kink(c, beta, amp);
    double t = to_double(UnitMap<double>::make(kink).pk_total);
    double log_m = amp * k / 2.0;  // zero-mean constraint
    return -log_m + amp * std::pow(c, beta) + std::log(t);
  };

  double k_f = std::pow(1.0 - c_f, beta) + std::pow(c_f, beta);
  double amp_f = 2.0 * std::log(m) / k_f;
  double target = interior_jump(c_f, amp_f);

  // Bracket the amplitude for g by scanning, then bisect.
  auto h = [&](double amp) { return interior_jump(c_g, amp) - target; };
  double lo = 0.0, hi = 0.0;
  bool found = false;
  double prev_a = -8.0, prev_h = h(prev_a);
  for (double a = -7.75; a <= 8.0 + 1e-9 && !found; a += 0.25) {
    double ha = h(a);
    if (prev_h == 0.0 || prev_h * ha < 0.0) {
      lo = prev_a;
      hi = a;
      found = true;
    }
    prev_a = a;
    prev_h = ha;
  }
  if (!found) throw std::runtime_error("break-equivalent pair: no amplitude bracket");
  double flo = h(lo);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = h(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double amp_g = 0.5 * (lo + hi);
  double k_g = std::pow(1.0 - c_g, beta) + std::pow(c_g, beta);
  double m_g = std::exp(amp_g * k_g / 2.0);

  KoPair out;
  out.f = golden_giem({BranchSpec::moebius(m), BranchSpec::power_kink(c_f, beta, amp_f)}, depth);
  out.g =
      golden_giem({BranchSpec::moebius(m_g), BranchSpec::power_kink(c_g, beta, amp_g)}, depth);
  out.interior_jump = target;
  return out;
}

// ---------------------------------------------------------------------------
// Seeded random genus-one exchanges with mixed branch kinds.
// ---------------------------------------------------------------------------
inline Giem<double> random_genus_one_giem(std::mt19937_64& rng, int max_d = 4) {
  std::uniform_int_distribution<int> pick_d(2, max_d);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    int d = pick_d(rng);
    std::vector<int> p(d);
    for (int i = 0; i < d; ++i) p[i] = i + 1;
    std::shuffle(p.begin(), p.end(), rng);
    CombinatorialPair pair = pair_from_monodromy(p);
    if (!validate_pair(pair).ok() || genus(pair) != 1) continue;
    std::vector<double> lengths(d);
    double sum = 0.0;
    for (double& l : lengths) {
      l = 0.1 + unif(rng);
      sum += l;
    }
    for (double& l : lengths) l /= sum;
    std::vector<BranchSpec> specs;
    for (int l = 0; l < d; ++l) {
      double k = unif(rng);
      if (k < 0.34) specs.push_back(BranchSpec::affine());
      else if (k < 0.67)
        specs.push_back(BranchSpec::moebius(0.8 + 0.6 * unif(rng)));
      else
        specs.push_back(BranchSpec::power_kink(0.2 + 0.6 * unif(rng), 0.4 + 0.4 * unif(rng),
                                               -0.5 + unif(rng)));
    }
    return make_giem(pair, lengths, specs);
  }
  throw std::runtime_error("random_genus_one_giem: sampling failed");
}

// ---------------------------------------------------------------------------
// Combinatorial control paths.
// ---------------------------------------------------------------------------
inline RauzyPath alternating_path(const CombinatorialPair& start, int n, int first = 0) {
  RauzyPath p = RauzyPath::start_at(start);
  for (int i = 0; i < n; ++i) p.push((first + i) % 2);
  return p;
}

inline RauzyPath constant_path(const CombinatorialPair& start, int n, int eps) {
  RauzyPath p = RauzyPath::start_at(start);
  for (int i = 0; i < n; ++i) p.push(eps);
  return p;
}

// ---------------------------------------------------------------------------
// Trend series.
// ---------------------------------------------------------------------------
struct TrendSeries {
  std::vector<int> levels;
  std::vector<double> c1, l1;      // per level, max over letters
  double c1_slope = 0.0, l1_slope = 0.0;  // log-slope over the fit window
  double c1_sumsq = 0.0;
};

namespace detail {
inline double log_slope_window(const std::vector<int>& ns, const std::vector<double>& as,
                               int from = 5, int to = 15) {
  std::vector<double> xs, ys;
  for (size_t i = 0; i < ns.size(); ++i)
    if (ns[i] >= from && ns[i] <= to) {
      xs.push_back(ns[i]);
      ys.push_back(std::log(std::max(as[i], 1e-300)));
    }
  return fit_slope(xs, ys);
}
}  // namespace detail

// Distance of the zoomed renormalizations to the Moebius family with the
// accumulated-nonlinearity coefficient.
template <class R>
TrendSeries moebius_comparison_trend(const Giem<R>& f, int n_max, int grid = 4097) {
  RenormResult<R> r = renormalize(f, n_max);
  if (r.depth() < n_max)
    throw std::runtime_error("moebius_comparison_trend: connection before requested depth");
  TrendSeries t;
  for (int n = 1; n <= n_max; ++n) {
    double worst_c1 = 0.0, worst_l1 = 0.0;
    for (Letter l = 0; l < f.d(); ++l) {
      ZoomedMap z = zoom(r.levels[n], f, l, grid);
      ZoomedMap F = moebius_F(m_n_coefficient(r.levels[n], f, l), grid);
      worst_c1 = std::max(worst_c1, c1_distance(z, F));
      worst_l1 = std::max(worst_l1, l1_second_derivative_distance(z, F));
    }
    t.levels.push_back(n);
    t.c1.push_back(worst_c1);
    t.l1.push_back(worst_l1);
    t.c1_sumsq += worst_c1 * worst_c1;
  }
  t.c1_slope = detail::log_slope_window(t.levels, t.c1, 5, std::min(15, n_max));
  t.l1_slope = detail::log_slope_window(t.levels, t.l1, 5, std::min(15, n_max));
  return t;
}

struct ModelTrend {
  TrendSeries dist;
  std::vector<double> zeta_gap;  // || normalized lengths of R^n f  -  of R^n f_A ||
  double zeta_sumsq = 0.0;
  AffineModel model;
  SlopeVector slopes;
};

template <class R>
ModelTrend affine_model_trend(const Giem<R>& f, int n_max, int grid = 4097,
                              int build_depth = -1) {
  if (build_depth < 0) build_depth = n_max + 6;
  RenormResult<R> r = renormalize(f, build_depth);
  if (r.depth() < build_depth)
    throw std::runtime_error("affine_model_trend: connection before build depth");
  ModelTrend out;
  out.slopes = slope_vector(r, f, std::max(1, n_max / 2));
  out.model = affine_model(r, out.slopes.omega, build_depth);
  if (out.model.matched_steps <= n_max)
    throw std::runtime_error("affine_model_trend: model path diverges inside the window");
  RenormResult<double> rm = renormalize(out.model.model, n_max);
  for (int n = 1; n <= n_max; ++n) {
    double worst = 0.0;
    for (Letter l = 0; l < f.d(); ++l)
      worst = std::max(worst, c1_distance(zoom(r.levels[n], f, l, grid),
                                          zoom(rm.levels[n], out.model.model, l, grid)));
    double gap = 0.0;
    for (Letter l = 0; l < f.d(); ++l) {
      double zf = to_double(r.levels[n].lengths[l]) / to_double(r.levels[n].domain_len);
      double zm = to_double(rm.levels[n].lengths[l]) / to_double(rm.levels[n].domain_len);
      gap += (zf - zm) * (zf - zm);
    }
    gap = std::sqrt(gap);
    out.dist.levels.push_back(n);
    out.dist.c1.push_back(worst);
    out.dist.c1_sumsq += worst * worst;
    out.zeta_gap.push_back(gap);
    out.zeta_sumsq += gap * gap;
  }
  out.dist.c1_slope = detail::log_slope_window(out.dist.levels, out.dist.c1, 5,
                                               std::min(15, n_max));
  return out;
}

// Distance between the zoomed renormalizations of two maps with the same
// induction path.
template <class R>
TrendSeries pair_distance_trend(const Giem<R>& f, const Giem<R>& g, int n_max, int grid = 4097) {
  RenormResult<R> rf = renormalize(f, n_max);
  RenormResult<R> rg = renormalize(g, n_max);
  if (rf.depth() < n_max || rg.depth() < n_max)
    throw std::runtime_error("pair_distance_trend: connection before requested depth");
  for (int i = 0; i < n_max; ++i)
    if (rf.path.steps[i].eps != rg.path.steps[i].eps)
      throw std::runtime_error("pair_distance_trend: maps do not share combinatorics");
  TrendSeries t;
  for (int n = 1; n <= n_max; ++n) {
    double worst = 0.0;
    for (Letter l = 0; l < f.d(); ++l)
      worst = std::max(worst, c1_distance(zoom(rf.levels[n], f, l, grid),
                                          zoom(rg.levels[n], g, l, grid)));
    t.levels.push_back(n);
    t.c1.push_back(worst);
    t.c1_sumsq += worst * worst;
  }
  t.c1_slope = detail::log_slope_window(t.levels, t.c1, 5, std::min(15, n_max));
  return t;
}

struct ResidualSeries {
  std::vector<double> norms;  // ||eps_n|| for n = 0..N-1
  double sumsq = 0.0;
  double max_norm = 0.0;
};

template <class R>
ResidualSeries residual_series(const Giem<R>& f, int n_max) {
  RenormResult<R> r = renormalize(f, n_max + 1);
  if (r.depth() < n_max + 1)
    throw std::runtime_error("residual_series: connection before requested depth");
  ResidualSeries out;
  std::vector<LVector> ls;
  for (int n = 0; n <= n_max + 1; ++n) ls.push_back(L_vector(r.levels[n], f));
  for (int n = 0; n <= n_max; ++n) {
    ThetaMatrix th = theta_matrix(r.path.steps[n].before, r.path.steps[n].eps);
    PseudoOrbitResidual e = pseudo_orbit_residual(ls[n], ls[n + 1], th);
    out.norms.push_back(e.norm);
    out.sumsq += e.norm * e.norm;
    out.max_norm = std::max(out.max_norm, e.norm);
  }
  return out;
}

}  // namespace rauzy

// Rauzy-Veech induction: type detection, interval/word/return-time updates,
// dynamical partitions, and a brute-force first-return oracle.
//
// Return maps are represented by words over the original alphabet; word
// evaluation follows the itinerary and checks that intermediate points stay
// in the expected branch domains. All interval arithmetic happens in map
// coordinates on [0,1); no rescaling here.
#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rauzy/bigmat.hpp"
#include "rauzy/combinatorics.hpp"
#include "rauzy/maps.hpp"

namespace rauzy {

struct ConnectionError : std::runtime_error {
  int level;
  explicit ConnectionError(int level_)
      : std::runtime_error("connection suspected at level " + std::to_string(level_)),
        level(level_) {}
};

struct ItineraryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class R>
struct InductionState {
  int level = 0;
  R domain_len{1.0};
  CombinatorialPair pair;
  std::vector<R> lengths;               // fundamental interval lengths, per letter
  std::vector<R> img_lengths;           // image interval lengths under R^n(f)
  std::vector<std::vector<Letter>> words;  // return words, time order
  std::vector<BigInt> times;            // q^n_alpha, exact

  R fund_start(Letter l) const {
    R a(0.0);
    for (Letter b = 0; b < pair.d(); ++b)
      if (pair.pi0[b] < pair.pi0[l]) a += lengths[b];
    return a;
  }
  R image_start(Letter l) const {
    R a(0.0);
    for (Letter b = 0; b < pair.d(); ++b)
      if (pair.pi1[b] < pair.pi1[l]) a += img_lengths[b];
    return a;
  }
};

template <class R>
struct WordEval {
  R value{0.0};
  R deriv{1.0};
  R second{0.0};
};

// Apply the branches named by `word` in order, with chain-rule derivatives.
// order: 0 value only, 1 first derivative, 2 both derivatives.
template <class R>
WordEval<R> eval_word(const Giem<R>& f, const std::vector<Letter>& word, R x, int order = 0,
                      double drift_tol = 1e-10) {
  WordEval<R> e;
  e.value = x;
  for (Letter l : word) {
    const Branch<R>& b = f.branches[l];
    double u = to_double(e.value), a = to_double(b.dom_a), len = to_double(b.dom_len);
    if (u < a - drift_tol || u > a + len + drift_tol)
      throw ItineraryError("itinerary drift: point escaped expected branch domain");
    if (order >= 2) {
      R h1 = e.deriv, h2 = e.second;
      R g1 = b.deriv(e.value), g2 = b.second(e.value);
      e.second = g2 * h1 * h1 + g1 * h2;
    }
    if (order >= 1) e.deriv *= b.deriv(e.value);
    e.value = b.value(e.value);
  }
  return e;
}

template <class R>
InductionState<R> initial_state(const Giem<R>& f) {
  InductionState<R> s;
  s.pair = f.pair;
  s.lengths = f.lengths;
  s.img_lengths = f.img_lengths;
  for (Letter l = 0; l < f.d(); ++l) {
    s.words.push_back({l});
    s.times.push_back(1);
  }
  return s;
}

struct RvType {
  int eps = 0;
  Letter winner = 0;
  Letter loser = 0;
};

template <class R>
RvType rv_type(const InductionState<R>& s, double connection_tol = 1e-13) {
  Letter a0 = s.pair.last(0), a1 = s.pair.last(1);
  double l0 = to_double(s.lengths[a0]);
  double m1 = to_double(s.img_lengths[a1]);
  if (std::abs(l0 - m1) <= connection_tol) throw ConnectionError(s.level);
  if (l0 > m1) return {0, a0, a1};
  return {1, a1, a0};
}

namespace detail {
// Solve (word composition)(t) = target on [lo,hi], monotone; bisection to
// the last representable midpoint.
template <class R>
R invert_word(const Giem<R>& f, const std::vector<Letter>& word, R lo, R hi, R target) {
  for (int it = 0; it < 400; ++it) {
    R mid = (lo + hi) / R(2.0);
    if (!(mid > lo) || !(mid < hi)) break;
    R v = eval_word(f, word, mid, 0).value;
    if (to_double(v) < to_double(target)) lo = mid;
    else hi = mid;
  }
  return (lo + hi) / R(2.0);
}

template <class R>
void refresh_image_lengths(InductionState<R>& s, const Giem<R>& f) {
  int d = s.pair.d();
  s.img_lengths.assign(d, R(0.0));
  for (Letter l = 0; l < d; ++l) {
    R a = s.fund_start(l);
    R b = a + s.lengths[l];
    R va = eval_word(f, s.words[l], a, 0).value;
    R vb = eval_word(f, s.words[l], b, 0).value;
    s.img_lengths[l] = vb - va;
    if (to_double(s.img_lengths[l]) <= 0.0)
      throw std::runtime_error("induction: nonpositive image length");
  }
}
}  // namespace detail

template <class R>
InductionState<R> rv_step(const InductionState<R>& s, const Giem<R>& f,
                          double connection_tol = 1e-13) {
  RvType t = rv_type(s, connection_tol);
  Letter a0 = s.pair.last(0), a1 = s.pair.last(1);
  InductionState<R> n = s;
  n.level = s.level + 1;

  if (t.eps == 0) {
    // Loser a1 keeps its interval, word extends; winner a0's interval loses
    // the image of the loser.
    n.lengths[a0] = s.lengths[a0] - s.img_lengths[a1];
    n.words[a1] = s.words[a1];
    n.words[a1].insert(n.words[a1].end(), s.words[a0].begin(), s.words[a0].end());
    n.times[a1] = s.times[a1] + s.times[a0];
  } else {
    // Loser a0 moves inside a1's interval: cut a1 at the preimage of the
    // loser's left endpoint.
    R u = s.fund_start(a1);
    R v = u + s.lengths[a1];
    R target = s.fund_start(a0);
    R cut = detail::invert_word(f, s.words[a1], u, v, target);
    n.lengths[a0] = v - cut;
    n.lengths[a1] = cut - u;
    n.words[a0] = s.words[a1];
    n.words[a0].insert(n.words[a0].end(), s.words[a0].begin(), s.words[a0].end());
    n.times[a0] = s.times[a1] + s.times[a0];
  }
  if (to_double(n.lengths[a0]) <= 0.0 || to_double(n.lengths[a1]) <= 0.0)
    throw ConnectionError(s.level);

  n.pair = rauzy_move(s.pair, t.eps);
  n.domain_len = R(0.0);
  for (R l : n.lengths) n.domain_len += l;
  detail::refresh_image_lengths(n, f);
  return n;
}

template <class R>
struct RenormResult {
  std::vector<InductionState<R>> levels;  // 0..n reached
  RauzyPath path;
  std::optional<int> connection_level;  // set when stopped early
  std::optional<int> drift_level;       // stopped early on itinerary round-off

  int depth() const { return static_cast<int>(levels.size()) - 1; }
};

template <class R>
RenormResult<R> renormalize(const Giem<R>& f, int n, double connection_tol = 1e-13) {
  RenormResult<R> r;
  r.levels.push_back(initial_state(f));
  r.path = RauzyPath::start_at(f.pair);
  for (int i = 0; i < n; ++i) {
    try {
      InductionState<R> next = rv_step(r.levels.back(), f, connection_tol);
      RvType t = rv_type(r.levels.back(), connection_tol);
      r.path.push(t.eps);
      r.levels.push_back(std::move(next));
    } catch (const ConnectionError& e) {
      r.connection_level = e.level;
      break;
    } catch (const ItineraryError&) {
      // Round-off has eaten the working interval (typically at a cylinder
      // boundary); report the truncated result rather than failing.
      r.drift_level = i;
      break;
    }
  }
  return r;
}

template <class R>
WordEval<R> eval_return_map(const InductionState<R>& s, const Giem<R>& f, Letter alpha, R x,
                            int order = 0) {
  R a = s.fund_start(alpha);
  R b = a + s.lengths[alpha];
  double xa = to_double(x);
  if (xa < to_double(a) - 1e-12 || xa > to_double(b) + 1e-12)
    throw std::domain_error("eval_return_map: point outside fundamental interval");
  return eval_word(f, s.words[alpha], x, order);
}

struct FirstReturn {
  double value = 0.0;
  long long steps = 0;
};

// Oracle: iterate f until the orbit re-enters J = [0, sub_len).
template <class R>
FirstReturn brute_force_first_return(const Giem<R>& f, double sub_len, double x,
                                     long long cap = 1000000) {
  if (!(x >= 0.0 && x < sub_len)) throw std::domain_error("brute force: x outside J");
  R y = f.apply(R(x));
  long long steps = 1;
  while (to_double(y) >= sub_len) {
    if (steps >= cap) throw std::runtime_error("brute force: no return observed within cap");
    y = f.apply(y);
    ++steps;
  }
  return {to_double(y), steps};
}

// ---------------------------------------------------------------------------
// Dynamical partition xi_n = { f^i(I^n_alpha) } with the preserved / new
// split against xi_{n-1}.
// ---------------------------------------------------------------------------
struct PartitionElement {
  double a = 0.0;
  double len = 0.0;
  Letter letter = 0;
  long long iterate = 0;
  bool preserved = true;
};

struct DynamicalPartition {
  std::vector<PartitionElement> elements;
  double total_length = 0.0;
  double max_overlap = 0.0;       // worst interior overlap between sorted neighbors
  double refinement_defect = 0.0; // worst protrusion outside the coarser element
};

template <class R>
DynamicalPartition dynamical_partition(const RenormResult<R>& r, const Giem<R>& f, int n,
                                       long long element_cap = 2000000) {
  if (n < 0 || n > r.depth()) throw std::out_of_range("dynamical_partition: bad level");
  const InductionState<R>& s = r.levels[n];
  int d = s.pair.d();

  BigInt count(0);
  for (const auto& q : s.times) count += q;
  if (count > element_cap) throw std::runtime_error("dynamical_partition: too many elements");

  // pr/tn classification from the step n-1 data.
  int eps = -1;
  Letter step_a0 = -1, step_a1 = -1;
  BigInt old_q0(0), old_q1(0);
  if (n >= 1) {
    const RauzyStep& st = r.path.steps[n - 1];
    eps = st.eps;
    step_a0 = st.before.last(0);
    step_a1 = st.before.last(1);
    old_q0 = r.levels[n - 1].times[step_a0];
    old_q1 = r.levels[n - 1].times[step_a1];
  }

  DynamicalPartition part;
  for (Letter l = 0; l < d; ++l) {
    R p = s.fund_start(l);
    R q = p + s.lengths[l];
    long long steps = s.times[l].template convert_to<long long>();
    for (long long i = 0; i < steps; ++i) {
      PartitionElement e;
      e.a = to_double(p);
      e.len = to_double(q) - to_double(p);
      e.letter = l;
      e.iterate = i;
      if (n >= 1) {
        if (eps == 0) {
          e.preserved = !(l == step_a0 || (l == step_a1 && BigInt(i) >= old_q1));
        } else {
          e.preserved = !(l == step_a1 || (l == step_a0 && BigInt(i) < old_q1));
        }
      }
      part.elements.push_back(e);
      if (i + 1 < steps) {
        Letter w = s.words[l][static_cast<size_t>(i)];
        p = f.branches[w].value(p);
        q = f.branches[w].value(q);
      }
    }
  }

  std::vector<const PartitionElement*> sorted;
  for (const auto& e : part.elements) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](const PartitionElement* x, const PartitionElement* y) { return x->a < y->a; });
  for (size_t i = 0; i < sorted.size(); ++i) {
    part.total_length += sorted[i]->len;
    if (i + 1 < sorted.size()) {
      double overlap = (sorted[i]->a + sorted[i]->len) - sorted[i + 1]->a;
      part.max_overlap = std::max(part.max_overlap, overlap);
    }
  }

  if (n >= 1) {
    DynamicalPartition coarse = dynamical_partition(r, f, n - 1, element_cap);
    std::vector<std::pair<double, double>> spans;  // (a, end)
    for (const auto& e : coarse.elements) spans.emplace_back(e.a, e.a + e.len);
    std::sort(spans.begin(), spans.end());
    for (const auto& e : part.elements) {
      auto it = std::upper_bound(spans.begin(), spans.end(),
                                 std::make_pair(e.a + 1e-12, 0.0));
      if (it != spans.begin()) --it;
      double defect = std::max(it->first - e.a, (e.a + e.len) - it->second);
      part.refinement_defect = std::max(part.refinement_defect, std::max(0.0, defect));
    }
  }
  return part;
}

// Exact identity target: q-vector as Theta products applied to (1,...,1).
inline std::vector<BigInt> ones_vector(int d) { return std::vector<BigInt>(d, BigInt(1)); }

}  // namespace rauzy

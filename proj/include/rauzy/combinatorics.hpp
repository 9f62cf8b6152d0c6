// Combinatorial data of generalized interval exchange maps: the pair
// (pi0, pi1), Rauzy moves, class graphs, and bounded-combinatorics checks.
//
// Ranks are 1-based at every interface; letters are 0-based indices into
// the alphabet.
#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rauzy/bigmat.hpp"

namespace rauzy {

using Letter = int;

struct Alphabet {
  std::vector<std::string> symbols;

  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> s) : symbols(std::move(s)) {
    if (symbols.size() < 2) throw std::invalid_argument("alphabet needs d >= 2");
    for (size_t i = 0; i < symbols.size(); ++i)
      for (size_t j = i + 1; j < symbols.size(); ++j)
        if (symbols[i] == symbols[j])
          throw std::invalid_argument("alphabet symbols must be distinct");
  }
  static Alphabet latin(int d) {
    std::vector<std::string> s;
    for (int i = 0; i < d; ++i) s.push_back(std::string(1, static_cast<char>('A' + i)));
    return Alphabet(std::move(s));
  }
  int size() const { return static_cast<int>(symbols.size()); }
  bool operator==(const Alphabet& o) const { return symbols == o.symbols; }
};

struct CombinatorialPair {
  Alphabet alphabet;
  std::vector<int> pi0;  // letter -> rank, 1..d
  std::vector<int> pi1;

  int d() const { return alphabet.size(); }

  Letter letter_at(int eps, int rank) const {  // pi_eps^{-1}(rank)
    const auto& pi = eps == 0 ? pi0 : pi1;
    for (Letter l = 0; l < d(); ++l)
      if (pi[l] == rank) return l;
    throw std::out_of_range("rank not attained");
  }
  // alpha(eps): last symbol of pi_eps.
  Letter last(int eps) const { return letter_at(eps, d()); }

  // Monodromy invariant p = pi1 o pi0^{-1}, as the tuple (p(1),...,p(d)).
  std::vector<int> monodromy() const {
    std::vector<int> p(d());
    for (int rank = 1; rank <= d(); ++rank) p[rank - 1] = pi1[letter_at(0, rank)];
    return p;
  }

  bool operator==(const CombinatorialPair& o) const {
    return alphabet == o.alphabet && pi0 == o.pi0 && pi1 == o.pi1;
  }
  bool operator<(const CombinatorialPair& o) const {
    if (pi0 != o.pi0) return pi0 < o.pi0;
    return pi1 < o.pi1;
  }
};

// Convenience: pair with pi0 = identity order and pi1 given by a monodromy
// tuple p, i.e. pi1(letter at domain position i) = p[i].
inline CombinatorialPair pair_from_monodromy(const std::vector<int>& p) {
  CombinatorialPair pr;
  pr.alphabet = Alphabet::latin(static_cast<int>(p.size()));
  pr.pi0.resize(p.size());
  pr.pi1.resize(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    pr.pi0[i] = static_cast<int>(i) + 1;
    pr.pi1[i] = p[i];
  }
  return pr;
}

struct PairValidity {
  bool bijective = false;
  bool irreducible = false;
  int reducible_at = 0;  // the j witnessing reducibility, if any
  std::string reason;
  bool ok() const { return bijective && irreducible; }
};

inline PairValidity validate_pair(const CombinatorialPair& p) {
  PairValidity v;
  int d = p.d();
  if (static_cast<int>(p.pi0.size()) != d || static_cast<int>(p.pi1.size()) != d) {
    v.reason = "rank maps not defined on the whole alphabet";
    return v;
  }
  for (const auto* pi : {&p.pi0, &p.pi1}) {
    std::vector<bool> seen(d, false);
    for (int r : *pi) {
      if (r < 1 || r > d || seen[r - 1]) {
        v.reason = "rank map is not a bijection onto 1..d";
        return v;
      }
      seen[r - 1] = true;
    }
  }
  v.bijective = true;
  for (int j = 1; j < d; ++j) {
    std::vector<bool> s0(d, false), s1(d, false);
    for (Letter l = 0; l < d; ++l) {
      if (p.pi0[l] <= j) s0[l] = true;
      if (p.pi1[l] <= j) s1[l] = true;
    }
    if (s0 == s1) {
      v.reducible_at = j;
      v.reason = "reducible at j=" + std::to_string(j);
      return v;
    }
  }
  v.irreducible = true;
  return v;
}

// Antisymmetric sign matrix linking lengths to translations: omega = Omega*lambda.
inline BigMat omega_matrix(const CombinatorialPair& p) {
  if (!validate_pair(p).ok()) throw std::invalid_argument("omega_matrix: invalid pair");
  int d = p.d();
  BigMat m(d);
  for (Letter a = 0; a < d; ++a)
    for (Letter b = 0; b < d; ++b) {
      if (p.pi1[a] > p.pi1[b] && p.pi0[a] < p.pi0[b]) m(a, b) = 1;
      else if (p.pi1[a] < p.pi1[b] && p.pi0[a] > p.pi0[b]) m(a, b) = -1;
    }
  return m;
}

inline int genus(const CombinatorialPair& p) { return rank(omega_matrix(p)) / 2; }

// The move r_eps: keeps pi_eps, reshuffles the other rank map around the
// winner's slot.
inline CombinatorialPair rauzy_move(const CombinatorialPair& p, int eps) {
  if (!validate_pair(p).ok()) throw std::invalid_argument("rauzy_move: invalid pair");
  int d = p.d();
  Letter win = p.last(eps);
  CombinatorialPair q = p;
  auto& other = eps == 0 ? q.pi1 : q.pi0;
  const auto& old = eps == 0 ? p.pi1 : p.pi0;
  int wr = old[win];
  for (Letter l = 0; l < d; ++l) {
    if (old[l] <= wr) other[l] = old[l];
    else if (old[l] < d) other[l] = old[l] + 1;
    else other[l] = wr + 1;
  }
  return q;
}

struct RauzyStep {
  CombinatorialPair before;
  int eps = 0;
  Letter winner = 0;
  Letter loser = 0;
};

struct RauzyPath {
  std::vector<CombinatorialPair> vertices;  // length steps+1
  std::vector<RauzyStep> steps;

  static RauzyPath start_at(const CombinatorialPair& p) {
    RauzyPath path;
    path.vertices.push_back(p);
    return path;
  }
  const CombinatorialPair& current() const { return vertices.back(); }
  int length() const { return static_cast<int>(steps.size()); }

  void push(int eps) {
    const CombinatorialPair& p = current();
    RauzyStep s;
    s.before = p;
    s.eps = eps;
    s.winner = p.last(eps);
    s.loser = p.last(1 - eps);
    steps.push_back(s);
    vertices.push_back(rauzy_move(p, eps));
  }
};

struct RauzyClassEdge {
  int from = 0;
  int eps = 0;
  int to = 0;
  Letter winner = 0;
  Letter loser = 0;
};

struct RauzyClass {
  std::vector<CombinatorialPair> vertices;
  std::vector<RauzyClassEdge> edges;  // 2 per vertex, in vertex order

  int index_of(const CombinatorialPair& p) const {
    for (size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == p) return static_cast<int>(i);
    return -1;
  }
};

inline RauzyClass rauzy_class(const CombinatorialPair& start, size_t cap = 10000) {
  if (!validate_pair(start).ok()) throw std::invalid_argument("rauzy_class: invalid pair");
  RauzyClass rc;
  std::map<CombinatorialPair, int> index;
  std::deque<int> todo;
  rc.vertices.push_back(start);
  index[start] = 0;
  todo.push_back(0);
  while (!todo.empty()) {
    int i = todo.front();
    todo.pop_front();
    for (int eps : {0, 1}) {
      CombinatorialPair from = rc.vertices[i];
      CombinatorialPair to = rauzy_move(from, eps);
      auto it = index.find(to);
      int j;
      if (it == index.end()) {
        if (rc.vertices.size() >= cap)
          throw std::runtime_error("rauzy_class: vertex cap exceeded");
        j = static_cast<int>(rc.vertices.size());
        rc.vertices.push_back(to);
        index[to] = j;
        todo.push_back(j);
      } else {
        j = it->second;
      }
      rc.edges.push_back({i, eps, j, from.last(eps), from.last(1 - eps)});
    }
  }
  return rc;
}

// BFS path of eps moves taking `from` to `to`; nullopt if in different classes.
inline std::optional<std::vector<int>> find_path(const CombinatorialPair& from,
                                                 const CombinatorialPair& to,
                                                 size_t cap = 10000) {
  RauzyClass rc = rauzy_class(from, cap);
  int target = rc.index_of(to);
  if (target < 0) return std::nullopt;
  std::vector<int> prev_vertex(rc.vertices.size(), -1);
  std::vector<int> prev_eps(rc.vertices.size(), -1);
  std::vector<bool> seen(rc.vertices.size(), false);
  std::deque<int> todo{0};
  seen[0] = true;
  while (!todo.empty()) {
    int i = todo.front();
    todo.pop_front();
    if (i == target) break;
    for (const auto& e : rc.edges) {
      if (e.from != i || seen[e.to]) continue;
      seen[e.to] = true;
      prev_vertex[e.to] = i;
      prev_eps[e.to] = e.eps;
      todo.push_back(e.to);
    }
  }
  if (!seen[target]) return std::nullopt;
  std::vector<int> moves;
  for (int v = target; v != 0 && prev_vertex[v] >= 0; v = prev_vertex[v])
    moves.push_back(prev_eps[v]);
  if (target != 0 && moves.empty()) return std::nullopt;
  std::reverse(moves.begin(), moves.end());
  return moves;
}

// ---------------------------------------------------------------------------
// k-bounded combinatorics on a finite prefix (Definition: every letter wins
// near every n and loses after a winner-to-loser chain of length < k).
// ---------------------------------------------------------------------------
enum class BoundedVerdict { yes, no, undetermined };

struct BoundedCheckResult {
  BoundedVerdict verdict = BoundedVerdict::undetermined;
  int witness_n = -1;  // first (n, beta, gamma) with no admissible (n1, p)
  Letter witness_beta = -1;
  Letter witness_gamma = -1;
};

inline BoundedCheckResult k_bounded_check(const RauzyPath& path, int k) {
  BoundedCheckResult res;
  int len = path.length();
  int d = path.vertices.front().d();
  if (len < 2 * k + d) return res;  // undetermined on such a short prefix

  auto winner = [&](int j) { return path.steps[j].winner; };
  auto loser = [&](int j) { return path.steps[j].loser; };

  // n is checkable when every candidate window [n1, n1+p] fits in the prefix.
  int n_lo = std::max(0, k - 1);
  int n_hi = len - 2 * k;  // n1 <= n+k-1, n1+p <= n1 + (n-n1) + k - 1 <= n+2k-2 < len
  for (int n = n_lo; n <= n_hi; ++n) {
    for (Letter beta = 0; beta < d; ++beta) {
      for (Letter gamma = 0; gamma < d; ++gamma) {
        bool found = false;
        for (int n1 = std::max(0, n - k + 1); n1 <= n + k - 1 && !found; ++n1) {
          if (n1 >= len || winner(n1) != beta) continue;
          for (int p = 0; n1 + p < len; ++p) {
            if (std::abs(n - n1 - p) >= k) {
              if (n1 + p > n) break;
              continue;
            }
            if (loser(n1 + p) != gamma) continue;
            bool chain = true;
            for (int i = 0; i < p; ++i) {
              if (loser(n1 + i) != winner(n1 + i + 1)) { chain = false; break; }
            }
            if (chain) { found = true; break; }
          }
        }
        if (!found) {
          res.verdict = BoundedVerdict::no;
          res.witness_n = n;
          res.witness_beta = beta;
          res.witness_gamma = gamma;
          return res;
        }
      }
    }
  }
  res.verdict = BoundedVerdict::yes;
  return res;
}

}  // namespace rauzy

#include "doctest.h"

#include "rauzy/combinatorics.hpp"
#include "rauzy/experiments.hpp"

using namespace rauzy;

TEST_CASE("monodromy round-trips through the pair representation") {
  CombinatorialPair p = pair_from_monodromy({2, 1});
  CHECK(p.d() == 2);
  CHECK(p.pi0 == std::vector<int>{1, 2});
  CHECK(p.pi1 == std::vector<int>{2, 1});
  CHECK(p.monodromy() == std::vector<int>{2, 1});

  CombinatorialPair q = pair_from_monodromy({3, 2, 1});
  CHECK(q.monodromy() == std::vector<int>{3, 2, 1});
  CHECK(q.last(0) == 2);  // C
  CHECK(q.last(1) == 0);  // A
}

TEST_CASE("pair validation rejects non-bijections and reducible pairs") {
  CombinatorialPair ok = pair_from_monodromy({2, 1});
  CHECK(validate_pair(ok).ok());

  CombinatorialPair ident = pair_from_monodromy({1, 2});
  PairValidity v = validate_pair(ident);
  CHECK(v.bijective);
  CHECK(!v.irreducible);
  CHECK(v.reducible_at == 1);

  CombinatorialPair bad = ok;
  bad.pi1 = {1, 1};
  CHECK(!validate_pair(bad).bijective);

  // (1,3,2): the first interval is fixed as a block.
  CombinatorialPair red = pair_from_monodromy({1, 3, 2});
  CHECK(!validate_pair(red).ok());
}

TEST_CASE("omega matrix entries and genus") {
  BigMat om2 = omega_matrix(pair_d2());
  CHECK(om2(0, 0) == 0);
  CHECK(om2(0, 1) == 1);
  CHECK(om2(1, 0) == -1);
  CHECK(om2(1, 1) == 0);
  CHECK(genus(pair_d2()) == 1);

  BigMat om3 = omega_matrix(pair_d3());
  // pi1 reverses pi0, so every upper-triangle entry is +1.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i < j) CHECK(om3(i, j) == 1);
      if (i > j) CHECK(om3(i, j) == -1);
      if (i == j) CHECK(om3(i, j) == 0);
    }
  CHECK(genus(pair_d3()) == 1);
  CHECK(genus(pair_from_monodromy({4, 3, 2, 1})) == 2);
}

TEST_CASE("rauzy moves stay inside the class and preserve genus") {
  for (auto start : {pair_d2(), pair_d3(), pair_from_monodromy({4, 3, 2, 1})}) {
    int g = genus(start);
    RauzyClass rc = rauzy_class(start);
    CHECK(rc.edges.size() == 2 * rc.vertices.size());
    for (const auto& p : rc.vertices) {
      CHECK(validate_pair(p).ok());
      CHECK(genus(p) == g);
      for (int eps : {0, 1}) CHECK(rc.index_of(rauzy_move(p, eps)) >= 0);
    }
  }
  CHECK(rauzy_class(pair_d2()).vertices.size() == 1);
  CHECK(rauzy_class(pair_d3()).vertices.size() == 3);
}

TEST_CASE("d=2 moves keep the unique pair; winner and loser are recorded") {
  CombinatorialPair p = pair_d2();
  CHECK(rauzy_move(p, 0) == p);
  CHECK(rauzy_move(p, 1) == p);
  RauzyPath path = RauzyPath::start_at(p);
  path.push(0);
  CHECK(path.steps[0].winner == 1);  // B = last of pi0
  CHECK(path.steps[0].loser == 0);
  path.push(1);
  CHECK(path.steps[1].winner == 0);
  CHECK(path.steps[1].loser == 1);
}

TEST_CASE("find_path replays to the requested vertex") {
  CombinatorialPair from = pair_d3();
  CombinatorialPair to = rauzy_move(rauzy_move(from, 1), 0);
  auto moves = find_path(from, to);
  REQUIRE(moves.has_value());
  CombinatorialPair cur = from;
  for (int eps : *moves) cur = rauzy_move(cur, eps);
  CHECK(cur == to);

  // Same-class query with target == start gives the empty path.
  auto trivial = find_path(from, from);
  REQUIRE(trivial.has_value());
  CHECK(trivial->empty());
}

TEST_CASE("bounded-combinatorics verdicts") {
  CHECK(k_bounded_check(alternating_path(pair_d2(), 40), 2).verdict == BoundedVerdict::yes);
  BoundedCheckResult no = k_bounded_check(constant_path(pair_d2(), 40, 0), 2);
  CHECK(no.verdict == BoundedVerdict::no);
  CHECK(no.witness_n >= 0);
  CHECK(k_bounded_check(alternating_path(pair_d2(), 3), 2).verdict ==
        BoundedVerdict::undetermined);
}

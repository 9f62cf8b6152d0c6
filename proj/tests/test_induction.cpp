#include "doctest.h"

#include <cmath>
#include <random>

#include "rauzy/experiments.hpp"
#include "rauzy/induction.hpp"

using namespace rauzy;

namespace {
constexpr double kPhi = 1.6180339887498949;
}

TEST_CASE("step types along the golden path") {
  auto f = golden_standard();
  auto s0 = initial_state(f);
  RvType t0 = rv_type(s0);
  CHECK(t0.eps == 0);
  CHECK(t0.winner == 1);  // B
  CHECK(t0.loser == 0);

  auto s1 = rv_step(s0, f);
  CHECK(to_double(s1.lengths[0]) == doctest::Approx(2.0 - kPhi).epsilon(1e-13));
  CHECK(to_double(s1.lengths[1]) == doctest::Approx(2.0 * kPhi - 3.0).epsilon(1e-12));
  RvType t1 = rv_type(s1);
  CHECK(t1.eps == 1);
  CHECK(t1.winner == 0);  // A

  auto half = make_standard_iem(pair_d2(), std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(rv_type(initial_state(half)), ConnectionError);
}

TEST_CASE("golden return times run through Fibonacci pairs") {
  auto f = golden_standard();
  auto r = renormalize(f, 10);
  REQUIRE(r.depth() == 10);
  std::vector<std::pair<long long, long long>> expect{
      {1, 1}, {2, 1}, {2, 3}, {5, 3}, {5, 8}, {13, 8}};
  for (size_t n = 0; n < expect.size(); ++n) {
    CHECK(r.levels[n].times[0] == expect[n].first);
    CHECK(r.levels[n].times[1] == expect[n].second);
  }
  for (int i = 0; i < 10; ++i) CHECK(r.path.steps[i].eps == i % 2);
}

TEST_CASE("state bookkeeping invariants") {
  auto f = golden_standard();
  auto r = renormalize(f, 12);
  for (int n = 0; n <= r.depth(); ++n) {
    const auto& s = r.levels[n];
    double sum = 0.0;
    for (double l : s.lengths) sum += l;
    CHECK(sum == doctest::Approx(to_double(s.domain_len)).epsilon(1e-13));
    for (Letter l = 0; l < s.pair.d(); ++l)
      CHECK(BigInt(static_cast<long long>(s.words[l].size())) == s.times[l]);
    if (n > 0) CHECK(to_double(s.domain_len) < to_double(r.levels[n - 1].domain_len));
  }
}

TEST_CASE("trivial first return on the whole interval") {
  auto f = golden_standard();
  for (double x : {0.05, 0.3, 0.9}) {
    FirstReturn fr = brute_force_first_return(f, 1.0, x);
    CHECK(fr.steps == 1);
    CHECK(fr.value == doctest::Approx(to_double(f.apply(x))).epsilon(1e-14));
  }
}

TEST_CASE("golden level-3 return time at the midpoint of the first interval") {
  auto f = golden_standard();
  auto r = renormalize(f, 3);
  const auto& s = r.levels[3];
  CHECK(s.times[0] == 5);
  double x = to_double(s.fund_start(0)) + 0.5 * to_double(s.lengths[0]);
  FirstReturn fr = brute_force_first_return(f, to_double(s.domain_len), x);
  CHECK(fr.steps == 5);
  double via_word = to_double(eval_return_map(s, f, 0, x).value);
  CHECK(fr.value == doctest::Approx(via_word).epsilon(1e-12));
}

TEST_CASE("golden level-3 partition has eight elements tiling the interval") {
  auto f = golden_standard();
  auto r = renormalize(f, 3);
  DynamicalPartition part = dynamical_partition(r, f, 3);
  CHECK(part.elements.size() == 8);  // q_A + q_B = 5 + 3
  CHECK(part.total_length == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(part.max_overlap < 1e-12);
  CHECK(part.refinement_defect < 1e-12);
  int preserved = 0;
  for (const auto& e : part.elements) preserved += e.preserved ? 1 : 0;
  CHECK(preserved > 0);
  CHECK(preserved < 8);
}

TEST_CASE("word evaluation derivatives follow the chain rule") {
  auto f = make_giem(pair_d2(), std::vector<double>{0.45, 0.55},
                     {BranchSpec::moebius(1.2), BranchSpec::power_kink(0.3, 0.6, 0.4)});
  auto r = renormalize(f, 4);
  const auto& s = r.levels[4];
  for (Letter l = 0; l < 2; ++l) {
    double a = to_double(s.fund_start(l));
    double x = a + 0.37 * to_double(s.lengths[l]);
    double h = 1e-7 * to_double(s.lengths[l]);
    auto e = eval_word(f, s.words[l], x, 2);
    double fd = (to_double(eval_word(f, s.words[l], x + h, 0).value) -
                 to_double(eval_word(f, s.words[l], x - h, 0).value)) /
                (2.0 * h);
    CHECK(to_double(e.deriv) == doctest::Approx(fd).epsilon(1e-4));
    double fd2 = (to_double(eval_word(f, s.words[l], x + h, 1).deriv) -
                  to_double(eval_word(f, s.words[l], x - h, 1).deriv)) /
                 (2.0 * h);
    CHECK(to_double(e.second) == doctest::Approx(fd2).epsilon(1e-3));
  }
}

TEST_CASE("return-map words agree with the brute-force oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    auto f = random_genus_one_giem(rng);
    auto r = renormalize(f, 6);
    const auto& s = r.levels[r.depth()];
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int pt = 0; pt < 20; ++pt) {
      double x = unif(rng) * to_double(s.domain_len);
      Letter l = -1;
      for (Letter c = 0; c < s.pair.d(); ++c) {
        double a = to_double(s.fund_start(c));
        if (x >= a && x < a + to_double(s.lengths[c])) l = c;
      }
      REQUIRE(l >= 0);
      FirstReturn fr = brute_force_first_return(f, to_double(s.domain_len), x);
      CHECK(BigInt(fr.steps) == s.times[l]);
      CHECK(std::abs(fr.value - to_double(eval_return_map(s, f, l, x).value)) < 1e-9);
    }
  }
}

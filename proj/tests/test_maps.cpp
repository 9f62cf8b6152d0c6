#include "doctest.h"

#include <cmath>

#include "rauzy/experiments.hpp"
#include "rauzy/maps.hpp"

using namespace rauzy;

namespace {
constexpr double kPhi = 1.6180339887498949;
}

TEST_CASE("translation vector agrees with Omega * lambda") {
  SUBCASE("d=2 golden lengths") {
    std::vector<double> lam{2.0 - kPhi, kPhi - 1.0};
    auto w = translation_vector(pair_d2(), lam);
    CHECK(w[0] == doctest::Approx(kPhi - 1.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(-(2.0 - kPhi)).epsilon(1e-14));
  }
  SUBCASE("d=3 reversing pair") {
    std::vector<double> lam{0.2, 0.3, 0.5};
    auto w = translation_vector(pair_d3(), lam);
    CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(-0.5).epsilon(1e-14));
  }
  SUBCASE("matches the matrix product") {
    std::vector<double> lam{0.15, 0.25, 0.6};
    auto w = translation_vector(pair_d3(), lam);
    BigMat om = omega_matrix(pair_d3());
    for (int i = 0; i < 3; ++i) {
      double mi = 0.0;
      for (int j = 0; j < 3; ++j) mi += to_double(om(i, j)) * lam[j];
      CHECK(std::abs(w[i] - mi) < 1e-14);
    }
  }
}

TEST_CASE("standard exchanges move points by their translations") {
  auto f = golden_standard();
  CHECK(f.apply(0.0) == doctest::Approx(kPhi - 1.0).epsilon(1e-14));

  auto g = make_standard_iem(pair_d3(), std::vector<double>{0.2, 0.3, 0.5});
  CHECK(g.apply(0.0) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(g.apply(0.2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.apply(0.5) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("affine exchanges require a tiling image") {
  double l = 0.4, sA = 0.1;
  double sB = std::log((1.0 - std::exp(sA) * l) / (1.0 - l));
  auto f = make_affine_iem(pair_d2(), std::vector<double>{l, 1.0 - l},
                           std::vector<double>{sA, sB});
  CHECK(to_double(f.img_lengths[0] + f.img_lengths[1]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.branches[0].deriv(0.1) == doctest::Approx(std::exp(sA)).epsilon(1e-13));

  CHECK_THROWS_AS(make_affine_iem(pair_d2(), std::vector<double>{l, 1.0 - l},
                                  std::vector<double>{0.5, 0.5}),
                  MapError);
}

TEST_CASE("branch derivatives match finite differences") {
  std::vector<BranchSpec> specs{BranchSpec::affine(), BranchSpec::moebius(1.4),
                                BranchSpec::power_kink(0.3, 0.6, 0.8)};
  for (const auto& s : specs) {
    UnitMap<double> u = UnitMap<double>::make(s);
    for (double x : {0.1, 0.45, 0.72, 0.9}) {
      double h = 1e-6;
      double fd = (u.value(x + h) - u.value(x - h)) / (2.0 * h);
      CHECK(u.deriv(x) == doctest::Approx(fd).epsilon(1e-5));
      double fd2 = (u.deriv(x + h) - u.deriv(x - h)) / (2.0 * h);
      CHECK(u.second(x) == doctest::Approx(fd2).epsilon(1e-4));
      CHECK(u.log_deriv(x) == doctest::Approx(std::log(u.deriv(x))).epsilon(1e-12));
    }
    CHECK(u.value(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(u.value(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mean nonlinearity of a single curved branch has a closed form") {
  double m = 1.3;
  auto f = make_giem(pair_d2(), std::vector<double>{0.4, 0.6},
                     {BranchSpec::moebius(m), BranchSpec::affine()});
  CHECK(mean_nonlinearity(f) == doctest::Approx(-2.0 * std::log(m)).epsilon(1e-12));

  auto z = make_giem(pair_d2(), std::vector<double>{0.4, 0.6},
                     {BranchSpec::moebius(m), BranchSpec::moebius(1.0 / m)});
  CHECK(std::abs(mean_nonlinearity(z)) < 1e-12);

  CHECK(std::abs(mean_nonlinearity(golden_standard())) < 1e-14);
}

TEST_CASE("break amplitudes: affine slope jumps and flat kinks") {
  double l = 0.4, sA = 0.1;
  double sB = std::log((1.0 - std::exp(sA) * l) / (1.0 - l));
  auto f = make_affine_iem(pair_d2(), std::vector<double>{l, 1.0 - l},
                           std::vector<double>{sA, sB});
  BreakData interior = break_amplitude(f, l);
  CHECK(interior.amplitude == doctest::Approx(sA - sB).epsilon(1e-12));
  BreakData origin = break_amplitude(f, 0.0);  // read on the circle
  CHECK(origin.amplitude == doctest::Approx(sB - sA).epsilon(1e-12));

  auto g = make_giem(pair_d2(), std::vector<double>{0.5, 0.5},
                     {BranchSpec::affine(), BranchSpec::power_kink(0.5, 0.6, 0.0)});
  CHECK(std::abs(break_amplitude(g, 0.5).amplitude) < 1e-12);

  CHECK_THROWS_AS(break_amplitude(f, 0.123), MapError);
}

TEST_CASE("endpoint-orbit collision check") {
  KeaneReport golden = keane_check(golden_standard(), 10000);
  CHECK(golden.no_connection_up_to_depth);

  // Rational rotation: collision between partition-endpoint orbits.
  auto rat = make_standard_iem(pair_d2(), std::vector<double>{2.0 / 3.0, 1.0 / 3.0});
  KeaneReport r = keane_check(rat, 100);
  CHECK(!r.no_connection_up_to_depth);
  CHECK(r.m == 2);  // orbit of 0 reaches the interior endpoint 2/3 in two steps
}

#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "rauzy/analysis.hpp"
#include "rauzy/experiments.hpp"

using namespace rauzy;

namespace {
Giem<double> sample_affine() {
  double l = 0.4, sA = 0.1;
  double sB = std::log((1.0 - std::exp(sA) * l) / (1.0 - l));
  return make_affine_iem(pair_d2(), std::vector<double>{l, 1.0 - l},
                         std::vector<double>{sA, sB});
}
}  // namespace

TEST_CASE("zooming a standard exchange yields the identity") {
  auto f = golden_standard();
  auto r = renormalize(f, 4);
  for (Letter l = 0; l < 2; ++l) {
    ZoomedMap z = zoom(r.levels[2], f, l, 257);
    for (int i = 0; i < z.grid_n; i += 16) {
      CHECK(z.values[i] == doctest::Approx(z.node(i)).epsilon(1e-10));
      CHECK(z.derivs[i] == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("zooming a single branch recovers its unit map") {
  double m = 1.7;
  auto f = make_giem(pair_d2(), std::vector<double>{0.4, 0.6},
                     {BranchSpec::moebius(m), BranchSpec::affine()});
  ZoomedMap z = zoom_branch(f.branches[0], 257);
  ZoomedMap F = moebius_F(m, 257);
  for (int i = 0; i < z.grid_n; i += 8) {
    CHECK(z.values[i] == doctest::Approx(F.values[i]).epsilon(1e-12));
    CHECK(z.derivs[i] == doctest::Approx(F.derivs[i]).epsilon(1e-12));
  }
}

TEST_CASE("the fractional-linear comparison family") {
  ZoomedMap F = moebius_F(2.0, 257);
  CHECK(F.value_fn(0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(F.deriv_fn(0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(F.deriv_fn(1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(F.second_fn(0.0) == doctest::Approx(-4.0).epsilon(1e-14));
}

TEST_CASE("comparison coefficients of flat and curved branches") {
  auto f = golden_standard();
  auto r = renormalize(f, 6);
  for (Letter l = 0; l < 2; ++l)
    CHECK(m_n_coefficient(r.levels[5], f, l) == doctest::Approx(1.0).epsilon(1e-12));

  auto aff = sample_affine();
  auto ra = renormalize(aff, 4);
  for (Letter l = 0; l < 2; ++l)
    CHECK(m_n_coefficient(ra.levels[4], aff, l) == doctest::Approx(1.0).epsilon(1e-10));

  double m = 1.35;
  auto g = make_giem(pair_d2(), std::vector<double>{0.4, 0.6},
                     {BranchSpec::moebius(m), BranchSpec::affine()});
  auto s0 = initial_state(g);
  CHECK(m_n_coefficient(s0, g, 0) == doctest::Approx(m).epsilon(1e-12));
}

TEST_CASE("mean log-derivative vectors propagate through the cocycle") {
  auto f = golden_standard();
  auto rs = renormalize(f, 6);
  for (int n = 0; n <= 6; n += 3) {
    LVector lv = L_vector(rs.levels[n], f);
    CHECK(lv.values.norm() < 1e-9);
  }

  auto aff = sample_affine();
  auto r = renormalize(aff, 8);
  REQUIRE(r.depth() == 8);
  CocyclePath cp = CocyclePath::from(r.path);
  Eigen::VectorXd om0(2);
  om0 << std::log(to_double(aff.img_lengths[0]) / to_double(aff.lengths[0])),
      std::log(to_double(aff.img_lengths[1]) / to_double(aff.lengths[1]));
  for (int n = 1; n <= 8; n += 2) {
    Eigen::VectorXd expect = om0;
    for (int i = 0; i < n; ++i) expect = apply_theta(cp.thetas[i], expect);
    LVector lv = L_vector(r.levels[n], aff);
    CHECK((lv.values - expect).norm() < 1e-9);
  }
}

TEST_CASE("propagation residuals vanish for affine exchanges") {
  ResidualSeries rs = residual_series(sample_affine(), 6);
  CHECK(rs.max_norm < 1e-9);
}

TEST_CASE("decomposition against an explicit basis") {
  Eigen::VectorXd L(2), e1(2), e2(2);
  L << 3.0, -2.0;
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  LDecomposition dec = decompose_L(L, {e1}, {}, {e2});
  CHECK(dec.stable(0) == doctest::Approx(3.0));
  CHECK(dec.unstable(1) == doctest::Approx(-2.0));
  CHECK(dec.residual < 1e-12);

  CHECK_THROWS(decompose_L(L, {e1}, {}, {e1}));
}

TEST_CASE("slope vectors in dimension two are trivial and accepted") {
  auto f = golden_moebius(1.2, 16);
  auto r = renormalize(f, 12);
  SlopeVector sv = slope_vector(r, f, 8);
  CHECK(sv.accepted);
  CHECK(sv.omega.norm() == 0.0);
}

TEST_CASE("the affine model reconstructs affine inputs") {
  // The pulled-back length vector converges at the cocycle contraction rate,
  // so reconstruction error shrinks like the square of the level count.
  auto aff = sample_affine();
  auto r = renormalize(aff, 34);
  REQUIRE(r.depth() == 34);
  Eigen::VectorXd om0(2);
  om0 << std::log(to_double(aff.img_lengths[0]) / to_double(aff.lengths[0])),
      std::log(to_double(aff.img_lengths[1]) / to_double(aff.lengths[1]));
  AffineModel am = affine_model(r, om0, 34);
  CHECK(am.matched_steps == 34);
  CHECK(std::abs(am.tiling_shift) < 1e-7);
  for (int l = 0; l < 2; ++l) {
    CHECK(am.lengths[l] == doctest::Approx(to_double(aff.lengths[l])).epsilon(1e-7));
    CHECK(am.log_slopes[l] == doctest::Approx(om0(l)).epsilon(1e-6));
  }
}

TEST_CASE("the affine model with zero slopes is the standard exchange") {
  auto f = golden_standard();
  auto r = renormalize(f, 20);
  AffineModel am = affine_model(r, Eigen::VectorXd::Zero(2), 20);
  CHECK(am.matched_steps == 20);
  CHECK(am.lengths[0] == doctest::Approx(to_double(f.lengths[0])).epsilon(1e-6));
  CHECK(std::abs(am.tiling_shift) < 1e-12);
}

TEST_CASE("norm distances on the comparison family") {
  ZoomedMap id = moebius_F(1.0, 1025);
  CHECK(c1_distance(id, moebius_F(1.0, 1025)) == doctest::Approx(0.0));
  CHECK(c1_distance(id, moebius_F(1.0 + 1e-6, 1025)) < 1e-5);
  CHECK(c1_distance(id, moebius_F(1.0 + 1e-6, 1025)) > 0.0);
  // integral of |D2 F_2| = 3/2 in closed form
  CHECK(l1_second_derivative_distance(id, moebius_F(2.0, 1025)) ==
        doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("smoothing sequences and their quadratic bounds") {
  std::vector<double> r{1.0};
  SmoothingSequences s = l2_smoothing_sequences(r, 0.5, 12);
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.x[1] == doctest::Approx(0.0));
  CHECK(s.z[0] == doctest::Approx(1.0));
  CHECK(s.z[1] == doctest::Approx(0.5));
  CHECK(s.z[2] == doctest::Approx(0.25));
  CHECK(s.sum_z2 == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(s.x_bound_ok);
  CHECK(s.z_bound_ok);
  CHECK(s.y_le_x);

  CHECK_THROWS(l2_smoothing_sequences(r, 1.5, 4));
  CHECK_THROWS(l2_smoothing_sequences(std::vector<double>{-1.0}, 0.5, 4));
}

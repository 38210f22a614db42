#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sq/inequalities.hpp"

using namespace sq;

namespace {

bool within(const McEstimate& e, double truth) { return std::abs(e.value - truth) <= 3.0 * e.std_error; }

}  // namespace

TEST_CASE("f examples") {
  CHECK(std::exp(log_gamma_ratio_f(2)) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::exp(log_gamma_ratio_f(4)) == doctest::Approx(1.0 / 56.0).epsilon(1e-13));
  const auto rows = stirling_table(60);
  REQUIRE(rows.size() == 59);
  CHECK(rows[0].n == 2);
  CHECK(rows[0].f_times_4n == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(rows[2].f_times_4n == doctest::Approx(32.0 / 7.0).epsilon(1e-13));
  CHECK(rows[1].f == doctest::Approx(oracle::f(3)).epsilon(1e-13));
  CHECK(rows[1].f_times_4n > 1.0);
  CHECK_FALSE(rows[0].ratio_to_prev.has_value());
  CHECK_THROWS_AS(log_gamma_ratio_f(1), InvalidArgument);
}

TEST_CASE("f against direct gamma evaluation and the unsimplified form") {
  const auto rows = stirling_table(60);
  for (const auto& r : rows) {
    CAPTURE(r.n);
    if (r.n <= 80) CHECK(std::abs(r.f / oracle::f(r.n) - 1.0) <= 1e-11);
    CHECK(std::abs(r.f_omega / r.f - 1.0) <= 1e-11);
    CHECK(r.f_times_4n > 1.0);
    CHECK(r.corrected_times_4n > 1.0);
    CHECK(r.corrected_times_4n == doctest::Approx(r.f_times_4n * (r.n - 1.0) / (r.n + 1.0)).epsilon(1e-12));
  }
  // Strictly decreasing along n, n + 2.
  for (std::size_t i = 2; i < rows.size(); ++i) {
    CAPTURE(rows[i].n);
    CHECK(rows[i].f_times_4n < rows[i - 2].f_times_4n);
    REQUIRE(rows[i].ratio_to_prev.has_value());
    CHECK(*rows[i].ratio_to_prev < 0.25);
  }
  // The product settles near 2√2, not 1.
  CHECK(std::abs(rows.back().f_times_4n - 2.0 * std::numbers::sqrt2) < 0.1);
}

TEST_CASE("ratio of successive f") {
  const auto rows = ratio_check(20);
  REQUIRE(rows.size() >= 3);
  CHECK(rows[0].n == 2);
  CHECK(rows[0].computed == doctest::Approx(1.0 / 28.0).epsilon(1e-12));
  CHECK(rows[0].displayed == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  CHECK(rows[0].derived == doctest::Approx(1.0 / 28.0).epsilon(1e-12));
  CHECK(rows[2].computed == doctest::Approx(21.0 / 396.0).epsilon(1e-12));
  for (const auto& r : rows) {
    CAPTURE(r.n);
    CHECK(r.computed < 0.25);
    CHECK(r.computed == doctest::Approx(oracle::f(r.n + 2) / oracle::f(r.n)).epsilon(1e-12));
    CHECK(r.displayed / r.computed == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.derived == doctest::Approx(r.computed).epsilon(1e-12));
  }
}

TEST_CASE("beta integral") {
  CHECK(beta_integral_check(1).closed_form == doctest::Approx(0.5));
  CHECK(beta_integral_check(2).quadrature == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  CHECK(beta_integral_check(5).quadrature == doctest::Approx(24.0 * 120.0 / 3628800.0).epsilon(1e-12));
  for (int n = 1; n <= 15; ++n) {
    CAPTURE(n);
    const auto b = beta_integral_check(n);
    CHECK(b.relative_error <= 1e-10);
    CHECK(std::abs(b.quadrature / oracle::beta(n) - 1.0) <= 1e-10);
  }
  CHECK(adaptive_simpson([](double t) { return std::sin(t); }, 0.0, std::numbers::pi, 1e-13) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("slice identity constant") {
  const auto ball = slice_identity_check(2, unit_ball(4), 200000, RngStream(1, 0));
  CHECK(ball.lhs.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ball.constant_moment / ball.constant_displayed == doctest::Approx(1.0 / 3.0));
  CHECK(within(ball.rhs_moment, 1.0));
  CHECK(within(ball.rhs_displayed, 3.0));
  CHECK(ball.match == "moment");

  const auto c = slice_identity_check(2, cube(4), 200000, RngStream(1, 1));
  CHECK(std::abs(c.z_moment) <= 3.0);
  CHECK(c.match == "moment");

  Vector d(6);
  d << 1.0, 2.0, 0.5, 1.5, 3.0, 1.0;
  const auto e = slice_identity_check(3, ellipsoid_body(Ellipsoid::unit_ball(6).image(d.asDiagonal())), 200000,
                                      RngStream(1, 2));
  CHECK(std::abs(e.z_moment) <= 3.0);
  CHECK(e.match == "moment");
}

TEST_CASE("suspension integral") {
  const auto seg = suspension_bound_check(cube(1), 1.0, 100000, RngStream(2, 0));
  CHECK(seg.formula == doctest::Approx(2.0));
  CHECK(within(seg.cone_axis, 2.0));

  const auto disk = suspension_bound_check(unit_ball(2), 2.0, 200000, RngStream(2, 1));
  CHECK(disk.formula == doctest::Approx(4.0 * std::numbers::pi / 6.0));
  CHECK(within(disk.cone_axis, 4.0 * std::numbers::pi / 6.0));
  CHECK(disk.cone_matches);
  CHECK(disk.norm_exceeds);
  CHECK(disk.cylinder_exceeds);
  // On the cylinder ∫|x0| dx = Vol(disk) * s^2 = 4π exactly.
  CHECK(within(disk.cylinder_axis, 4.0 * std::numbers::pi));

  const Body cone = double_cone(cube(2), 1.5);
  CHECK(cone.dim() == 3);
  CHECK(cone.gauge(Vector{{0.0, 0.0, 1.5}}) == doctest::Approx(1.0));
  CHECK(cone.gauge(Vector{{1.0, 1.0, 0.0}}) == doctest::Approx(1.0));
  CHECK(cone.gauge(Vector{{0.5, 0.0, 0.75}}) == doctest::Approx(1.0));
  const Body cyl = cylinder(cube(2), 1.5);
  CHECK(cyl.gauge(Vector{{0.5, 0.0, 0.75}}) == doctest::Approx(0.5));
}

TEST_CASE("santalo products") {
  const auto rows = santalo_sweep(
      {{"cube2", cube(2)}, {"cube4", cube(4)}, {"ellipsoid3", ellipsoid_body(Ellipsoid::ball(3, 2.0))},
       {"l3_4", lp_ball(4, 3.0)}},
      200000, RngStream(3, 0));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].mahler == doctest::Approx(8.0));
  CHECK(rows[0].normalized == doctest::Approx(8.0 / (std::numbers::pi * std::numbers::pi)));
  CHECK(rows[0].exact);
  const double omega4 = oracle::omega(4);
  CHECK(rows[1].normalized == doctest::Approx((32.0 / 3.0) / (omega4 * omega4)));
  REQUIRE(rows[1].reverse_bound.has_value());
  CHECK(*rows[1].reverse_bound == doctest::Approx(1.0 / 16.0));
  CHECK(rows[1].reverse_ok);
  CHECK(std::abs(rows[2].normalized - 1.0) <= 3.0 * rows[2].std_error + 1e-12);
  const double l3 = oracle::lp_ball_volume(4, 3.0) * oracle::lp_ball_volume(4, 1.5) / (omega4 * omega4);
  CHECK(std::abs(rows[3].normalized - l3) <= 3.0 * rows[3].std_error + 1e-12);
  for (const auto& r : rows) CHECK(r.santalo_ok);

  for (const auto& r : santalo_sweep(default_santalo_bodies(RngStream(4, 0)), 100000, RngStream(4, 1))) {
    CAPTURE(r.body);
    CHECK(r.santalo_ok);
    CHECK(r.reverse_ok);
  }
}

TEST_CASE("csv output") {
  const auto csv = stirling_csv(stirling_table(4));
  CHECK(csv.rfind("n,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  const auto beta = beta_csv({beta_integral_check(2)});
  CHECK(beta.find("0.083333333333333") != std::string::npos);
}

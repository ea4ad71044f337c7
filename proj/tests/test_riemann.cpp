#include <catch_amalgamated.hpp>

#include <cmath>

#include "mvsol/riemann.hpp"

using namespace mvsol;
using Catch::Approx;

TEST_CASE("equal states give an empty fan", "[riemann]") {
  const auto ip = fluxes::inverse_power(1.0);
  const auto fan = solve_standard_riemann(0.7, 0.7, ip);
  CHECK(fan.waves.empty());
  CHECK(eval_fan(fan, -0.3) == 0.7);
  CHECK(eval_fan(fan, 0.9) == 0.7);
}

TEST_CASE("concave increasing flux, u_l < u_r: single shock", "[riemann]") {
  const auto ip = fluxes::inverse_power(1.0);
  const auto fan = solve_standard_riemann(0.0, 1.0, ip);
  REQUIRE(fan.waves.size() == 1);
  const auto* s = std::get_if<Shock>(&fan.waves[0]);
  REQUIRE(s != nullptr);
  const double expected_speed = (ip.eval(1.0) - ip.eval(0.0)) / 1.0;
  CHECK(s->speed == Approx(expected_speed).margin(1e-12));
  CHECK(eval_fan(fan, s->speed - 0.01) == Approx(0.0));
  CHECK(eval_fan(fan, s->speed + 0.01) == Approx(1.0));
  CHECK(eval_fan(fan, s->speed) == Approx(1.0));  // right-state convention
}

TEST_CASE("concave flux, u_l > u_r: pure rarefaction", "[riemann]") {
  const auto ip = fluxes::inverse_power(1.0);
  const auto fan = solve_standard_riemann(3.0, 0.0, ip);
  REQUIRE(fan.waves.size() == 1);
  const auto* r = std::get_if<Rarefaction>(&fan.waves[0]);
  REQUIRE(r != nullptr);
  CHECK(r->left_state == Approx(3.0));
  CHECK(r->right_state == Approx(0.0));
  // states follow the inverse of phi': u(xi) = xi^{-1/2} - 1 for p = 1
  for (double xi : {0.1, 0.25, 0.5, 0.9}) {
    const double expected = 1.0 / std::sqrt(xi) - 1.0;
    CHECK(eval_fan(fan, xi) == Approx(expected).margin(2e-4));
  }
  CHECK(eval_fan(fan, r->speed_lo - 1e-3) == Approx(3.0));
  CHECK(eval_fan(fan, r->speed_hi + 1e-3) == Approx(0.0));
}

TEST_CASE("Rankine-Hugoniot and admissibility on a non-convex fan", "[riemann]") {
  const auto bp = fluxes::bump();
  // u_l = 0 < u_r = 3 crosses the inflection: shock + rarefaction mix
  const auto fan = solve_standard_riemann(0.0, 3.0, bp);
  REQUIRE(!fan.waves.empty());
  double prev_hi = -kInfinity;
  for (const auto& w : fan.waves) {
    CHECK(wave_speed_lo(w) >= prev_hi - 1e-10);
    prev_hi = wave_speed_hi(w);
    CHECK(std::abs(wave_speed_lo(w)) <= bp.lipschitz_bound() * (1.0 + 1e-6));
    if (const auto* s = std::get_if<Shock>(&w)) {
      const double rh = (bp.eval(s->left_state) - bp.eval(s->right_state)) /
                        (s->left_state - s->right_state);
      CHECK(std::abs(s->speed - rh) <= 1e-10 * (1.0 + std::abs(s->left_state) +
                                                std::abs(s->right_state)));
      // Oleinik: chord of the convex-hull branch stays below the flux graph
      const double lo = std::min(s->left_state, s->right_state);
      const double hi = std::max(s->left_state, s->right_state);
      for (int q = 1; q < 20; ++q) {
        const double u = lo + (hi - lo) * q / 20.0;
        const double chord = bp.eval(s->left_state) + s->speed * (u - s->left_state);
        CHECK(bp.eval(u) >= chord - 1e-6);
      }
    }
  }
}

TEST_CASE("modified Riemann problem for the increasing flux", "[riemann]") {
  const auto ip = fluxes::inverse_power(1.0);
  const auto sol = solve_modified_riemann(0.0, 0.0, 1.0, ip);
  CHECK(sol.atom_decay_rate == Approx(1.0).margin(1e-12));
  CHECK(sol.tau == Approx(1.0).margin(1e-12));
  CHECK(sol.extinction_time == Approx(1.0).margin(1e-12));
  CHECK(sol.h_minus == Approx(0.0).margin(1e-14));
  CHECK(sol.h_plus == Approx(1.0).margin(1e-14));
  CHECK(sol.left_fan.waves.empty());
  CHECK(sol.right_fan.left_truncated);
  CHECK(sol.atom_mass_at(0.25) == Approx(0.75));
  CHECK(sol.atom_mass_at(2.0) == 0.0);
  // no waves enter x < 0
  for (const auto& w : sol.right_fan.waves) CHECK(wave_speed_lo(w) >= -1e-8);

  // the emitted profile matches the closed form: u = (t/x)^{1/2} - 1 at p = 1
  const double val = sol.eval_regular(0.125, 0.25);  // xi = 0.5
  CHECK(val == Approx(std::sqrt(2.0) - 1.0).margin(2e-4));
  CHECK(sol.eval_regular(-0.1, 0.25) == Approx(0.0).margin(1e-14));
  CHECK_THROWS_AS(sol.eval_regular(0.1, 1.5), std::domain_error);
}

TEST_CASE("modified Riemann problem for the bump flux", "[riemann]") {
  const auto bp = fluxes::bump();
  const auto sol = solve_modified_riemann(0.0, 0.0, 1.0, bp);
  CHECK(sol.atom_decay_rate == Approx(0.5).margin(1e-10));
  CHECK(sol.tau == Approx(2.0).margin(1e-9));
  // trace fixed point: the right fan's interface state is s_+(0) = 1
  REQUIRE(sol.s_plus_result.attained);
  CHECK(sol.s_plus_result.s_value == Approx(1.0).margin(1e-6));
  const auto fp = bp.s_plus(sol.s_plus_result.s_value);
  CHECK(fp.s_value == Approx(sol.s_plus_result.s_value).margin(1e-9));
  CHECK_FALSE(sol.right_fan.left_truncated);
  CHECK(sol.right_fan.far_left == Approx(1.0).margin(1e-6));
}

TEST_CASE("equilibrium configuration has an empty modified solution", "[riemann]") {
  const auto pl = fluxes::plateau(1.0, 1.0);
  const auto sol = solve_modified_riemann(1.0, 1.0, 1.0, pl);
  CHECK(sol.atom_decay_rate == 0.0);
  CHECK(std::isinf(sol.tau));
  CHECK(std::isinf(sol.extinction_time));
  CHECK(sol.left_fan.waves.empty());
  CHECK(sol.right_fan.waves.empty());
  CHECK(sol.atom_mass_at(1e6) == 1.0);
}

TEST_CASE("modified Riemann rejects non-positive atom mass", "[riemann]") {
  const auto ip = fluxes::inverse_power(1.0);
  CHECK_THROWS_AS(solve_modified_riemann(0.0, 0.0, 0.0, ip), std::invalid_argument);
  CHECK_THROWS_AS(solve_modified_riemann(0.0, 0.0, -1.0, ip), std::invalid_argument);
}

TEST_CASE("oscillating tail has no closed-form fan", "[riemann]") {
  const auto os = fluxes::oscillating();
  CHECK_THROWS_AS(solve_modified_riemann(0.0, 0.0, 1.0, os), validation_error);
}

TEST_CASE("eval_fan piecewise conventions", "[riemann]") {
  WaveFan fan;
  fan.far_left = 2.0;
  fan.far_right = 0.5;
  Shock s;
  s.left_state = 2.0;
  s.right_state = 0.5;
  s.speed = 0.3;
  fan.waves.emplace_back(s);
  CHECK(fan.eval(0.29) == 2.0);
  CHECK(fan.eval(0.3) == 0.5);
  CHECK(fan.eval(0.31) == 0.5);
}

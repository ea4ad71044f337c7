#include <catch_amalgamated.hpp>

#include <cmath>

#include "mvsol/oracle.hpp"
#include "oracles.hpp"

using namespace mvsol;
using Catch::Approx;

TEST_CASE("closed-form example values", "[oracle]") {
  // p = 1, x = 0.25, t = 0.5: u_r = sqrt(p t / x) - 1 = sqrt(2) - 1
  const auto [u, m] = exact_example(1.0, 0.25, 0.5);
  CHECK(u == Approx(std::sqrt(2.0) - 1.0).margin(1e-12));
  CHECK(m == Approx(0.5));

  for (double p : {0.5, 1.0, 2.0}) {
    CHECK(exact_example(p, -0.3, 0.4).first == 0.0);  // nothing in x < 0
    CHECK(exact_example(p, 0.1, 1.0).second == 0.0);  // mass gone at t = 1
  }
  const auto at0 = exact_example(1.0, 0.5, 0.0);
  CHECK(at0.first == 0.0);
  CHECK(at0.second == 1.0);
}

TEST_CASE("free boundary table: start, monotonicity, bounds", "[oracle]") {
  const double p = 1.0;
  const auto xi = solve_xi(p, 2.0, 1e-4);
  REQUIRE(!xi.t.empty());
  CHECK(xi.t.front() == 1.0);
  CHECK(xi.xi.front() == 0.0);
  for (std::size_t k = 0; k + 1 < xi.t.size(); ++k) CHECK(xi.xi[k] <= xi.xi[k + 1] + 1e-15);
  for (std::size_t k = 0; k < xi.t.size(); ++k) CHECK(xi.xi[k] < p * xi.t[k]);
  CHECK(solve_xi(p, 0.5).t.empty());  // T <= 1: empty table
}

TEST_CASE("free boundary self-convergence under step halving", "[oracle]") {
  const double p = 1.0;
  const auto coarse = solve_xi(p, 2.0, 1e-4);
  const auto fine = solve_xi(p, 2.0, 5e-5);
  CHECK(std::abs(coarse.eval(2.0) - fine.eval(2.0)) <= 1e-8);
  // for p = 1 the boundary is (sqrt(t) - 1)^2 in closed form
  CHECK(coarse.eval(2.0) == Approx((std::sqrt(2.0) - 1.0) * (std::sqrt(2.0) - 1.0)).margin(1e-9));
  const auto p2 = solve_xi(2.0, 2.0, 1e-4);
  const auto p2_fine = solve_xi(2.0, 2.0, 5e-5);
  CHECK(std::abs(p2.eval(2.0) - p2_fine.eval(2.0)) <= 1e-8);
}

TEST_CASE("example solution conserves mass analytically", "[oracle]") {
  // integral of u_r over (0, pt] plus the atom mass stays 1 on [0, 0.9]
  const double p = 1.0;
  for (double t : {0.1, 0.35, 0.6, 0.9}) {
    const ExampleSolution sol(p, 1.0);
    const double a = p * t;
    // log-spaced quadrature toward the integrable singularity at 0
    const double eps = 1e-12 * a;
    const int n = 20000;
    double acc = 0.0;
    double prev_x = eps;
    double prev_f = sol.regular(prev_x, t);
    for (int k = 1; k <= n; ++k) {
      const double x = eps * std::pow(a / eps, double(k) / n);
      const double f = sol.regular(x, t);
      acc += 0.5 * (prev_f + f) * (x - prev_x);
      prev_x = x;
      prev_f = f;
    }
    // analytic tail below eps: integral of (a/x)^{1/2} - 1 ~ 2 sqrt(a eps)
    acc += 2.0 * std::sqrt(a * eps) - eps;
    CHECK(acc + sol.atom_mass(t) == Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("trace divergence toward the atom", "[oracle]") {
  const ExampleSolution sol(1.0, 1.0);
  CHECK(sol.regular(1e-7, 0.5) > 1e3);
  CHECK(sol.regular(1e-6, 0.5) > sol.regular(1e-4, 0.5));
  CHECK(sol.regular(-1e-6, 0.5) == 0.0);
  const ExampleSolution steep(0.5, 1.0);
  CHECK(steep.regular(1e-6, 0.5) > 1e3);
}

TEST_CASE("convergence study: constant data has zero error", "[oracle]") {
  StudyProblem prob{
      .x_lo = -1.0,
      .x_hi = 1.0,
      .flux = fluxes::bump(),
      .initial = {},
      .solver = {},
      .oracle_regular = [](double, double) { return 0.75; },
      .oracle_atom_mass = [](double) { return 0.0; },
      .window_lo = -0.8,
      .window_hi = 0.8,
  };
  prob.initial.constant_value = 0.75;
  prob.solver.t_end = 0.3;
  prob.solver.snapshot_times = {0.3};
  const auto rows = convergence_study(prob, {50, 100});
  for (const auto& r : rows) {
    CHECK(r.l1_error <= 1e-13);
    CHECK(r.atom_mass_error == 0.0);
  }
}

TEST_CASE("convergence study: equilibrium atom keeps exact mass", "[oracle]") {
  StudyProblem prob{
      .x_lo = -1.0,
      .x_hi = 1.0,
      .flux = fluxes::plateau(1.0, 1.0),
      .initial = {},
      .solver = {},
      .oracle_regular = [](double, double) { return 1.0; },
      .oracle_atom_mass = [](double) { return 1.0; },
      .window_lo = -0.8,
      .window_hi = 0.8,
  };
  prob.initial.constant_value = 1.0;
  prob.initial.atoms.emplace_back(0.0, 1.0);
  prob.solver.t_end = 1.0;
  prob.solver.snapshot_times = {1.0};
  const auto rows = convergence_study(prob, {50, 100, 200});
  for (const auto& r : rows) CHECK(r.atom_mass_error == 0.0);
}

TEST_CASE("convergence study: reference problem errors decrease", "[oracle]") {
  const double p = 1.0;
  StudyProblem prob{
      .x_lo = -1.0,
      .x_hi = 3.0,
      .flux = fluxes::inverse_power(p),
      .initial = {},
      .solver = {},
      .oracle_regular = [p](double x, double t) { return ExampleSolution(p, 1.0).regular(x, t); },
      .oracle_atom_mass = [](double t) { return std::max(1.0 - t, 0.0); },
      .window_lo = 0.05,
      .window_hi = 3.0,
  };
  prob.initial.atoms.emplace_back(0.0, 1.0);
  prob.solver.t_end = 0.5;
  prob.solver.snapshot_times = {0.5};
  const auto rows = convergence_study(prob, {100, 200, 400});
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].l1_error < rows[k - 1].l1_error);
}

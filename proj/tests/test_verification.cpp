#include <catch_amalgamated.hpp>

#include <cmath>

#include "mvsol/oracle.hpp"
#include "mvsol/verification.hpp"

using namespace mvsol;
using Catch::Approx;

namespace {

Trajectory run_case(const FluxModel& flux, const Grid& grid, const InitialSpec& spec, double T,
                    std::vector<double> snaps = {}) {
  auto init = from_config(spec, grid);
  SolverConfig cfg;
  cfg.t_end = T;
  cfg.history_stride = 1;
  cfg.snapshot_times = std::move(snaps);
  return run(init.state, flux, cfg);
}

Trajectory reference_atom_run(int n, double T, const FluxModel& flux) {
  InitialSpec spec;
  spec.atoms.emplace_back(0.0, 1.0);
  return run_case(flux, Grid(-1.0, 3.0, n), spec, T);
}

TestFunctionFamily family_for(const Trajectory& traj, int nx = 5, int nt = 5) {
  return TestFunctionFamily::lattice(traj.grid.x_lo, traj.grid.x_hi,
                                     traj.history_times.back(), nx, nt);
}

}  // namespace

TEST_CASE("weak form: constant and equilibrium solutions telescope", "[verification]") {
  const auto bp = fluxes::bump();
  InitialSpec constant;
  constant.constant_value = 0.8;
  const auto traj = run_case(bp, Grid(-1.0, 1.0, 100), constant, 0.4);
  const auto entry = check_weak_form(traj, family_for(traj), bp);
  CHECK(entry.pass);
  CHECK(entry.worst_residual <= 1e-4);

  const auto pl = fluxes::plateau(1.0, 1.0);
  InitialSpec eq;
  eq.constant_value = 1.0;
  eq.atoms.emplace_back(0.0, 1.0);
  const auto eq_traj = run_case(pl, Grid(-1.0, 1.0, 200), eq, 1.0);
  const auto eq_entry = check_weak_form(eq_traj, family_for(eq_traj), pl);
  CHECK(eq_entry.pass);
  // exact solution: only the second-order quadrature edge terms remain
  CHECK(eq_entry.worst_residual <= 2e-5);
  const auto eq_fine = run_case(pl, Grid(-1.0, 1.0, 400), eq, 1.0);
  const auto eq_fine_entry = check_weak_form(eq_fine, family_for(eq_fine), pl);
  CHECK(eq_fine_entry.worst_residual <= 0.35 * eq_entry.worst_residual);
}

TEST_CASE("weak form and entropy pass on the reference atom run", "[verification]") {
  const auto ip = fluxes::inverse_power(1.0);
  const auto traj = reference_atom_run(400, 0.5, ip);
  const auto fam = family_for(traj);
  const auto w = check_weak_form(traj, fam, ip);
  CHECK(w.pass);
  auto ks = default_k_grid(ip, 1e6);
  ks.push_back(1.0);  // the inequality is strict near the rarefaction here
  const auto entries = check_entropy(traj, fam, ks, ip);
  for (const auto& e : entries) {
    INFO(e.name << " worst " << e.worst_residual << " at " << e.location);
    CHECK(e.pass);
  }
}

TEST_CASE("weak-form residual scales linearly under refinement", "[verification]") {
  const auto ip = fluxes::inverse_power(1.0);
  std::vector<double> log_dx, log_res;
  for (int n : {200, 400, 800}) {
    const auto traj = reference_atom_run(n, 0.5, ip);
    detail::TrajectoryView view(traj, ip);
    const auto fam = family_for(traj);
    double worst = 0.0;
    for (const auto& z : fam.members)
      worst = std::max(worst, std::abs(weak_form_residual(view, z)) / z.c1_norm());
    log_dx.push_back(std::log(traj.grid.dx + view.dt_quad));
    log_res.push_back(std::log(worst));
  }
  // least-squares slope over the three grids
  const double n = 3.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    sx += log_dx[i];
    sy += log_res[i];
    sxx += log_dx[i] * log_dx[i];
    sxy += log_dx[i] * log_res[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  INFO("measured slope " << slope);
  CHECK(slope >= 0.7);
  CHECK(slope <= 1.3);
}

TEST_CASE("entropy at k = 0 coincides with the weak form", "[verification]") {
  const auto ip = fluxes::inverse_power(1.0);
  const auto traj = reference_atom_run(200, 0.4, ip);
  detail::TrajectoryView view(traj, ip);
  for (const auto& z : family_for(traj).members) {
    const double rw = weak_form_residual(view, z);
    const double e0 = entropy_residual(view, z, 0.0, 0);
    CHECK(std::abs(e0 - rw) <= 1e-12);
  }
}

TEST_CASE("entropy at k >= u_cap satisfies the sign-flip identity", "[verification]") {
  const auto ip = fluxes::inverse_power(1.0);
  const auto traj = reference_atom_run(200, 0.4, ip);
  detail::TrajectoryView view(traj, ip);
  const double k_big = 1e6;
  const double phi_k = ip.eval(k_big);
  const auto fam = family_for(traj);
  for (const auto& z : fam.members) {
    const double rw = weak_form_residual(view, z);
    const double ek = entropy_residual(view, z, k_big, 0);
    const double s_atom = detail::atom_terms(view, z);
    // trapezoid quadrature of the pure zeta_x integral
    double t_x = 0.0;
    const auto& times = traj.history_times;
    for (int i = 0; i < traj.grid.n_cells; ++i) {
      const double dax = z.alpha.deriv(traj.grid.cell_center(i));
      if (dax == 0.0) continue;
      double acc = 0.0;
      for (std::size_t s = 0; s + 1 < times.size(); ++s)
        acc += 0.5 * (z.beta(times[s]) + z.beta(times[s + 1])) * (times[s + 1] - times[s]);
      t_x += dax * acc * traj.grid.dx;
    }
    CHECK(std::abs(ek - (-rw + 2.0 * s_atom + phi_k * t_x)) <= 1e-12 * (1.0 + k_big));
  }
}

TEST_CASE("verification requires a dense history", "[verification]") {
  const auto ip = fluxes::inverse_power(1.0);
  InitialSpec spec;
  spec.atoms.emplace_back(0.0, 1.0);
  auto init = from_config(spec, Grid(-1.0, 3.0, 100));
  SolverConfig cfg;
  cfg.t_end = 0.3;  // history_stride stays 0
  const auto traj = run(init.state, ip, cfg);
  CHECK_THROWS_AS(check_weak_form(traj, TestFunctionFamily::lattice(-1, 3, 0.3, 3, 3), ip),
                  validation_error);

  cfg.history_stride = 6;  // rows exist but the stored spacing is too coarse
  const auto coarse = run(init.state, ip, cfg);
  CHECK_THROWS_AS(check_weak_form(coarse, TestFunctionFamily::lattice(-1, 3, 0.3, 3, 3), ip),
                  validation_error);
}

TEST_CASE("compatibility conditions on the reference run", "[verification]") {
  const auto ip = fluxes::inverse_power(1.0);
  const auto traj = reference_atom_run(400, 0.9, ip);
  const auto ks = default_k_grid(ip, 1e6);
  const auto res = check_compatibility(traj, 0, ks, 0.1, 0.72, ip);
  CHECK(res.sign_conditions.pass);
  // left side of this configuration is exactly zero for every k: u_r = 0 there
  CHECK(res.trace_fixed_point.worst_residual <= 1e-12);
  CHECK(res.left_flux_gap <= 1e-12);
  CHECK(res.right_flux_gap > 0.0);  // diverging trace: gap is finite and measures refinement

  const auto fine = reference_atom_run(800, 0.9, ip);
  const auto fres = check_compatibility(fine, 0, ks, 0.1, 0.72, ip);
  CHECK(fres.sign_conditions.threshold < res.sign_conditions.threshold);
  CHECK(fres.sign_conditions.worst_residual < res.sign_conditions.worst_residual);
  CHECK(fres.right_flux_gap < res.right_flux_gap);

  CHECK_THROWS_AS(check_compatibility(traj, 0, ks, 0.1, 2.0, ip), validation_error);
}

TEST_CASE("compatibility window must avoid extinction", "[verification]") {
  const auto ip = fluxes::inverse_power(1.0);
  const auto traj = reference_atom_run(200, 1.2, ip);  // atom dies at t = 1
  const auto ks = default_k_grid(ip, 1e6);
  CHECK_THROWS_AS(check_compatibility(traj, 0, ks, 0.1, 1.1, ip), validation_error);
}

TEST_CASE("contraction: identical runs and barrier-blocked perturbations", "[verification]") {
  const auto ip = fluxes::inverse_power(1.0);
  const Grid grid(-1.0, 3.0, 300);
  std::vector<double> snaps{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};

  InitialSpec base;
  base.atoms.emplace_back(0.0, 1.0);
  const auto tu = run_case(ip, grid, base, 0.4, snaps);

  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i) pairs.emplace_back(snaps[i], snaps[i + 1]);

  const auto self = check_contraction(tu, tu, -1.0, 0.0, pairs, ip);
  CHECK(self.pass);
  CHECK(self.worst_residual == 0.0);

  // perturbation to the right of the atom never crosses the barrier
  InitialSpec pert = base;
  pert.pw_breaks = {2.0, 2.5};
  pert.pw_values = {1.3};
  const auto tv = run_case(ip, grid, pert, 0.4, snaps);
  const auto blocked = check_contraction(tu, tv, -1.0, 0.0, pairs, ip);
  CHECK(blocked.worst_residual == 0.0);
  for (double t : snaps)
    CHECK(l1_distance_regular(tu.snapshot_at(t), tv.snapshot_at(t), -1.0, 0.0) == 0.0);

  // full right-interval windows are non-increasing as well
  const auto right = check_contraction(tu, tv, 0.0, 3.0, pairs, ip);
  CHECK(right.pass);

  InitialSpec other_atom;
  other_atom.atoms.emplace_back(0.5, 1.0);
  const auto tw = run_case(ip, grid, other_atom, 0.4, snaps);
  CHECK_THROWS_AS(check_contraction(tu, tw, -1.0, 0.0, pairs, ip), std::invalid_argument);
}

TEST_CASE("comparison: ordered data stays ordered", "[verification]") {
  const auto ip = fluxes::inverse_power(1.0);
  const Grid grid(-1.0, 3.0, 300);
  std::vector<double> snaps{0.1, 0.2, 0.3, 0.4};

  InitialSpec lo;
  lo.pw_breaks = {0.5, 1.5};
  lo.pw_values = {0.4};
  lo.atoms.emplace_back(0.0, 0.5);
  InitialSpec hi;
  hi.pw_breaks = {0.5, 1.5};
  hi.pw_values = {0.8};
  hi.atoms.emplace_back(0.0, 1.0);

  const auto tu = run_case(ip, grid, lo, 0.4, snaps);
  const auto tv = run_case(ip, grid, hi, 0.4, snaps);
  const auto cmp = check_comparison(tu, tv);
  INFO(cmp.location);
  CHECK(cmp.pass);

  const auto trivial = check_comparison(tu, tu);
  CHECK(trivial.pass);

  CHECK_THROWS_AS(check_comparison(tv, tu), std::invalid_argument);  // not ordered
}

TEST_CASE("checks are bit-deterministic", "[verification]") {
  const auto ip = fluxes::inverse_power(1.0);
  const auto traj = reference_atom_run(200, 0.4, ip);
  const auto fam = family_for(traj);
  const auto a = check_weak_form(traj, fam, ip);
  const auto b = check_weak_form(traj, fam, ip);
  CHECK(a.worst_residual == b.worst_residual);
  CHECK(a.threshold == b.threshold);
  CHECK(a.location == b.location);
}

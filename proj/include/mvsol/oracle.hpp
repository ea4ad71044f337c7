#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "mvsol/common.hpp"
#include "mvsol/evolution.hpp"
#include "mvsol/flux_model.hpp"
#include "mvsol/measure_state.hpp"

namespace mvsol {

/// Tabulated free boundary xi(t) of the closed-form reference solution,
/// starting from xi(1) = 0.
struct XiTable {
  double p = 1.0;
  std::vector<double> t;
  std::vector<double> xi;

  double eval(double time) const {
    if (t.empty() || time <= t.front()) return 0.0;
    if (time >= t.back()) return xi.back();
    auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (time - t[i - 1]) / (t[i] - t[i - 1]);
    return xi[i - 1] + w * (xi[i] - xi[i - 1]);
  }
};

namespace detail {

// The ODE for xi is degenerate at the start: the trivial branch xi == 0 also
// satisfies xi(1) = 0, and perturbations of the physical branch amplify like
// 1/(t-1). The substitution eta = xi^{p/(1+p)} removes both problems:
//   eta' = (1-q) (p t)^{-q} (1 - z^p) / (1 - z),  z = (xi / (p t))^q,
// with q = 1/(1+p), which is regular at eta = 0 and has no trivial branch.
inline double eta_ode_rhs(double p, double t, double eta) {
  const double q = 1.0 / (1.0 + p);
  const double pt_q = std::pow(p * t, q);
  if (eta <= 0.0) return (1.0 - q) / pt_q;
  const double z = std::pow(eta, q / (1.0 - q)) / pt_q;
  const double one_minus_z = 1.0 - z;
  double g;
  if (std::abs(one_minus_z) < 1e-6)
    g = p - 0.5 * p * (p - 1.0) * one_minus_z;
  else
    g = (1.0 - std::pow(z, p)) / one_minus_z;
  return (1.0 - q) / pt_q * g;
}

}  // namespace detail

/// Integrates the free-boundary ODE on [1, T] with classical RK4 applied to
/// the regularized variable eta = xi^{p/(1+p)} (see eta_ode_rhs), then maps
/// back. Self-convergence under step halving is the accuracy contract.
inline XiTable solve_xi(double p, double T, double dt_ode = 1e-4) {
  XiTable table;
  table.p = p;
  if (!(T > 1.0)) return table;
  if (!(p > 0.0)) throw validation_error("solve_xi: p must be > 0");
  if (!(dt_ode > 0.0)) throw validation_error("solve_xi: dt_ode must be > 0");

  const double power_back = (1.0 + p) / p;
  table.t.push_back(1.0);
  table.xi.push_back(0.0);
  double t = 1.0;
  double eta = 0.0;
  // z(eta) carries a fractional power at eta = 0 for p != 1; refine the first
  // stretch so the start does not dominate the global error
  const double fine_until = 1.0 + 10.0 * dt_ode;
  while (t < T - 1e-14) {
    const double h = std::min(t < fine_until ? dt_ode / 64.0 : dt_ode, T - t);
    const double k1 = detail::eta_ode_rhs(p, t, eta);
    const double k2 = detail::eta_ode_rhs(p, t + 0.5 * h, eta + 0.5 * h * k1);
    const double k3 = detail::eta_ode_rhs(p, t + 0.5 * h, eta + 0.5 * h * k2);
    const double k4 = detail::eta_ode_rhs(p, t + h, eta + h * k3);
    eta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    const double xi = std::pow(eta, power_back);
    table.t.push_back(t);
    table.xi.push_back(xi);
    if (!(xi < p * t))
      throw std::logic_error("solve_xi: free boundary overtook the rarefaction edge");
    if (table.xi.size() >= 2 && xi < table.xi[table.xi.size() - 2])
      throw std::logic_error("solve_xi: free boundary is not increasing");
  }
  return table;
}

/// Closed-form reference solution for the inverse-power flux with a unit atom
/// at the origin: regular part (p t / x)^{1/(1+p)} - 1 inside the fan region,
/// atom mass max(1 - t, 0).
struct ExampleSolution {
  double p = 1.0;
  double T = 1.0;
  std::optional<XiTable> xi;

  ExampleSolution(double p_, double T_, double dt_ode = 1e-4) : p(p_), T(T_) {
    if (!(p > 0.0)) throw validation_error("example solution: p must be > 0");
    if (T > 1.0) xi = solve_xi(p, T, dt_ode);
  }

  double atom_mass(double t) const { return std::max(1.0 - t, 0.0); }

  double regular(double x, double t) const {
    if (t <= 0.0) return 0.0;
    if (x <= 0.0 || x > p * t) return 0.0;
    if (t >= 1.0) {
      const double edge = xi ? xi->eval(t) : 0.0;
      if (x < edge) return 0.0;
    }
    return std::pow(p * t / x, 1.0 / (1.0 + p)) - 1.0;
  }
};

/// Convenience form: (regular value, atom mass at the origin). At t = 0 the
/// data is the Dirac measure itself: mass 1, zero regular part.
inline std::pair<double, double> exact_example(double p, double x, double t) {
  if (t == 0.0) return {0.0, 1.0};
  ExampleSolution sol(p, std::max(t, 1.0) + (t > 1.0 ? 1e-9 : 0.0));
  return {sol.regular(x, t), sol.atom_mass(t)};
}

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

struct StudyProblem {
  double x_lo = -1.0;
  double x_hi = 3.0;
  FluxModel flux;
  InitialSpec initial;
  SolverConfig solver;                           // t_end is the comparison time
  std::function<double(double, double)> oracle_regular;  // (x, t) -> u_r
  std::function<double(double)> oracle_atom_mass;        // total singular mass at t
  double window_lo = 0.0;
  double window_hi = 0.0;
};

struct ConvergenceRow {
  int n_cells = 0;
  double l1_error = 0.0;
  double atom_mass_error = 0.0;
  double observed_order = 0.0;  // vs the previous row; 0 for the first
};

/// Runs the problem on each grid and measures errors at t_end against the
/// oracle (windowed L1 for the regular part, absolute for the atom mass).
inline std::vector<ConvergenceRow> convergence_study(const StudyProblem& problem,
                                                     const std::vector<int>& grids) {
  std::vector<ConvergenceRow> rows;
  for (int n : grids) {
    const Grid grid(problem.x_lo, problem.x_hi, n);
    auto init = from_config(problem.initial, grid);
    Trajectory traj = run(init.state, problem.flux, problem.solver);
    const MeasureState& final_state = traj.snapshot_at(problem.solver.t_end);

    // 5-point Gauss-Legendre cell averages of the oracle
    static const double gx[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                                 0.538469310105683, 0.906179845938664};
    static const double gw[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                                 0.478628670499366, 0.236926885056189};
    double err = 0.0;
    for (int i = 0; i < grid.n_cells; ++i) {
      const double a = grid.x_lo + i * grid.dx;
      const double b = a + grid.dx;
      const double w = std::max(0.0, std::min(b, problem.window_hi) - std::max(a, problem.window_lo));
      if (w <= 0.0) continue;
      double avg = 0.0;
      for (int q = 0; q < 5; ++q)
        avg += gw[q] * problem.oracle_regular(0.5 * (a + b) + 0.5 * grid.dx * gx[q],
                                              problem.solver.t_end);
      avg *= 0.5;
      err += std::abs(final_state.regular[i] - avg) * w;
    }
    double atom_mass_num = 0.0;
    for (const auto& a : final_state.atoms) atom_mass_num += a.mass;
    const double atom_err =
        std::abs(atom_mass_num - problem.oracle_atom_mass(problem.solver.t_end));

    ConvergenceRow row;
    row.n_cells = n;
    row.l1_error = err;
    row.atom_mass_error = atom_err;
    if (!rows.empty() && row.l1_error > 0.0 && rows.back().l1_error > 0.0)
      row.observed_order = std::log2(rows.back().l1_error / row.l1_error);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mvsol

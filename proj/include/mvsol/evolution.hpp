#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mvsol/common.hpp"
#include "mvsol/flux_model.hpp"
#include "mvsol/measure_state.hpp"

namespace mvsol {

/// Atom-interface fluxes evaluated through the visible-point machinery (the
/// boundary-datum-at-infinity limit), the default mode.
struct ExactTail {};
/// Atom-interface fluxes against a large finite phantom state M; retained for
/// cross-validating the truncation bias of the exact mode.
struct FinitePhantom {
  double M = 1e7;
};
using PhantomMode = std::variant<ExactTail, FinitePhantom>;

struct SolverConfig {
  double cfl = 0.45;
  PhantomMode phantom_mode = ExactTail{};
  double u_cap = 1e6;
  std::vector<double> snapshot_times;
  double t_end = 1.0;
  int history_stride = 0;  // 0 = keep only snapshots; k > 0 = keep every k-th step

  void validate(const FluxModel& flux) const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw validation_error("solver: cfl must be in (0, 1]");
    if (!(u_cap > 0.0)) throw validation_error("solver: u_cap must be > 0");
    if (!(t_end >= 0.0)) throw validation_error("solver: t_end must be >= 0");
    if (history_stride < 0) throw validation_error("solver: history_stride must be >= 0");
    for (double t : snapshot_times)
      if (t < 0.0 || t > t_end)
        throw validation_error("solver: snapshot times must lie in [0, t_end]");
    if (const auto* p = std::get_if<FinitePhantom>(&phantom_mode)) {
      if (!(p->M > u_cap))
        throw validation_error("solver: phantom state M must exceed u_cap");
      if (flux.tail_is_oscillating())
        throw validation_error(
            "solver: finite-phantom fluxes need a monotone flux tail; "
            "the oscillating envelope only brackets them");
    }
  }
};

/// Per-atom time series: mass C_j, trace fluxes h_j^-, h_j^+, extinction.
struct AtomRecord {
  int interface_index = 0;
  double position = 0.0;
  double initial_mass = 0.0;
  std::vector<double> times;    // step end times while the atom is alive
  std::vector<double> mass;     // C_j at those times
  std::vector<double> h_minus;  // fluxes in force during the step ending at times[k]
  std::vector<double> h_plus;
  std::optional<double> extinction_time;
  bool oscillating_flagged = false;

  double mass_at(double t) const {
    if (extinction_time && t >= *extinction_time) return 0.0;
    if (times.empty() || t <= 0.0) return initial_mass;
    if (t <= times.front()) {
      const double w = t / times.front();
      return initial_mass + w * (mass.front() - initial_mass);
    }
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end()) return mass.back();
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i == 0) return mass.front();
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return mass[i - 1] + w * (mass[i] - mass[i - 1]);
  }
};

struct AtomLedger {
  std::vector<AtomRecord> atoms;

  static AtomLedger for_state(const MeasureState& s) {
    AtomLedger l;
    for (const auto& a : s.atoms) {
      AtomRecord r;
      r.interface_index = a.interface_index;
      r.position = a.position;
      r.initial_mass = a.mass;
      l.atoms.push_back(std::move(r));
    }
    return l;
  }
};

struct StepResult {
  double dt_taken = 0.0;
  double flux_left_boundary = 0.0;
  double flux_right_boundary = 0.0;
  std::vector<int> extinguished;  // atom indices that died this step
};

/// One-sided fluxes at a live atom interface: h_minus feeds the atom from the
/// left-adjacent cell, h_plus is what the atom emits into the right cell.
inline std::pair<double, double> atom_boundary_fluxes(const MeasureState& state, int atom_index,
                                                      const FluxModel& flux,
                                                      const SolverConfig& config) {
  const Atom& atom = state.atoms.at(static_cast<std::size_t>(atom_index));
  if (!atom.alive)
    throw std::invalid_argument("atom_boundary_fluxes: atom is extinct; use the ordinary flux");
  const int k = atom.interface_index;
  const int n = state.grid.n_cells;
  const double u_left = (k > 0) ? state.regular[k - 1] : state.regular[0];
  const double u_right = (k < n) ? state.regular[k] : state.regular[n - 1];
  if (const auto* p = std::get_if<FinitePhantom>(&config.phantom_mode)) {
    return {flux.godunov_flux(u_left, p->M), flux.godunov_flux(p->M, u_right)};
  }
  return {flux.s_minus(u_left).flux_at_s, flux.s_plus(u_right).flux_at_s};
}

/// CFL step from the global speed bound, shortened to land exactly on the
/// next snapshot, the end time, or a predicted atom extinction.
inline double cfl_dt(const MeasureState& state, const FluxModel& flux,
                     const SolverConfig& config) {
  double dt = config.cfl * state.grid.dx / flux.lipschitz_bound();
  const double t = state.time;
  for (double ts : config.snapshot_times)
    if (ts > t + 1e-14) dt = std::min(dt, ts - t);
  if (config.t_end > t) dt = std::min(dt, config.t_end - t);
  for (std::size_t j = 0; j < state.atoms.size(); ++j) {
    if (!state.atoms[j].alive) continue;
    const auto [hm, hp] = atom_boundary_fluxes(state, static_cast<int>(j), flux, config);
    const double rate = hp - hm;
    if (rate > 0.0) dt = std::min(dt, state.atoms[j].mass / rate);
  }
  return dt;
}

/// One conservative update. Interior interfaces carry the Godunov flux; live
/// atom interfaces carry the one-sided pair (h_minus out of the left cell,
/// h_plus into the right cell). The step is shortened so no atom mass crosses
/// zero; extinction times are recorded exactly.
inline StepResult step(MeasureState& state, AtomLedger& ledger, const FluxModel& flux,
                       const SolverConfig& config, double dt_target) {
  const Grid& g = state.grid;
  const int n = g.n_cells;
  const double max_dt = config.cfl * g.dx / flux.lipschitz_bound();
  if (dt_target > max_dt * (1.0 + 1e-9))
    throw std::runtime_error("step: dt violates the CFL bound");
  if (!(dt_target > 0.0)) throw std::invalid_argument("step: dt must be > 0");

  // interface fluxes (free outflow at the domain edges)
  std::vector<double> F(static_cast<std::size_t>(n) + 1);
  F[0] = flux.eval(state.regular[0]);
  F[static_cast<std::size_t>(n)] = flux.eval(state.regular[n - 1]);
  for (int k = 1; k < n; ++k) F[k] = flux.godunov_flux(state.regular[k - 1], state.regular[k]);

  struct AtomFlux {
    int atom = -1;
    int interface = 0;
    double h_minus = 0.0, h_plus = 0.0, rate = 0.0;
    bool bracketed = false;
  };
  std::vector<AtomFlux> af;
  const bool exact_mode = std::holds_alternative<ExactTail>(config.phantom_mode);
  for (std::size_t j = 0; j < state.atoms.size(); ++j) {
    if (!state.atoms[j].alive) continue;
    const auto [hm, hp] = atom_boundary_fluxes(state, static_cast<int>(j), flux, config);
    double rate = hp - hm;
    if (rate < -1e-10 * std::max(1.0, flux.sup_bound()))
      throw std::logic_error("step: atom gained mass (h_plus < h_minus)");
    rate = std::max(rate, 0.0);
    AtomFlux a{static_cast<int>(j), state.atoms[j].interface_index, hm, hp, rate, false};
    if (exact_mode && flux.tail_is_oscillating()) {
      const int k = a.interface;
      const double ul = (k > 0) ? state.regular[k - 1] : state.regular[0];
      const double ur = (k < n) ? state.regular[k] : state.regular[n - 1];
      a.bracketed = !flux.s_minus(ul).attained || !flux.s_plus(ur).attained;
    }
    af.push_back(a);
  }

  // event splitting: stop exactly when the first atom empties
  StepResult res;
  double dt = dt_target;
  for (const auto& a : af)
    if (a.rate > 0.0) dt = std::min(dt, state.atoms[a.atom].mass / a.rate);
  res.dt_taken = dt;

  const double lambda = dt / g.dx;
  std::vector<double> left_flux(F.begin(), F.end() - 1);   // flux into cell i from the left
  std::vector<double> right_flux(F.begin() + 1, F.end());  // flux out of cell i to the right
  for (const auto& a : af) {
    const int k = a.interface;
    if (k > 0) right_flux[k - 1] = a.h_minus;
    if (k < n) left_flux[k] = a.h_plus;
  }
  for (int i = 0; i < n; ++i) {
    double v = state.regular[i] - lambda * (right_flux[i] - left_flux[i]);
    if (v < 0.0) {
      if (v < -1e-12 * std::max(1.0, std::abs(state.regular[i])))
        throw std::logic_error("step: negative cell average (monotone-scheme invariant broken)");
      v = 0.0;
    }
    state.regular[i] = v;
  }

  const double t_new = state.time + dt;
  for (const auto& a : af) {
    Atom& atom = state.atoms[a.atom];
    double c = atom.mass - dt * a.rate;
    const bool dead = c <= 1e-14 * std::max(1.0, atom.mass);
    if (dead) c = 0.0;
    atom.mass = c;
    AtomRecord& rec = ledger.atoms.at(static_cast<std::size_t>(a.atom));
    rec.times.push_back(t_new);
    rec.mass.push_back(c);
    rec.h_minus.push_back(a.h_minus);
    rec.h_plus.push_back(a.h_plus);
    if (a.bracketed) rec.oscillating_flagged = true;
    if (dead) {
      atom.alive = false;
      atom.extinction_time = t_new;
      rec.extinction_time = t_new;
      res.extinguished.push_back(a.atom);
    }
  }

  state.time = t_new;
  res.flux_left_boundary = F[0];
  res.flux_right_boundary = F[static_cast<std::size_t>(n)];
  return res;
}

/// Marks an emptied atom as extinct; its interface reverts to the ordinary
/// Godunov flux on the next step (the neighbouring intervals merge).
inline void merge_on_extinction(MeasureState& state, int atom_index) {
  Atom& atom = state.atoms.at(static_cast<std::size_t>(atom_index));
  if (atom.mass > 0.0)
    throw std::invalid_argument("merge_on_extinction: atom still carries mass");
  atom.mass = 0.0;
  atom.alive = false;
  if (!atom.extinction_time) atom.extinction_time = state.time;
}

/// Full run record: stride-sampled dense field history, requested snapshots,
/// the per-step atom ledger, and bookkeeping for the conservation check.
struct Trajectory {
  Grid grid;
  std::vector<double> history_times;
  std::vector<std::vector<double>> history;
  std::vector<MeasureState> snapshots;
  AtomLedger ledger;
  std::vector<double> dt_history;
  double t_end = 0.0;
  double initial_mass = 0.0;
  double max_conservation_residual = 0.0;

  const MeasureState& snapshot_at(double t, double tol = 1e-9) const {
    for (const auto& s : snapshots)
      if (std::abs(s.time - t) <= tol) return s;
    throw std::out_of_range("trajectory: no snapshot at t=" + std::to_string(t));
  }
};

inline Trajectory run(const MeasureState& initial, const FluxModel& flux,
                      const SolverConfig& config) {
  config.validate(flux);
  MeasureState state = initial;

  Trajectory traj;
  traj.grid = state.grid;
  traj.t_end = config.t_end;
  traj.ledger = AtomLedger::for_state(state);
  traj.initial_mass = total_mass(state);
  traj.snapshots.push_back(state);
  if (config.history_stride > 0) {
    traj.history_times.push_back(state.time);
    traj.history.push_back(state.regular);
  }

  std::vector<double> events = config.snapshot_times;
  events.push_back(config.t_end);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               events.end());

  long step_count = 0;
  double mass_before = traj.initial_mass;
  while (state.time < config.t_end - 1e-14) {
    const double dt = cfl_dt(state, flux, config);
    const StepResult r = step(state, traj.ledger, flux, config, dt);
    ++step_count;
    traj.dt_history.push_back(r.dt_taken);

    // snap to an event time reached within roundoff so comparisons stay exact
    for (double ev : events)
      if (std::abs(state.time - ev) < 1e-12) state.time = ev;

    const double mass_after = total_mass(state);
    const double outflow = r.flux_right_boundary - r.flux_left_boundary;
    const double residual = std::abs(mass_after - mass_before + outflow * r.dt_taken);
    traj.max_conservation_residual = std::max(traj.max_conservation_residual, residual);
    mass_before = mass_after;

    if (config.history_stride > 0 && (step_count % config.history_stride == 0 ||
                                      state.time >= config.t_end - 1e-14)) {
      traj.history_times.push_back(state.time);
      traj.history.push_back(state.regular);
    }
    for (double ts : config.snapshot_times)
      if (std::abs(state.time - ts) < 1e-12 && ts > 0.0) traj.snapshots.push_back(state);
    if (std::abs(state.time - config.t_end) < 1e-12 &&
        std::none_of(config.snapshot_times.begin(), config.snapshot_times.end(),
                     [&](double ts) { return std::abs(ts - config.t_end) < 1e-12; }))
      traj.snapshots.push_back(state);
  }
  return traj;
}

}  // namespace mvsol

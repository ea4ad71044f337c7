#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "mvsol/common.hpp"
#include "mvsol/flux_model.hpp"

namespace mvsol {

struct Shock {
  double left_state = 0.0;
  double right_state = 0.0;
  double speed = 0.0;
};

/// A rarefaction stored as the tabulated inverse of the hull derivative:
/// (xi, state) knots with xi strictly increasing, linearly interpolated.
struct Rarefaction {
  double left_state = 0.0;
  double right_state = 0.0;
  double speed_lo = 0.0;
  double speed_hi = 0.0;
  std::vector<std::pair<double, double>> xi_state;

  double eval(double xi) const {
    if (xi_state.empty()) return left_state;
    if (xi <= xi_state.front().first) return xi_state.front().second;
    if (xi >= xi_state.back().first) return xi_state.back().second;
    auto it = std::upper_bound(xi_state.begin(), xi_state.end(), xi,
                               [](double v, const auto& k) { return v < k.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (xi - lo.first) / (hi.first - lo.first);
    return lo.second + w * (hi.second - lo.second);
  }
};

using Wave = std::variant<Shock, Rarefaction>;

inline double wave_speed_lo(const Wave& w) {
  if (const auto* s = std::get_if<Shock>(&w)) return s->speed;
  return std::get<Rarefaction>(w).speed_lo;
}
inline double wave_speed_hi(const Wave& w) {
  if (const auto* s = std::get_if<Shock>(&w)) return s->speed;
  return std::get<Rarefaction>(w).speed_hi;
}
inline double wave_left_state(const Wave& w) {
  if (const auto* s = std::get_if<Shock>(&w)) return s->left_state;
  return std::get<Rarefaction>(w).left_state;
}
inline double wave_right_state(const Wave& w) {
  if (const auto* s = std::get_if<Shock>(&w)) return s->right_state;
  return std::get<Rarefaction>(w).right_state;
}

/// Self-similar Riemann solution: waves ordered by nondecreasing speed
/// between two constant far states. When a truncation flag is set the
/// corresponding far state is a finite stand-in for an infinite trace.
struct WaveFan {
  double far_left = 0.0;
  double far_right = 0.0;
  std::vector<Wave> waves;
  bool left_truncated = false;
  bool right_truncated = false;

  /// Evaluate at the similarity variable xi = x/t. At a shock speed the
  /// right state is returned (measure-zero convention).
  double eval(double xi) const {
    for (const auto& w : waves) {
      if (xi < wave_speed_lo(w)) return wave_left_state(w);
      if (xi <= wave_speed_hi(w)) {
        if (const auto* s = std::get_if<Shock>(&w)) return s->right_state;
        return std::get<Rarefaction>(w).eval(xi);
      }
    }
    return far_right;
  }
};

inline double eval_fan(const WaveFan& fan, double xi) { return fan.eval(xi); }

namespace detail {

// Turns a hull into the ordered wave list. `ascending` means the fan connects
// hull.lo() on the left to hull.hi() on the right (u_l < u_r branch, convex
// minorant); otherwise the traversal is reversed (concave majorant branch).
inline std::vector<Wave> waves_from_hull(const PiecewiseLinearHull& hull, bool ascending,
                                         double max_speed) {
  std::vector<Wave> waves;
  const auto& u = hull.breakpoints();
  const auto& f = hull.values();
  const std::size_t m = u.size();
  if (m < 2) return waves;

  const std::size_t nseg = m - 1;
  auto seg_left = [&](std::size_t k) { return ascending ? k : nseg - k; };      // breakpoint idx
  auto seg_right = [&](std::size_t k) { return ascending ? k + 1 : nseg - 1 - k; };
  auto seg_slope = [&](std::size_t k) {
    const std::size_t s = ascending ? k : nseg - 1 - k;  // segment idx in breakpoint order
    return (f[s + 1] - f[s]) / (u[s + 1] - u[s]);
  };
  auto seg_is_contact = [&](std::size_t k) {
    const std::size_t s = ascending ? k : nseg - 1 - k;
    const double gap = u[s + 1] - u[s];
    return gap <= 2.5 * hull.sample_spacing(0.5 * (u[s] + u[s + 1]));
  };

  double prev_speed = -kInfinity;
  std::size_t k = 0;
  while (k < nseg) {
    const double sigma = seg_slope(k);
    if (sigma < prev_speed - 1e-9 * std::max(1.0, max_speed))
      throw std::logic_error("riemann: hull produced decreasing wave speeds");
    if (std::abs(sigma) > max_speed * (1.0 + 1e-6) + 1e-12)
      throw std::logic_error("riemann: wave speed exceeds the flux Lipschitz bound");
    if (!seg_is_contact(k)) {
      Shock s;
      s.left_state = u[seg_left(k)];
      s.right_state = u[seg_right(k)];
      s.speed = sigma;
      waves.emplace_back(s);
      prev_speed = sigma;
      ++k;
      continue;
    }
    // maximal run of contact segments -> one rarefaction
    Rarefaction r;
    r.left_state = u[seg_left(k)];
    r.speed_lo = sigma;
    std::size_t j = k;
    while (j < nseg && seg_is_contact(j)) {
      const std::size_t s = ascending ? j : nseg - 1 - j;
      r.xi_state.emplace_back(seg_slope(j), 0.5 * (u[s] + u[s + 1]));
      ++j;
    }
    r.right_state = u[seg_right(j - 1)];
    r.speed_hi = seg_slope(j - 1);
    // guard against slope ties producing non-increasing knots
    std::vector<std::pair<double, double>> knots;
    for (const auto& kn : r.xi_state)
      if (knots.empty() || kn.first > knots.back().first) knots.push_back(kn);
    r.xi_state = std::move(knots);
    prev_speed = r.speed_hi;
    waves.emplace_back(std::move(r));
    k = j;
  }
  return waves;
}

}  // namespace detail

/// Entropy solution of the two-state Riemann problem, read off the convex
/// minorant (u_l < u_r) or concave majorant (u_l > u_r) of the flux.
inline WaveFan solve_standard_riemann(double u_l, double u_r_state, const FluxModel& flux) {
  if (u_l < 0.0 || u_r_state < 0.0 || !std::isfinite(u_l) || !std::isfinite(u_r_state))
    throw std::domain_error("riemann: states must be finite and >= 0");
  WaveFan fan;
  fan.far_left = u_l;
  fan.far_right = u_r_state;
  if (u_l == u_r_state) return fan;
  if (u_l < u_r_state) {
    const auto hull = flux.convex_hull(u_l, u_r_state);
    fan.waves = detail::waves_from_hull(hull, /*ascending=*/true, flux.lipschitz_bound());
  } else {
    const auto hull = flux.concave_hull(u_r_state, u_l);
    fan.waves = detail::waves_from_hull(hull, /*ascending=*/false, flux.lipschitz_bound());
  }
  return fan;
}

/// Solution of the Riemann problem with a Dirac atom at the interface.
struct ModifiedRiemannSolution {
  WaveFan left_fan;   // fan of v_- , supported in x < 0
  WaveFan right_fan;  // fan of v_+ , supported in x > 0
  double atom_mass = 1.0;
  double atom_decay_rate = 0.0;  // phi(s_+(u_+)) - phi(s_-(u_-)) >= 0
  double tau = kInfinity;        // extinction time of a unit atom (1 / rate)
  double extinction_time = kInfinity;  // atom_mass / rate
  double h_minus = 0.0;          // flux feeding the atom from the left
  double h_plus = 0.0;           // flux emitted to the right
  VisibleResult s_minus_result;
  VisibleResult s_plus_result;
  double u_cap_used = 0.0;

  double atom_mass_at(double t) const {
    return std::max(atom_mass - atom_decay_rate * t, 0.0);
  }

  /// Regular part at (x, t), valid while the atom is alive. Continuation past
  /// the extinction time is the evolution engine's job.
  double eval_regular(double x, double t) const {
    if (!(t > 0.0)) throw std::domain_error("modified riemann: eval needs t > 0");
    if (t >= extinction_time)
      throw std::domain_error("modified riemann: composite solution only valid before extinction");
    return x < 0.0 ? left_fan.eval(x / t) : right_fan.eval(x / t);
  }
};

inline ModifiedRiemannSolution solve_modified_riemann(double u_minus, double u_plus,
                                                      double atom_mass, const FluxModel& flux,
                                                      double u_cap = 1e6) {
  if (!(atom_mass > 0.0))
    throw std::invalid_argument("modified riemann: atom mass must be > 0 (use the standard solver)");
  if (u_minus < 0.0 || u_plus < 0.0 || !std::isfinite(u_minus) || !std::isfinite(u_plus))
    throw std::domain_error("modified riemann: states must be finite and >= 0");

  ModifiedRiemannSolution sol;
  sol.atom_mass = atom_mass;
  sol.s_minus_result = flux.s_minus(u_minus);
  sol.s_plus_result = flux.s_plus(u_plus);
  sol.h_minus = sol.s_minus_result.flux_at_s;
  sol.h_plus = sol.s_plus_result.flux_at_s;
  if ((!sol.s_minus_result.attained || !sol.s_plus_result.attained) && flux.tail_is_oscillating())
    throw validation_error(
        "modified riemann: oscillating tail only brackets the trace fluxes; "
        "no closed-form fan is available");

  const double cap =
      std::max({u_cap, 2.0 * flux.u_tail(), 2.0 * u_minus + 1.0, 2.0 * u_plus + 1.0});
  sol.u_cap_used = cap;

  if (sol.s_minus_result.attained) {
    sol.left_fan = solve_standard_riemann(u_minus, sol.s_minus_result.s_value, flux);
  } else {
    sol.left_fan.far_left = u_minus;
    sol.left_fan.far_right = cap;
    sol.left_fan.right_truncated = true;
    const auto hull = flux.convex_hull(u_minus, cap);
    sol.left_fan.waves = detail::waves_from_hull(hull, true, flux.lipschitz_bound());
  }
  if (sol.s_plus_result.attained) {
    sol.right_fan = solve_standard_riemann(sol.s_plus_result.s_value, u_plus, flux);
  } else {
    sol.right_fan.far_left = cap;
    sol.right_fan.far_right = u_plus;
    sol.right_fan.left_truncated = true;
    const auto hull = flux.concave_hull(u_plus, cap);
    sol.right_fan.waves = detail::waves_from_hull(hull, false, flux.lipschitz_bound());
  }

  // One-sided supports: the left fan emits nothing into x > 0 and the right
  // fan nothing into x < 0 (sign structure of the hull derivatives).
  const double speed_tol = 1e-8 * std::max(1.0, flux.lipschitz_bound());
  for (const auto& w : sol.left_fan.waves)
    if (wave_speed_hi(w) > speed_tol)
      throw std::logic_error("modified riemann: left fan emitted a right-going wave");
  for (const auto& w : sol.right_fan.waves)
    if (wave_speed_lo(w) < -speed_tol)
      throw std::logic_error("modified riemann: right fan emitted a left-going wave");

  double rate = sol.h_plus - sol.h_minus;
  if (rate < -1e-10 * std::max(1.0, flux.sup_bound()))
    throw std::logic_error("modified riemann: negative atom decay rate");
  rate = std::max(rate, 0.0);
  sol.atom_decay_rate = rate;
  sol.tau = rate > 0.0 ? 1.0 / rate : kInfinity;
  sol.extinction_time = rate > 0.0 ? atom_mass / rate : kInfinity;
  return sol;
}

}  // namespace mvsol

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mvsol/common.hpp"

namespace mvsol {

/// Uniform 1-D grid on [x_lo, x_hi]. Cell i covers
/// [x_lo + i*dx, x_lo + (i+1)*dx); interfaces are indexed 0..n_cells.
struct Grid {
  double x_lo = 0.0;
  double x_hi = 1.0;
  int n_cells = 1;
  double dx = 1.0;

  Grid() = default;
  Grid(double lo, double hi, int n) : x_lo(lo), x_hi(hi), n_cells(n) {
    if (!(x_lo < x_hi)) throw validation_error("grid: x_lo must be < x_hi");
    if (n_cells < 1) throw validation_error("grid: n_cells must be >= 1");
    dx = (x_hi - x_lo) / n_cells;
  }

  double cell_center(int i) const { return x_lo + (i + 0.5) * dx; }
  double interface_position(int k) const { return x_lo + k * dx; }
  int nearest_interface(double x) const {
    const int k = static_cast<int>(std::lround((x - x_lo) / dx));
    return std::clamp(k, 0, n_cells);
  }
  bool operator==(const Grid& o) const {
    return x_lo == o.x_lo && x_hi == o.x_hi && n_cells == o.n_cells;
  }
};

/// A Dirac atom pinned to a cell interface.
struct Atom {
  int interface_index = 0;
  double position = 0.0;
  double mass = 0.0;
  bool alive = false;
  std::optional<double> extinction_time;
};

/// Discrete nonnegative Radon measure: cell averages for the regular part
/// plus a sorted list of atoms for the singular part. Value semantics: copies
/// are independent snapshots.
struct MeasureState {
  Grid grid;
  std::vector<double> regular;  // n_cells cell averages, >= 0
  std::vector<Atom> atoms;      // sorted by position, distinct interfaces
  double time = 0.0;

  MeasureState() = default;
  explicit MeasureState(const Grid& g) : grid(g), regular(g.n_cells, 0.0) {}
};

inline double total_mass(const MeasureState& s) {
  detail::KahanSum acc;
  for (double v : s.regular) acc.add(v);
  double m = acc.value() * s.grid.dx;
  for (const auto& a : s.atoms) m += a.mass;
  return m;
}

/// Partial order on measures over one grid: regular parts cellwise <= and
/// every atom of `a` dominated by a co-located atom of `b`, all up to tol.
inline bool leq(const MeasureState& a, const MeasureState& b, double tol) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("leq: states live on different grids");
  for (int i = 0; i < a.grid.n_cells; ++i)
    if (a.regular[i] > b.regular[i] + tol) return false;
  for (const auto& atom : a.atoms) {
    if (atom.mass <= tol) continue;
    bool dominated = false;
    for (const auto& other : b.atoms) {
      if (other.interface_index == atom.interface_index && other.mass >= atom.mass - tol) {
        dominated = true;
        break;
      }
    }
    if (!dominated) return false;
  }
  return true;
}

/// Windowed L1 distance of the regular parts; partial cells weighted by
/// overlap. An empty window gives 0.
inline double l1_distance_regular(const MeasureState& a, const MeasureState& b, double x_left,
                                  double x_right) {
  if (!(a.grid == b.grid))
    throw std::invalid_argument("l1_distance_regular: states live on different grids");
  if (!(x_left < x_right)) return 0.0;
  const Grid& g = a.grid;
  double acc = 0.0;
  for (int i = 0; i < g.n_cells; ++i) {
    const double c_lo = g.x_lo + i * g.dx;
    const double c_hi = c_lo + g.dx;
    const double w = std::max(0.0, std::min(c_hi, x_right) - std::max(c_lo, x_left));
    if (w > 0.0) acc += std::abs(a.regular[i] - b.regular[i]) * w;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

/// Declarative initial data: a regular density (constant, piecewise constant
/// over breakpoints, or a sampled piecewise-linear table) plus atoms.
struct InitialSpec {
  // regular part: exactly one of the three forms
  std::optional<double> constant_value;
  std::vector<double> pw_breaks;   // m+1 breakpoints
  std::vector<double> pw_values;   // m values; zero outside [breaks.front, breaks.back)
  std::vector<double> table_x;     // sampled piecewise-linear density
  std::vector<double> table_u;
  std::vector<std::pair<double, double>> atoms;  // (position, mass)
  double u_cap = 1e6;
};

struct FromConfigResult {
  MeasureState state;
  std::vector<std::string> warnings;
};

namespace detail {

inline double pw_constant_cell_average(const std::vector<double>& breaks,
                                       const std::vector<double>& values, double a, double b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double w = std::max(0.0, std::min(b, breaks[k + 1]) - std::max(a, breaks[k]));
    acc += values[k] * w;
  }
  return acc / (b - a);
}

inline double pw_linear_cell_average(const std::vector<double>& xs, const std::vector<double>& us,
                                     double a, double b) {
  // integrate the linear interpolant (zero outside the table) over [a, b]
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double lo = std::max(a, xs[k]);
    const double hi = std::min(b, xs[k + 1]);
    if (hi <= lo) continue;
    const double inv = 1.0 / (xs[k + 1] - xs[k]);
    auto value = [&](double x) { return us[k] + (us[k + 1] - us[k]) * (x - xs[k]) * inv; };
    acc += 0.5 * (value(lo) + value(hi)) * (hi - lo);
  }
  return acc / (b - a);
}

}  // namespace detail

/// Builds the discrete state: the regular density is cell-averaged (exactly
/// for the piecewise-constant form), atoms are snapped to the nearest
/// interface. Validates positivity and distinctness.
inline FromConfigResult from_config(const InitialSpec& spec, const Grid& grid) {
  FromConfigResult out;
  out.state = MeasureState(grid);

  const bool has_const = spec.constant_value.has_value();
  const bool has_pw = !spec.pw_values.empty();
  const bool has_table = !spec.table_u.empty();
  if (static_cast<int>(has_const) + static_cast<int>(has_pw) + static_cast<int>(has_table) > 1)
    throw validation_error("initial data: give exactly one regular-part form");
  if (has_pw && spec.pw_breaks.size() != spec.pw_values.size() + 1)
    throw validation_error("initial data: need one more breakpoint than piecewise values");
  if (has_table && (spec.table_x.size() != spec.table_u.size() || spec.table_x.size() < 2))
    throw validation_error("initial data: sampled density needs matching x/u arrays (>= 2)");
  for (std::size_t k = 0; k + 1 < spec.pw_breaks.size(); ++k)
    if (!(spec.pw_breaks[k] < spec.pw_breaks[k + 1]))
      throw validation_error("initial data: breakpoints must be increasing");
  for (std::size_t k = 0; k + 1 < spec.table_x.size(); ++k)
    if (!(spec.table_x[k] < spec.table_x[k + 1]))
      throw validation_error("initial data: sample positions must be increasing");
  for (double v : spec.pw_values)
    if (v < 0.0) throw validation_error("initial data: regular density must be >= 0");
  for (double v : spec.table_u)
    if (v < 0.0) throw validation_error("initial data: regular density must be >= 0");
  if (has_const && *spec.constant_value < 0.0)
    throw validation_error("initial data: regular density must be >= 0");

  for (int i = 0; i < grid.n_cells; ++i) {
    const double a = grid.x_lo + i * grid.dx;
    const double b = a + grid.dx;
    double v = 0.0;
    if (has_const) v = *spec.constant_value;
    else if (has_pw) v = detail::pw_constant_cell_average(spec.pw_breaks, spec.pw_values, a, b);
    else if (has_table) v = detail::pw_linear_cell_average(spec.table_x, spec.table_u, a, b);
    out.state.regular[i] = std::min(v, spec.u_cap);
  }

  for (const auto& [pos, mass] : spec.atoms) {
    if (mass < 0.0)
      throw validation_error("initial data: atom masses must be positive (got " +
                             std::to_string(mass) + ")");
    if (mass == 0.0) {
      out.warnings.push_back("initial data: dropped zero-mass atom at x=" + std::to_string(pos));
      continue;
    }
    Atom a;
    a.interface_index = grid.nearest_interface(pos);
    if (a.interface_index <= 0 || a.interface_index >= grid.n_cells)
      throw validation_error("initial data: atom at x=" + std::to_string(pos) +
                             " needs cells on both sides of its interface");
    a.position = grid.interface_position(a.interface_index);
    a.mass = mass;
    a.alive = true;
    for (const auto& other : out.state.atoms)
      if (other.interface_index == a.interface_index)
        throw validation_error("initial data: two atoms snap to the same interface near x=" +
                               std::to_string(pos));
    out.state.atoms.push_back(a);
  }
  std::sort(out.state.atoms.begin(), out.state.atoms.end(),
            [](const Atom& a, const Atom& b) { return a.position < b.position; });
  return out;
}

}  // namespace mvsol

#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mvsol/common.hpp"

namespace mvsol {

/// Tail behaviour of the flux on [u_tail, inf): the flux is monotone beyond
/// u_tail and approaches phi_inf.
struct AsymptoticLimit {
  double phi_inf;
  double monotone_from;
};

/// Tail behaviour where the flux keeps oscillating: beyond envelope_from the
/// values stay inside [liminf_inf, limsup_inf] and come arbitrarily close to
/// both bounds.
struct OscillatingTail {
  double liminf_inf;
  double limsup_inf;
  double envelope_from;
};

using TailDescriptor = std::variant<AsymptoticLimit, OscillatingTail>;

/// Result of a visible-point query: the least state at or above u0 attaining
/// the one-sided extremum of the flux over [u0, inf).
struct VisibleResult {
  double s_value = 0.0;   // may be +inf
  double flux_at_s = 0.0; // the extremal flux value (a limit when s_value = inf)
  bool attained = true;   // false iff s_value = inf
  // Set when s_value = inf and the tail oscillates: the [liminf, limsup]
  // bracket that bounds any admissible trace flux.
  std::optional<std::pair<double, double>> oscillating_bracket;
};

/// Piecewise-linear convex minorant / concave majorant built over flux
/// samples. Breakpoints are actual flux samples, sorted by state.
class PiecewiseLinearHull {
 public:
  PiecewiseLinearHull(std::vector<double> u, std::vector<double> f, bool concave,
                      double uniform_resolution, double tail_start, double tail_ratio)
      : u_(std::move(u)),
        f_(std::move(f)),
        concave_(concave),
        uniform_resolution_(uniform_resolution),
        tail_start_(tail_start),
        tail_ratio_(tail_ratio) {}

  const std::vector<double>& breakpoints() const { return u_; }
  const std::vector<double>& values() const { return f_; }
  bool concave() const { return concave_; }
  std::size_t size() const { return u_.size(); }
  double lo() const { return u_.front(); }
  double hi() const { return u_.back(); }

  double eval(double u) const {
    if (u <= u_.front()) return f_.front();
    if (u >= u_.back()) return f_.back();
    const auto it = std::upper_bound(u_.begin(), u_.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - u_.begin());
    const double w = (u - u_[i - 1]) / (u_[i] - u_[i - 1]);
    return f_[i - 1] + w * (f_[i] - f_[i - 1]);
  }

  /// One-sided derivative (slope of the segment containing u, right-biased).
  double derivative(double u) const {
    if (u_.size() < 2) return 0.0;
    std::size_t i = static_cast<std::size_t>(std::upper_bound(u_.begin(), u_.end(), u) - u_.begin());
    if (i == 0) i = 1;
    if (i >= u_.size()) i = u_.size() - 1;
    return slope(i - 1);
  }

  double slope(std::size_t segment) const {
    return (f_[segment + 1] - f_[segment]) / (u_[segment + 1] - u_[segment]);
  }

  /// Approximate spacing of the underlying sample grid near state u. Used to
  /// tell hull chords (shocks) from contact runs (rarefactions).
  double sample_spacing(double u) const {
    if (u <= tail_start_ || tail_ratio_ <= 1.0) return uniform_resolution_;
    return std::max(uniform_resolution_, u * (tail_ratio_ - 1.0));
  }

 private:
  std::vector<double> u_, f_;
  bool concave_;
  double uniform_resolution_;
  double tail_start_;
  double tail_ratio_;
};

namespace detail {

// Golden-section refinement of an extremum inside [a, b].
template <typename F>
double golden_section_extremum(const F& f, double a, double b, bool maximize, int iters = 30) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    const bool keep_left = maximize ? (f1 > f2) : (f1 < f2);
    if (keep_left) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

inline double cross(double ox, double oy, double ax, double ay, double bx, double by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

}  // namespace detail

/// The flux phi of the conservation law together with everything derived from
/// it: visible points s_±, convex/concave hulls on finite intervals, and the
/// two-point Godunov flux (with extended-real arguments realizing the
/// boundary-data-at-infinity traces).
///
/// Immutable after construction; all queries are pure and thread-safe.
class FluxModel {
 public:
  struct CriticalPoint {
    double u;
    double value;
    bool is_max;
  };

  FluxModel(std::string name, std::function<double(double)> eval_rule, double lipschitz_bound,
            double sup_bound, TailDescriptor tail, double search_resolution = -1.0)
      : name_(std::move(name)),
        eval_rule_(std::move(eval_rule)),
        lipschitz_bound_(lipschitz_bound),
        sup_bound_(sup_bound),
        tail_(tail) {
    if (!(lipschitz_bound_ > 0.0)) throw validation_error("flux: lipschitz_bound must be > 0");
    if (!(sup_bound_ >= 0.0)) throw validation_error("flux: sup_bound must be >= 0");
    u_tail_ = std::visit(
        [](const auto& t) {
          if constexpr (std::is_same_v<std::decay_t<decltype(t)>, AsymptoticLimit>)
            return t.monotone_from;
          else
            return t.envelope_from;
        },
        tail_);
    if (!(u_tail_ >= 0.0)) throw validation_error("flux: tail start must be >= 0");
    search_resolution_ =
        search_resolution > 0.0 ? search_resolution : std::max(1e-4 * u_tail_, 1e-6);
    tie_tol_ = 1e-11 * std::max(1.0, sup_bound_);
    scan();
    validate_bounds();
  }

  const std::string& name() const { return name_; }
  double lipschitz_bound() const { return lipschitz_bound_; }
  double sup_bound() const { return sup_bound_; }
  double search_resolution() const { return search_resolution_; }
  double u_tail() const { return u_tail_; }
  const TailDescriptor& tail() const { return tail_; }
  bool tail_is_oscillating() const { return std::holds_alternative<OscillatingTail>(tail_); }
  double curvature_scale() const { return curvature_scale_; }

  double limsup_infinity() const {
    if (const auto* a = std::get_if<AsymptoticLimit>(&tail_)) return a->phi_inf;
    return std::get<OscillatingTail>(tail_).limsup_inf;
  }
  double liminf_infinity() const {
    if (const auto* a = std::get_if<AsymptoticLimit>(&tail_)) return a->phi_inf;
    return std::get<OscillatingTail>(tail_).liminf_inf;
  }

  /// phi(u). Negative states are outside the model's domain.
  double eval(double u) const {
    if (u < 0.0 || std::isnan(u)) throw std::domain_error("flux: state must be >= 0 and finite");
    if (std::isinf(u)) throw std::domain_error("flux: eval expects a finite state");
    return eval_rule_(u);
  }

  /// Locations of the refined interior extrema of phi on (0, u_tail).
  std::vector<double> critical_points() const {
    std::vector<double> out;
    out.reserve(critical_.size());
    for (const auto& c : critical_) out.push_back(c.u);
    return out;
  }

  VisibleResult s_plus(double u0) const { return visible(u0, /*maximize=*/true); }
  VisibleResult s_minus(double u0) const { return visible(u0, /*maximize=*/false); }

  /// Least concave majorant of phi on [lo, hi], breakpoints on the sample grid.
  PiecewiseLinearHull concave_hull(double lo, double hi) const { return hull(lo, hi, true); }
  /// Greatest convex minorant of phi on [lo, hi].
  PiecewiseLinearHull convex_hull(double lo, double hi) const { return hull(lo, hi, false); }

  /// Exact-Riemann two-point flux. With one infinite argument it returns the
  /// corresponding visible-point flux: godunov_flux(inf, b) = phi(s_+(b)),
  /// godunov_flux(a, inf) = phi(s_-(a)).
  double godunov_flux(double a, double b) const {
    const bool ia = std::isinf(a), ib = std::isinf(b);
    if (ia && ib) throw std::invalid_argument("godunov_flux: both arguments infinite");
    if (ia) return s_plus(b).flux_at_s;
    if (ib) return s_minus(a).flux_at_s;
    if (a < 0.0 || b < 0.0) throw std::domain_error("godunov_flux: states must be >= 0");
    if (a == b) return eval(a);
    if (a < b) return range_min(a, b);
    return range_max(b, a);
  }

  /// Extremes of phi over a finite interval [lo, hi], via the precomputed
  /// critical points (and a local scan when the interval lies in an
  /// oscillating tail).
  double range_max(double lo, double hi) const { return range_extremum(lo, hi, true); }
  double range_min(double lo, double hi) const { return range_extremum(lo, hi, false); }

 private:
  void scan() {
    const double hi = std::max(u_tail_, search_resolution_);
    const std::size_t n = std::max<std::size_t>(
        8, static_cast<std::size_t>(std::ceil(hi / search_resolution_)) + 1);
    samples_u_.resize(n);
    samples_f_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double u = (k + 1 == n) ? hi : hi * static_cast<double>(k) / static_cast<double>(n - 1);
      samples_u_[k] = u;
      samples_f_[k] = eval_rule_(u);
    }
    // curvature scale from second differences, used for derivative tolerances
    curvature_scale_ = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double h = samples_u_[k + 1] - samples_u_[k];
      const double d2 = (samples_f_[k + 1] - 2.0 * samples_f_[k] + samples_f_[k - 1]) / (h * h);
      curvature_scale_ = std::max(curvature_scale_, std::abs(d2));
    }
    // interior extrema: sign changes of the forward differences
    int last_sign = 0;
    std::size_t last_sign_idx = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double d = samples_f_[k + 1] - samples_f_[k];
      const int s = (d > 0.0) ? 1 : (d < 0.0 ? -1 : 0);
      if (s == 0) continue;
      if (last_sign != 0 && s != last_sign) {
        const double a = samples_u_[last_sign_idx];
        const double b = samples_u_[k + 1];
        const bool is_max = (last_sign > 0);
        const double u_star = detail::golden_section_extremum(eval_rule_, a, b, is_max);
        critical_.push_back({u_star, eval_rule_(u_star), is_max});
      }
      last_sign = s;
      last_sign_idx = k;
    }
  }

  void validate_bounds() const {
    const double sup_slack = sup_bound_ * 1e-9 + 1e-12;
    for (std::size_t k = 0; k < samples_u_.size(); ++k) {
      if (std::abs(samples_f_[k]) > sup_bound_ + sup_slack)
        throw validation_error("flux: |phi| exceeds sup_bound at u=" + std::to_string(samples_u_[k]));
      if (k > 0) {
        const double lip = std::abs(samples_f_[k] - samples_f_[k - 1]) /
                           (samples_u_[k] - samples_u_[k - 1]);
        if (lip > lipschitz_bound_ * (1.0 + 1e-6) + 1e-12)
          throw validation_error("flux: sampled slope exceeds lipschitz_bound near u=" +
                                 std::to_string(samples_u_[k]));
      }
    }
    // tail sanity: sample a few decades beyond u_tail
    const double t0 = std::max(u_tail_, 1e-3);
    std::vector<double> probe;
    for (int j = 0; j <= 32; ++j) probe.push_back(t0 * std::pow(100.0, j / 32.0));
    if (const auto* a = std::get_if<AsymptoticLimit>(&tail_)) {
      int dir = 0;
      double prev = eval_rule_(probe.front());
      for (std::size_t j = 1; j < probe.size(); ++j) {
        const double v = eval_rule_(probe[j]);
        const double d = v - prev;
        if (std::abs(d) > tie_tol_) {
          const int s = d > 0 ? 1 : -1;
          if (dir != 0 && s != dir)
            throw validation_error("flux: tail declared monotone but samples are not");
          dir = s;
        }
        prev = v;
      }
      const double end_gap = std::abs(eval_rule_(probe.back()) - a->phi_inf);
      const double start_gap = std::abs(eval_rule_(probe.front()) - a->phi_inf);
      if (end_gap > start_gap + 1e-9)
        throw validation_error("flux: tail samples do not approach the declared limit");
    } else {
      const auto& o = std::get<OscillatingTail>(tail_);
      if (!(o.liminf_inf <= o.limsup_inf))
        throw validation_error("flux: oscillating tail needs liminf <= limsup");
      for (double u : probe) {
        const double v = eval_rule_(u);
        if (v < o.liminf_inf - 1e-9 || v > o.limsup_inf + 1e-9)
          throw validation_error("flux: tail sample escapes the declared envelope");
      }
    }
  }

  VisibleResult visible(double u0, bool maximize) const {
    if (u0 < 0.0 || !std::isfinite(u0))
      throw std::domain_error("visible point query: u0 must be finite and >= 0");
    struct Cand {
      double u;
      double f;
    };
    std::vector<Cand> cands;
    cands.push_back({u0, eval_rule_(u0)});
    for (const auto& c : critical_) {
      if (c.u > u0 && c.u < u_tail_ && c.is_max == maximize) cands.push_back({c.u, c.value});
    }
    if (u_tail_ > u0) cands.push_back({u_tail_, eval_rule_(u_tail_)});
    const double limit_value = maximize ? limsup_infinity() : liminf_infinity();
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.u < b.u; });

    double best = limit_value;
    for (const auto& c : cands) best = maximize ? std::max(best, c.f) : std::min(best, c.f);

    for (const auto& c : cands) {
      const bool hits = maximize ? (c.f >= best - tie_tol_) : (c.f <= best + tie_tol_);
      if (hits) return VisibleResult{c.u, c.f, true, std::nullopt};
    }
    VisibleResult r{kInfinity, limit_value, false, std::nullopt};
    if (tail_is_oscillating()) {
      const auto& o = std::get<OscillatingTail>(tail_);
      r.oscillating_bracket = std::make_pair(o.liminf_inf, o.limsup_inf);
    }
    return r;
  }

  double range_extremum(double lo, double hi, bool maximize) const {
    if (!(lo >= 0.0) || !(hi >= lo) || !std::isfinite(hi))
      throw std::invalid_argument("range extremum: need 0 <= lo <= hi < inf");
    double best = eval_rule_(lo);
    const double fhi = eval_rule_(hi);
    best = maximize ? std::max(best, fhi) : std::min(best, fhi);
    if (u_tail_ > lo && u_tail_ < hi) {
      const double ft = eval_rule_(u_tail_);
      best = maximize ? std::max(best, ft) : std::min(best, ft);
    }
    for (const auto& c : critical_) {
      if (c.u > lo && c.u < hi && c.is_max == maximize)
        best = maximize ? std::max(best, c.value) : std::min(best, c.value);
    }
    if (hi > u_tail_ && tail_is_oscillating()) {
      // No structure is declared beyond the envelope start; fall back to a
      // bounded local scan. Wide intervals there are not supported.
      const double a = std::max(lo, u_tail_);
      const double width = hi - a;
      const std::size_t max_samples = 65536;
      std::size_t n = static_cast<std::size_t>(std::ceil(width / search_resolution_)) + 2;
      if (n > max_samples)
        throw validation_error(
            "flux: extremum over a wide interval inside an oscillating tail is not supported");
      for (std::size_t k = 0; k < n; ++k) {
        const double u = a + width * static_cast<double>(k) / static_cast<double>(n - 1);
        const double f = eval_rule_(u);
        best = maximize ? std::max(best, f) : std::min(best, f);
      }
    }
    return best;
  }

  PiecewiseLinearHull hull(double lo, double hi, bool concave) const {
    if (!(lo >= 0.0) || !(hi >= lo))
      throw std::invalid_argument("hull: need 0 <= lo <= hi");
    if (std::isinf(hi))
      throw std::invalid_argument("hull: unbounded interval (use the visible-point machinery)");
    std::vector<double> us = hull_sample_grid(lo, hi);
    std::vector<double> fs(us.size());
    for (std::size_t k = 0; k < us.size(); ++k) fs[k] = eval_rule_(us[k]);
    if (us.size() <= 2) {
      const double ratio = tail_ratio(lo, hi);
      return PiecewiseLinearHull(std::move(us), std::move(fs), concave, search_resolution_,
                                 u_tail_, ratio);
    }
    // Andrew's monotone chain over points sorted by u. For the concave
    // majorant keep right turns; for the convex minorant keep left turns.
    std::vector<std::size_t> chain;
    chain.reserve(us.size());
    for (std::size_t k = 0; k < us.size(); ++k) {
      while (chain.size() >= 2) {
        const std::size_t i1 = chain[chain.size() - 2];
        const std::size_t i2 = chain[chain.size() - 1];
        const double c = detail::cross(us[i1], fs[i1], us[i2], fs[i2], us[k], fs[k]);
        const bool pop = concave ? (c >= 0.0) : (c <= 0.0);
        if (!pop) break;
        chain.pop_back();
      }
      chain.push_back(k);
    }
    std::vector<double> hu, hf;
    hu.reserve(chain.size());
    hf.reserve(chain.size());
    for (std::size_t idx : chain) {
      hu.push_back(us[idx]);
      hf.push_back(fs[idx]);
    }
    return PiecewiseLinearHull(std::move(hu), std::move(hf), concave, search_resolution_, u_tail_,
                               tail_ratio(lo, hi));
  }

  double tail_ratio(double lo, double hi) const {
    if (hi <= u_tail_) return 1.0;
    const double start = std::max({u_tail_, lo, 1e-9});
    const double decades = std::log10(hi / start);
    const std::size_t m = std::max<std::size_t>(32, static_cast<std::size_t>(64.0 * decades));
    return std::pow(hi / start, 1.0 / static_cast<double>(m));
  }

  std::vector<double> hull_sample_grid(double lo, double hi) const {
    std::vector<double> us;
    if (hi == lo) {
      us.push_back(lo);
      return us;
    }
    const double uhi = std::min(hi, std::max(u_tail_, lo));
    if (uhi > lo) {
      const std::size_t n = std::max<std::size_t>(
          2, static_cast<std::size_t>(std::ceil((uhi - lo) / search_resolution_)) + 1);
      for (std::size_t k = 0; k < n; ++k)
        us.push_back(lo + (uhi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
    } else {
      us.push_back(lo);
    }
    if (hi > uhi) {
      const double start = std::max(uhi, 1e-9);
      const double decades = std::log10(hi / start);
      const std::size_t m = std::max<std::size_t>(32, static_cast<std::size_t>(64.0 * decades));
      for (std::size_t j = 1; j <= m; ++j)
        us.push_back(start * std::pow(hi / start, static_cast<double>(j) / static_cast<double>(m)));
      us.back() = hi;
    }
    return us;
  }

  std::string name_;
  std::function<double(double)> eval_rule_;
  double lipschitz_bound_;
  double sup_bound_;
  TailDescriptor tail_;
  double u_tail_ = 0.0;
  double search_resolution_ = 1e-4;
  double tie_tol_ = 1e-11;
  double curvature_scale_ = 0.0;
  std::vector<double> samples_u_, samples_f_;
  std::vector<CriticalPoint> critical_;
};

// ---------------------------------------------------------------------------
// Built-in fluxes
// ---------------------------------------------------------------------------

namespace fluxes {

/// phi(u) = 1 - (1+u)^{-p}: bounded, increasing, concave for p > 0.
inline FluxModel inverse_power(double p, double u_tail = 100.0, double resolution = -1.0) {
  if (!(p > 0.0)) throw validation_error("inverse_power flux: p must be > 0");
  return FluxModel(
      "inverse_power(p=" + std::to_string(p) + ")",
      [p](double u) { return 1.0 - std::pow(1.0 + u, -p); }, p, 1.0,
      AsymptoticLimit{1.0, u_tail}, resolution);
}

/// phi(u) = u / (1 + u^2): a single hump peaking at u = 1, vanishing at inf.
inline FluxModel bump(double u_tail = 10.0, double resolution = -1.0) {
  return FluxModel(
      "bump", [](double u) { return u / (1.0 + u * u); }, 1.0, 0.5, AsymptoticLimit{0.0, u_tail},
      resolution);
}

/// phi(u) = tanh(u).
inline FluxModel monotone_tanh(double u_tail = 20.0, double resolution = -1.0) {
  return FluxModel(
      "monotone_tanh", [](double u) { return std::tanh(u); }, 1.0, 1.0,
      AsymptoticLimit{1.0, u_tail}, resolution);
}

/// Smoothly increasing on [0, K], exactly constant c0 beyond K (C^2 join).
inline FluxModel plateau(double K = 1.0, double c0 = 1.0, double resolution = -1.0) {
  if (!(K > 0.0) || !(c0 > 0.0)) throw validation_error("plateau flux: K and c0 must be > 0");
  auto phi = [K, c0](double u) {
    const double v = std::min(u / K, 1.0);
    return c0 * (v * v * v * (10.0 + v * (-15.0 + 6.0 * v)));
  };
  const double lip = 1.875 * c0 / K;
  return FluxModel("plateau(K=" + std::to_string(K) + ",c0=" + std::to_string(c0) + ")", phi, lip,
                   c0, AsymptoticLimit{c0, K}, resolution);
}

/// A flux whose tail keeps oscillating between envelopes 0.3 and 0.7 without
/// attaining them. Exercises the bracketed-trace configuration.
inline FluxModel oscillating(double u_tail = 50.0, double resolution = -1.0) {
  auto phi = [](double u) { return 0.5 + 0.2 * std::tanh(u) * std::sin(std::log1p(u)); };
  return FluxModel("oscillating", phi, 0.5, 0.7, OscillatingTail{0.3, 0.7, u_tail}, resolution);
}

/// Flux given by samples (u_k, phi_k), interpolated with a natural cubic
/// spline inside the table and extended by the declared tail beyond it.
/// Bounds and the tail block must be supplied explicitly.
inline FluxModel from_samples(std::vector<double> u, std::vector<double> phi,
                              double lipschitz_bound, double sup_bound, TailDescriptor tail,
                              double resolution = -1.0) {
  if (u.size() != phi.size() || u.size() < 3)
    throw validation_error("sampled flux: need >= 3 (u, phi) pairs of equal length");
  for (std::size_t k = 0; k + 1 < u.size(); ++k)
    if (!(u[k] < u[k + 1])) throw validation_error("sampled flux: u values must be increasing");
  if (u.front() != 0.0) throw validation_error("sampled flux: table must start at u = 0");

  // natural cubic spline second-derivative solve (tridiagonal)
  const std::size_t n = u.size();
  std::vector<double> h(n - 1), alpha(n, 0.0), l(n), mu(n), z(n), m(n);
  for (std::size_t k = 0; k + 1 < n; ++k) h[k] = u[k + 1] - u[k];
  for (std::size_t k = 1; k + 1 < n; ++k)
    alpha[k] = 6.0 * ((phi[k + 1] - phi[k]) / h[k] - (phi[k] - phi[k - 1]) / h[k - 1]);
  l[0] = 1.0;
  mu[0] = 0.0;
  z[0] = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    l[k] = 2.0 * (u[k + 1] - u[k - 1]) - h[k - 1] * mu[k - 1];
    mu[k] = h[k] / l[k];
    z[k] = (alpha[k] - h[k - 1] * z[k - 1]) / l[k];
  }
  l[n - 1] = 1.0;
  z[n - 1] = 0.0;
  m[n - 1] = 0.0;
  for (std::size_t k = n - 1; k-- > 0;) m[k] = z[k] - mu[k] * m[k + 1];

  auto spline = [u = std::move(u), phi = std::move(phi), h = std::move(h),
                 m = std::move(m)](double x) {
    if (x >= u.back()) return phi.back();
    const auto it = std::upper_bound(u.begin(), u.end(), x);
    std::size_t k = static_cast<std::size_t>(it - u.begin());
    if (k == 0) k = 1;
    const double a = u[k - 1], b = u[k];
    const double t1 = (b - x), t2 = (x - a), hk = h[k - 1];
    return (m[k - 1] * t1 * t1 * t1 + m[k] * t2 * t2 * t2) / (6.0 * hk) +
           (phi[k - 1] / hk - m[k - 1] * hk / 6.0) * t1 + (phi[k] / hk - m[k] * hk / 6.0) * t2;
  };
  return FluxModel("sampled_table", spline, lipschitz_bound, sup_bound, tail, resolution);
}

}  // namespace fluxes
}  // namespace mvsol

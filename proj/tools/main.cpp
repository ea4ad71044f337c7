// Command-line front end: simulate / riemann / verify / converge / oracle.
// Exit codes: 0 success, 2 configuration or usage error, 3 verification
// failure, 1 internal error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvsol/config.hpp"
#include "mvsol/evolution.hpp"
#include "mvsol/io.hpp"
#include "mvsol/oracle.hpp"
#include "mvsol/riemann.hpp"
#include "mvsol/verification.hpp"

namespace {

using json = nlohmann::json;
using namespace mvsol;

std::string resolve_preset(const std::string& name) {
  namespace fs = std::filesystem;
  std::vector<fs::path> roots;
  if (const char* env = std::getenv("MVSOL_PRESETS")) roots.emplace_back(env);
#ifdef MVSOL_PRESET_DIR
  roots.emplace_back(MVSOL_PRESET_DIR);
#endif
  for (const auto& root : roots) {
    for (const auto& candidate : {root / name, root / (name + ".cfg")})
      if (fs::exists(candidate)) return candidate.string();
  }
  throw validation_error("unknown preset '" + name + "'");
}

ParsedConfig load_config(const std::string& config_path, const std::string& preset,
                         const std::vector<std::string>& overrides) {
  if (config_path.empty() && preset.empty())
    throw validation_error("give --config FILE or --preset NAME");
  ParsedConfig cfg = ParsedConfig::from_file(config_path.empty() ? resolve_preset(preset)
                                                                 : config_path);
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    const auto dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw validation_error("--set expects section.key=value, got '" + ov + "'");
    cfg.set(ov.substr(0, dot), ov.substr(dot + 1, eq - dot - 1), ov.substr(eq + 1));
  }
  return cfg;
}

json fan_to_json(const WaveFan& fan) {
  json waves = json::array();
  for (const auto& w : fan.waves) {
    if (const auto* s = std::get_if<Shock>(&w)) {
      waves.push_back({{"type", "shock"},
                       {"left_state", s->left_state},
                       {"right_state", s->right_state},
                       {"speed", s->speed}});
    } else {
      const auto& r = std::get<Rarefaction>(w);
      waves.push_back({{"type", "rarefaction"},
                       {"left_state", r.left_state},
                       {"right_state", r.right_state},
                       {"speed_lo", r.speed_lo},
                       {"speed_hi", r.speed_hi}});
    }
  }
  return {{"far_left", fan.far_left},
          {"far_right", fan.far_right},
          {"left_truncated", fan.left_truncated},
          {"right_truncated", fan.right_truncated},
          {"waves", waves}};
}

int cmd_simulate(const std::string& config_path, const std::string& preset,
                 const std::vector<std::string>& overrides, const std::string& out_override) {
  ParsedConfig cfg = load_config(config_path, preset, overrides);
  SimulationSetup setup = load_simulation(cfg);
  for (const auto& w : setup.warnings) std::cerr << "warning: " << w << "\n";

  const auto t0 = std::chrono::steady_clock::now();
  Trajectory traj = run(setup.initial, setup.flux, setup.solver);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string dir = out_override.empty() ? setup.output_directory : out_override;
  const auto out = io::write_run_directory(dir, setup, traj, wall);
  std::printf("run complete: %zu steps, %zu snapshots -> %s\n", traj.dt_history.size(),
              traj.snapshots.size(), out.directory.c_str());
  for (const auto& rec : traj.ledger.atoms) {
    if (rec.extinction_time)
      std::printf("  atom at x=%g extinct at t=%.6g\n", rec.position, *rec.extinction_time);
    else if (!rec.mass.empty())
      std::printf("  atom at x=%g final mass %.6g\n", rec.position, rec.mass.back());
    if (rec.oscillating_flagged)
      std::printf("  note: trace fluxes at x=%g only bracketed (oscillating tail)\n",
                  rec.position);
  }
  return 0;
}

int cmd_riemann(const std::string& flux_type, double p, double ul, double ur, double atom_mass,
                const std::string& samples, double time, int n_samples) {
  ParsedConfig cfg = ParsedConfig::from_text("[flux]\ntype = " + flux_type +
                                             "\np = " + std::to_string(p) + "\n");
  const FluxModel flux = flux_from_config(cfg);
  json out;
  if (atom_mass > 0.0) {
    const auto sol = solve_modified_riemann(ul, ur, atom_mass, flux);
    out["kind"] = "modified";
    out["left_fan"] = fan_to_json(sol.left_fan);
    out["right_fan"] = fan_to_json(sol.right_fan);
    out["atom_decay_rate"] = sol.atom_decay_rate;
    out["tau_unit_mass"] = sol.tau;
    out["extinction_time"] = sol.extinction_time;
    out["h_minus"] = sol.h_minus;
    out["h_plus"] = sol.h_plus;
    if (sol.left_fan.right_truncated || sol.right_fan.left_truncated)
      out["truncated_at"] = sol.u_cap_used;
    if (!samples.empty()) {
      std::ofstream f(samples);
      f << "x,u_r\n";
      const double L = flux.lipschitz_bound();
      for (int i = 0; i <= n_samples; ++i) {
        const double x = (-1.2 + 2.4 * i / n_samples) * L * time;
        f << io::format_double(x) << ',' << io::format_double(sol.eval_regular(x, time)) << '\n';
      }
      out["samples_csv"] = samples;
    }
  } else {
    const auto fan = solve_standard_riemann(ul, ur, flux);
    out["kind"] = "standard";
    out["fan"] = fan_to_json(fan);
    if (!samples.empty()) {
      std::ofstream f(samples);
      f << "xi,u\n";
      const double L = flux.lipschitz_bound();
      for (int i = 0; i <= n_samples; ++i) {
        const double xi = -1.2 * L + 2.4 * L * i / n_samples;
        f << io::format_double(xi) << ',' << io::format_double(fan.eval(xi)) << '\n';
      }
      out["samples_csv"] = samples;
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

void print_entry(const CheckEntry& e) {
  std::printf("  %-22s %-6s residual %.4e  threshold %.4e  %s\n", e.name.c_str(),
              e.pass ? "PASS" : "FAIL", e.worst_residual, e.threshold, e.location.c_str());
}

int cmd_verify(const std::string& run_dir, const std::string& against,
               const std::string& report_path) {
  const auto loaded = io::load_run_directory(run_dir);
  const auto& setup = loaded.setup;
  const auto& traj = loaded.trajectory;

  VerificationReport report;
  std::vector<std::string> skipped;

  if (!traj.history.empty()) {
    const auto fam = TestFunctionFamily::lattice(setup.grid.x_lo, setup.grid.x_hi,
                                                 traj.history_times.back(), setup.verify.nx_test,
                                                 setup.verify.nt_test);
    const auto ks = default_k_grid(setup.flux, setup.solver.u_cap);
    report.entries.push_back(check_weak_form(traj, fam, setup.flux));
    for (auto& e : check_entropy(traj, fam, ks, setup.flux)) report.entries.push_back(e);
    for (std::size_t j = 0; j < traj.ledger.atoms.size(); ++j) {
      const auto& rec = traj.ledger.atoms[j];
      const double t_alive = rec.extinction_time.value_or(traj.history_times.back());
      const double w_hi = setup.verify.window_fraction * t_alive;
      if (w_hi <= setup.verify.window_lo) continue;
      auto res = check_compatibility(traj, static_cast<int>(j), ks, setup.verify.window_lo,
                                     w_hi, setup.flux);
      res.sign_conditions.name += "@x=" + std::to_string(rec.position);
      res.trace_fixed_point.name += "@x=" + std::to_string(rec.position);
      report.entries.push_back(res.sign_conditions);
      report.entries.push_back(res.trace_fixed_point);
    }
  } else {
    skipped.push_back("weak_form/entropy/compatibility (run has no dense history)");
  }

  if (!against.empty()) {
    const auto other = io::load_run_directory(against);
    const auto& tv = other.trajectory;
    if (!(traj.grid == tv.grid))
      throw validation_error("verify --against: runs live on different grids");

    std::vector<std::pair<double, double>> pairs;
    double first_ext = kInfinity;
    for (const auto& rec : traj.ledger.atoms)
      if (rec.extinction_time) first_ext = std::min(first_ext, *rec.extinction_time);
    for (const auto& rec : tv.ledger.atoms)
      if (rec.extinction_time) first_ext = std::min(first_ext, *rec.extinction_time);
    std::vector<double> times;
    for (const auto& s : traj.snapshots) {
      bool in_both = false;
      for (const auto& sv : tv.snapshots)
        if (std::abs(sv.time - s.time) < 1e-9) in_both = true;
      if (in_both && s.time > 0.0 && s.time <= first_ext) times.push_back(s.time);
    }
    for (std::size_t i = 0; i + 1 < times.size(); ++i) pairs.emplace_back(times[i], times[i + 1]);

    bool same_atoms = traj.ledger.atoms.size() == tv.ledger.atoms.size();
    for (std::size_t j = 0; same_atoms && j < traj.ledger.atoms.size(); ++j)
      same_atoms = traj.ledger.atoms[j].interface_index == tv.ledger.atoms[j].interface_index &&
                   std::abs(traj.ledger.atoms[j].initial_mass - tv.ledger.atoms[j].initial_mass) <
                       1e-14;
    if (same_atoms && !pairs.empty()) {
      const double right_end = traj.ledger.atoms.empty() ? setup.grid.x_hi
                                                         : traj.ledger.atoms.front().position;
      report.entries.push_back(
          check_contraction(traj, tv, setup.grid.x_lo, right_end, pairs, setup.flux));
    } else {
      skipped.push_back("l1_contraction (atom sets differ or no common snapshot pairs)");
    }
    if (leq(traj.snapshots.front(), tv.snapshots.front(), 1e-11)) {
      report.entries.push_back(check_comparison(traj, tv));
    } else {
      skipped.push_back("comparison (initial data not ordered)");
    }
  }

  std::printf("verification of %s%s%s\n", run_dir.c_str(), against.empty() ? "" : " against ",
              against.c_str());
  for (const auto& e : report.entries) print_entry(e);
  for (const auto& s : skipped) std::printf("  %-22s SKIP   %s\n", "-", s.c_str());

  json jr;
  jr["run"] = run_dir;
  if (!against.empty()) jr["against"] = against;
  jr["entries"] = json::array();
  for (const auto& e : report.entries)
    jr["entries"].push_back({{"name", e.name},
                             {"worst_residual", e.worst_residual},
                             {"threshold", e.threshold},
                             {"pass", e.pass},
                             {"location", e.location}});
  jr["skipped"] = skipped;
  jr["all_pass"] = report.all_pass();
  const std::string rp = report_path.empty() ? run_dir + "/report.json" : report_path;
  std::ofstream rf(rp);
  rf << jr.dump(2) << "\n";
  std::printf("report -> %s\n", rp.c_str());
  return report.all_pass() ? 0 : 3;
}

int cmd_converge(const std::string& config_path, const std::string& preset,
                 const std::vector<std::string>& overrides, const std::vector<int>& grids,
                 double window_lo, double window_hi) {
  ParsedConfig cfg = load_config(config_path, preset, overrides);
  // the study only compares at t_end; drop any stale snapshot schedule
  const double t_end = cfg.get_double("solver", "t_end", 1.0);
  cfg.set("solver", "snapshot_times", "[" + std::to_string(t_end) + "]");
  cfg.set("solver", "history_stride", "0");
  SimulationSetup setup = load_simulation(cfg);

  // closed-form oracles exist for the unit atom on the inverse-power flux and
  // for the plateau equilibrium; anything else has no reference to converge to
  StudyProblem prob{setup.grid.x_lo,
                    setup.grid.x_hi,
                    setup.flux,
                    initial_from_config(cfg, setup.solver.u_cap),
                    setup.solver,
                    nullptr,
                    nullptr,
                    window_lo,
                    window_hi};
  const auto& atoms = prob.initial.atoms;
  const bool pure_atom = !prob.initial.constant_value.has_value() ||
                         *prob.initial.constant_value == 0.0;
  if (setup.flux.name().rfind("inverse_power", 0) == 0 && atoms.size() == 1 &&
      atoms[0].first == 0.0 && atoms[0].second == 1.0 && pure_atom &&
      prob.initial.pw_values.empty() && prob.initial.table_u.empty()) {
    const double p = cfg.get_double("flux", "p", 1.0);
    const double T = setup.solver.t_end;
    auto sol = std::make_shared<ExampleSolution>(p, std::max(T, 1.0) + 1e-9);
    prob.oracle_regular = [sol](double x, double t) { return sol->regular(x, t); };
    prob.oracle_atom_mass = [](double t) { return std::max(1.0 - t, 0.0); };
  } else if (setup.flux.name().rfind("plateau", 0) == 0 && prob.initial.constant_value &&
             prob.initial.pw_values.empty()) {
    const double c = *prob.initial.constant_value;
    double atom_total = 0.0;
    for (const auto& [x, m] : atoms) atom_total += m;
    prob.oracle_regular = [c](double, double) { return c; };
    prob.oracle_atom_mass = [atom_total](double) { return atom_total; };
  } else {
    throw validation_error("converge: no closed-form reference for this configuration");
  }

  prob.solver.snapshot_times = {setup.solver.t_end};
  prob.solver.history_stride = 0;

  const auto rows = convergence_study(prob, grids);
  std::printf("%8s %14s %14s %10s %16s\n", "n_cells", "l1_error", "order", "", "atom_mass_err");
  json jr = json::array();
  for (const auto& r : rows) {
    std::printf("%8d %14.6e %14.3f %10s %16.6e\n", r.n_cells, r.l1_error, r.observed_order, "",
                r.atom_mass_error);
    jr.push_back({{"n_cells", r.n_cells},
                  {"l1_error", r.l1_error},
                  {"observed_order", r.observed_order},
                  {"atom_mass_error", r.atom_mass_error}});
  }
  std::cout << jr.dump(2) << "\n";
  return 0;
}

int cmd_oracle(double p, double t, const std::string& samples, double x_lo, double x_hi, int n) {
  const Grid grid(x_lo, x_hi, n);
  const ExampleSolution sol(p, std::max(t, 1.0) + (t > 1.0 ? 1e-9 : 0.0));
  std::ofstream f(samples);
  if (!f) throw std::runtime_error("cannot write " + samples);
  f << "x,u_r\n";
  for (int i = 0; i < n; ++i) {
    const double x = grid.cell_center(i);
    f << io::format_double(x) << ',' << io::format_double(sol.regular(x, t)) << '\n';
  }
  json out = {{"p", p}, {"t", t}, {"atom_mass", sol.atom_mass(t)}, {"samples_csv", samples}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"measure-valued conservation-law solver"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir;
  std::vector<std::string> overrides;
  auto* sim = app.add_subcommand("simulate", "run a configured problem");
  sim->add_option("--config", config_path, "config file");
  sim->add_option("--preset", preset, "named preset config");
  sim->add_option("--set", overrides, "override section.key=value");
  sim->add_option("--output", out_dir, "override output directory");

  std::string r_flux = "inverse_power", r_samples;
  double r_p = 1.0, r_ul = 0.0, r_ur = 0.0, r_mass = 0.0, r_time = 0.25;
  int r_n = 400;
  auto* rie = app.add_subcommand("riemann", "print a Riemann fan as JSON");
  rie->add_option("--flux", r_flux, "flux type (inverse_power, bump, monotone_tanh, plateau)");
  rie->add_option("--p", r_p, "flux parameter");
  rie->add_option("--ul", r_ul, "left state")->required();
  rie->add_option("--ur", r_ur, "right state")->required();
  rie->add_option("--atom-mass", r_mass, "interface atom mass (0 = standard problem)");
  rie->add_option("--samples", r_samples, "sample the fan to this CSV");
  rie->add_option("--time", r_time, "sampling time for the modified problem");
  rie->add_option("--n", r_n, "number of samples");

  std::string v_run, v_against, v_report;
  auto* ver = app.add_subcommand("verify", "residual checks on a finished run");
  ver->add_option("--run", v_run, "run directory")->required();
  ver->add_option("--against", v_against, "second run directory for cross checks");
  ver->add_option("--report", v_report, "report JSON path");

  std::vector<int> c_grids{100, 200, 400};
  double c_wlo = 0.05, c_whi = 3.0;
  std::string c_config, c_preset;
  std::vector<std::string> c_overrides;
  auto* conv = app.add_subcommand("converge", "grid-refinement study against the oracle");
  conv->add_option("--config", c_config, "config file");
  conv->add_option("--preset", c_preset, "named preset config");
  conv->add_option("--set", c_overrides, "override section.key=value");
  conv->add_option("--grids", c_grids, "cell counts");
  conv->add_option("--window-lo", c_wlo, "error window left edge");
  conv->add_option("--window-hi", c_whi, "error window right edge");

  double o_p = 1.0, o_t = 0.5, o_xlo = -1.0, o_xhi = 3.0;
  int o_n = 400;
  std::string o_samples;
  auto* ora = app.add_subcommand("oracle", "closed-form reference snapshot");
  ora->add_option("--p", o_p, "flux exponent");
  ora->add_option("--t", o_t, "time")->required();
  ora->add_option("--samples", o_samples, "output CSV")->required();
  ora->add_option("--x-lo", o_xlo, "window left edge");
  ora->add_option("--x-hi", o_xhi, "window right edge");
  ora->add_option("--n", o_n, "number of cells");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, preset, overrides, out_dir);
    if (rie->parsed()) return cmd_riemann(r_flux, r_p, r_ul, r_ur, r_mass, r_samples, r_time, r_n);
    if (ver->parsed()) return cmd_verify(v_run, v_against, v_report);
    if (conv->parsed()) return cmd_converge(c_config, c_preset, c_overrides, c_grids, c_wlo, c_whi);
    if (ora->parsed()) return cmd_oracle(o_p, o_t, o_samples, o_xlo, o_xhi, o_n);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

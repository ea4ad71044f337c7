#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvsol/common.hpp"
#include "mvsol/config.hpp"
#include "mvsol/evolution.hpp"
#include "mvsol/measure_state.hpp"

namespace mvsol::io {

using json = nlohmann::json;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_snapshot_csv(const std::string& path, const MeasureState& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << "x,u_r\n";
  for (int i = 0; i < s.grid.n_cells; ++i)
    out << format_double(s.grid.cell_center(i)) << ',' << format_double(s.regular[i]) << '\n';
}

inline void write_atoms_csv(const std::string& path, const AtomLedger& ledger) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << "t,atom_index,position,mass\n";
  for (std::size_t j = 0; j < ledger.atoms.size(); ++j) {
    const auto& rec = ledger.atoms[j];
    out << format_double(0.0) << ',' << j << ',' << format_double(rec.position) << ','
        << format_double(rec.initial_mass) << '\n';
    for (std::size_t k = 0; k < rec.times.size(); ++k)
      out << format_double(rec.times[k]) << ',' << j << ',' << format_double(rec.position) << ','
          << format_double(rec.mass[k]) << '\n';
  }
}

inline void write_fluxes_csv(const std::string& path, const AtomLedger& ledger) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << "t,atom_index,h_minus,h_plus\n";
  for (std::size_t j = 0; j < ledger.atoms.size(); ++j) {
    const auto& rec = ledger.atoms[j];
    for (std::size_t k = 0; k < rec.times.size(); ++k)
      out << format_double(rec.times[k]) << ',' << j << ',' << format_double(rec.h_minus[k])
          << ',' << format_double(rec.h_plus[k]) << '\n';
  }
}

inline void write_history_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << "t";
  for (int i = 0; i < traj.grid.n_cells; ++i) out << ",u_" << i;
  out << '\n';
  for (std::size_t k = 0; k < traj.history_times.size(); ++k) {
    out << format_double(traj.history_times[k]);
    for (double v : traj.history[k]) out << ',' << format_double(v);
    out << '\n';
  }
}

struct RunOutput {
  std::string directory;
  std::vector<std::pair<double, std::string>> snapshots;  // (time, filename)
  std::string atoms_path;
  std::string fluxes_path;
  std::optional<std::string> history_path;
  std::string manifest_path;
};

/// Writes the full run directory: snapshot CSVs, atom ledger + trace fluxes,
/// optional dense history, and a manifest describing all of it.
inline RunOutput write_run_directory(const std::string& dir, const SimulationSetup& setup,
                                     const Trajectory& traj, double wall_seconds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  RunOutput out;
  out.directory = dir;

  json snap_index = json::array();
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    char name[64];
    std::snprintf(name, sizeof(name), "snapshot_%04zu.csv", s);
    const std::string path = dir + "/" + name;
    write_snapshot_csv(path, traj.snapshots[s]);
    out.snapshots.emplace_back(traj.snapshots[s].time, name);
    snap_index.push_back({{"time", traj.snapshots[s].time}, {"file", name}});
  }
  out.atoms_path = dir + "/atoms.csv";
  write_atoms_csv(out.atoms_path, traj.ledger);
  out.fluxes_path = dir + "/ledger_fluxes.csv";
  write_fluxes_csv(out.fluxes_path, traj.ledger);
  if (!traj.history.empty()) {
    out.history_path = dir + "/history.csv";
    write_history_csv(*out.history_path, traj);
  }

  json manifest;
  manifest["format_version"] = 1;
  manifest["mvsol_version"] = "1.0.0";
  manifest["config_text"] = setup.config.serialize();
  manifest["config_source_text"] = setup.config.raw_text();
  manifest["grid"] = {{"x_lo", setup.grid.x_lo},
                      {"x_hi", setup.grid.x_hi},
                      {"n_cells", setup.grid.n_cells},
                      {"dx", setup.grid.dx}};
  manifest["flux"] = {{"name", setup.flux.name()},
                      {"lipschitz_bound", setup.flux.lipschitz_bound()},
                      {"sup_bound", setup.flux.sup_bound()},
                      {"u_tail", setup.flux.u_tail()},
                      {"search_resolution", setup.flux.search_resolution()}};
  manifest["solver"] = {
      {"cfl", setup.solver.cfl},
      {"t_end", setup.solver.t_end},
      {"u_cap", setup.solver.u_cap},
      {"phantom_mode", std::holds_alternative<ExactTail>(setup.solver.phantom_mode)
                           ? json("exact_tail")
                           : json(std::get<FinitePhantom>(setup.solver.phantom_mode).M)},
      {"steps", traj.dt_history.size()}};
  manifest["snapshots"] = snap_index;
  manifest["atoms_csv"] = "atoms.csv";
  manifest["ledger_fluxes_csv"] = "ledger_fluxes.csv";
  if (out.history_path) manifest["history_csv"] = "history.csv";
  manifest["dt_min"] = traj.dt_history.empty()
                           ? 0.0
                           : *std::min_element(traj.dt_history.begin(), traj.dt_history.end());
  manifest["dt_max"] = traj.dt_history.empty()
                           ? 0.0
                           : *std::max_element(traj.dt_history.begin(), traj.dt_history.end());
  manifest["dt_history"] = traj.dt_history;
  manifest["max_conservation_residual"] = traj.max_conservation_residual;
  manifest["initial_mass"] = traj.initial_mass;
  json atoms = json::array();
  for (const auto& rec : traj.ledger.atoms) {
    json a = {{"interface_index", rec.interface_index},
              {"position", rec.position},
              {"initial_mass", rec.initial_mass},
              {"oscillating_bracket_flagged", rec.oscillating_flagged}};
    if (rec.extinction_time) {
      a["extinction_time"] = *rec.extinction_time;
      // event splitting resolves the time to one step; the trace fluxes carry
      // an O(dx) bias, so the reported bar combines both
      const double dt_max = manifest["dt_max"].get<double>();
      a["extinction_time_error_estimate"] = dt_max + setup.grid.dx;
    }
    atoms.push_back(a);
  }
  manifest["atom_summary"] = atoms;
  manifest["wall_seconds"] = wall_seconds;

  out.manifest_path = dir + "/manifest.json";
  std::ofstream mout(out.manifest_path);
  mout << manifest.dump(2) << '\n';
  mout.close();

  // a manifest that lists a missing or empty artifact is a bug
  for (const auto& [t, name] : out.snapshots) {
    (void)t;
    const auto p = fs::path(dir) / name;
    if (!fs::exists(p) || fs::file_size(p) == 0)
      throw std::logic_error("io: manifest lists missing/empty file " + name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reading a run directory back (verify / comparison tooling)
// ---------------------------------------------------------------------------

struct LoadedRun {
  SimulationSetup setup;
  Trajectory trajectory;
};

inline std::vector<std::vector<double>> read_csv_numeric(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("io: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Rebuilds a Trajectory (and the originating setup) from a run directory.
inline LoadedRun load_run_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream min(dir + "/manifest.json");
  if (!min) throw validation_error("io: no manifest.json in " + dir);
  json manifest;
  min >> manifest;

  ParsedConfig cfg = ParsedConfig::from_text(manifest["config_text"].get<std::string>());
  SimulationSetup setup = load_simulation(cfg);

  Trajectory traj;
  traj.grid = setup.grid;
  traj.t_end = setup.solver.t_end;
  traj.initial_mass = manifest["initial_mass"].get<double>();
  traj.max_conservation_residual = manifest["max_conservation_residual"].get<double>();

  for (const auto& s : manifest["snapshots"]) {
    const auto rows = read_csv_numeric(dir + "/" + s["file"].get<std::string>());
    MeasureState st(setup.grid);
    st.time = s["time"].get<double>();
    if (rows.size() != static_cast<std::size_t>(setup.grid.n_cells))
      throw validation_error("io: snapshot size mismatch in " + dir);
    for (std::size_t i = 0; i < rows.size(); ++i) st.regular[i] = rows[i][1];
    traj.snapshots.push_back(std::move(st));
  }

  // ledger: atoms.csv rows (t, index, position, mass) + flux rows
  traj.ledger = AtomLedger{};
  {
    const auto rows = read_csv_numeric(dir + "/" + manifest["atoms_csv"].get<std::string>());
    for (const auto& r : rows) {
      const std::size_t j = static_cast<std::size_t>(r[1]);
      while (traj.ledger.atoms.size() <= j) traj.ledger.atoms.emplace_back();
      auto& rec = traj.ledger.atoms[j];
      rec.position = r[2];
      rec.interface_index = setup.grid.nearest_interface(r[2]);
      if (r[0] == 0.0) {
        rec.initial_mass = r[3];
      } else {
        rec.times.push_back(r[0]);
        rec.mass.push_back(r[3]);
      }
    }
    const auto frows =
        read_csv_numeric(dir + "/" + manifest["ledger_fluxes_csv"].get<std::string>());
    for (const auto& r : frows) {
      auto& rec = traj.ledger.atoms.at(static_cast<std::size_t>(r[1]));
      rec.h_minus.push_back(r[2]);
      rec.h_plus.push_back(r[3]);
    }
    const auto& summary = manifest["atom_summary"];
    for (std::size_t j = 0; j < summary.size() && j < traj.ledger.atoms.size(); ++j) {
      if (summary[j].contains("extinction_time"))
        traj.ledger.atoms[j].extinction_time = summary[j]["extinction_time"].get<double>();
      traj.ledger.atoms[j].oscillating_flagged =
          summary[j].value("oscillating_bracket_flagged", false);
    }
  }

  if (manifest.contains("history_csv")) {
    const auto rows = read_csv_numeric(dir + "/" + manifest["history_csv"].get<std::string>());
    for (const auto& r : rows) {
      traj.history_times.push_back(r[0]);
      traj.history.emplace_back(r.begin() + 1, r.end());
    }
  }
  // atom state at the end, for snapshot-based checks
  for (auto& snap : traj.snapshots) {
    for (const auto& rec : traj.ledger.atoms) {
      Atom a;
      a.interface_index = rec.interface_index;
      a.position = rec.position;
      a.mass = rec.mass_at(snap.time);
      a.alive = a.mass > 0.0;
      a.extinction_time = rec.extinction_time;
      snap.atoms.push_back(a);
    }
  }
  return LoadedRun{std::move(setup), std::move(traj)};
}

}  // namespace mvsol::io

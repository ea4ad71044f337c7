#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mvsol/common.hpp"
#include "mvsol/evolution.hpp"
#include "mvsol/flux_model.hpp"
#include "mvsol/measure_state.hpp"

namespace mvsol {

/// INI-style config: [section] headers, key = value lines, # or ; comments.
/// Values are scalars, quoted strings, or bracketed numeric arrays. Repeated
/// keys are kept in order (used for atoms).
class ParsedConfig {
 public:
  using Entry = std::pair<std::string, std::string>;

  static ParsedConfig from_text(const std::string& text) {
    ParsedConfig cfg;
    cfg.raw_ = text;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw validation_error("config line " + std::to_string(lineno) + ": bad section header");
        section = trim(line.substr(1, line.size() - 2));
        cfg.sections_[section];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw validation_error("config line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (section.empty())
        throw validation_error("config line " + std::to_string(lineno) + ": key outside a section");
      cfg.sections_[section].emplace_back(std::move(key), std::move(value));
    }
    return cfg;
  }

  static ParsedConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
  }

  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
  bool has(const std::string& s, const std::string& k) const { return find(s, k) != nullptr; }

  std::string get_string(const std::string& s, const std::string& k) const {
    const std::string* v = find(s, k);
    if (!v) throw validation_error("config: missing " + s + "." + k);
    return unquote(*v);
  }
  std::string get_string(const std::string& s, const std::string& k,
                         const std::string& fallback) const {
    const std::string* v = find(s, k);
    return v ? unquote(*v) : fallback;
  }
  double get_double(const std::string& s, const std::string& k) const {
    return parse_double(get_string(s, k), s + "." + k);
  }
  double get_double(const std::string& s, const std::string& k, double fallback) const {
    const std::string* v = find(s, k);
    return v ? parse_double(unquote(*v), s + "." + k) : fallback;
  }
  int get_int(const std::string& s, const std::string& k) const {
    const double d = get_double(s, k);
    return static_cast<int>(std::lround(d));
  }
  int get_int(const std::string& s, const std::string& k, int fallback) const {
    const std::string* v = find(s, k);
    return v ? static_cast<int>(std::lround(parse_double(unquote(*v), s + "." + k))) : fallback;
  }
  std::vector<double> get_array(const std::string& s, const std::string& k) const {
    const std::string* v = find(s, k);
    if (!v) throw validation_error("config: missing " + s + "." + k);
    return parse_array(*v, s + "." + k);
  }
  std::vector<double> get_array(const std::string& s, const std::string& k,
                                std::vector<double> fallback) const {
    const std::string* v = find(s, k);
    return v ? parse_array(*v, s + "." + k) : std::move(fallback);
  }
  /// All values bound to a repeated key, in file order.
  std::vector<std::vector<double>> get_repeated_arrays(const std::string& s,
                                                       const std::string& k) const {
    std::vector<std::vector<double>> out;
    auto it = sections_.find(s);
    if (it == sections_.end()) return out;
    for (const auto& [key, value] : it->second)
      if (key == k) out.push_back(parse_array(value, s + "." + k));
    return out;
  }

  void set(const std::string& s, const std::string& k, const std::string& v) {
    auto& entries = sections_[s];
    for (auto& [key, value] : entries) {
      if (key == k) {
        value = v;
        return;
      }
    }
    entries.emplace_back(k, v);
  }

  const std::string& raw_text() const { return raw_; }
  const std::map<std::string, std::vector<Entry>>& sections() const { return sections_; }

  /// Canonical re-serialization (overrides included, comments dropped).
  std::string serialize() const {
    std::ostringstream out;
    for (const auto& [section, entries] : sections_) {
      out << '[' << section << "]\n";
      for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
      out << '\n';
    }
    return out.str();
  }

  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

 private:
  const std::string* find(const std::string& s, const std::string& k) const {
    auto it = sections_.find(s);
    if (it == sections_.end()) return nullptr;
    const std::string* last = nullptr;
    for (const auto& [key, value] : it->second)
      if (key == k) last = &value;
    return last;
  }
  static std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
      return s.substr(1, s.size() - 2);
    return s;
  }
  static double parse_double(const std::string& s, const std::string& where) {
    if (s == "inf") return kInfinity;
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw validation_error("config: cannot parse number '" + s + "' for " + where);
    }
  }
  static std::vector<double> parse_array(const std::string& s, const std::string& where) {
    std::string body = trim(s);
    if (!body.empty() && body.front() == '[' && body.back() == ']')
      body = body.substr(1, body.size() - 2);
    std::vector<double> out;
    std::string token;
    std::istringstream in(body);
    while (std::getline(in, token, ',')) {
      token = trim(token);
      if (token.empty()) continue;
      out.push_back(parse_double(token, where));
    }
    return out;
  }

  std::map<std::string, std::vector<Entry>> sections_;
  std::string raw_;
};

// ---------------------------------------------------------------------------
// Config -> simulation objects
// ---------------------------------------------------------------------------

inline FluxModel flux_from_config(const ParsedConfig& cfg) {
  const std::string type = cfg.get_string("flux", "type");
  const double res = cfg.get_double("flux", "search_resolution", -1.0);
  if (type == "inverse_power") {
    const double p = cfg.get_double("flux", "p", 1.0);
    return fluxes::inverse_power(p, cfg.get_double("flux", "u_tail", 100.0), res);
  }
  if (type == "bump") return fluxes::bump(cfg.get_double("flux", "u_tail", 10.0), res);
  if (type == "monotone_tanh")
    return fluxes::monotone_tanh(cfg.get_double("flux", "u_tail", 20.0), res);
  if (type == "plateau")
    return fluxes::plateau(cfg.get_double("flux", "k_plateau", 1.0),
                           cfg.get_double("flux", "c0", 1.0), res);
  if (type == "oscillating")
    return fluxes::oscillating(cfg.get_double("flux", "u_tail", 50.0), res);
  if (type == "table") {
    auto u = cfg.get_array("flux", "u");
    auto phi = cfg.get_array("flux", "phi");
    const double lip = cfg.get_double("flux", "lipschitz_bound");
    const double sup = cfg.get_double("flux", "sup_bound");
    const std::string tail_kind = cfg.get_string("flux", "tail");
    const double u_tail = cfg.get_double("flux", "u_tail");
    TailDescriptor tail = AsymptoticLimit{0.0, u_tail};
    if (tail_kind == "asymptotic")
      tail = AsymptoticLimit{cfg.get_double("flux", "phi_inf"), u_tail};
    else if (tail_kind == "oscillating")
      tail = OscillatingTail{cfg.get_double("flux", "liminf"), cfg.get_double("flux", "limsup"),
                             u_tail};
    else
      throw validation_error("config: flux.tail must be 'asymptotic' or 'oscillating'");
    return fluxes::from_samples(std::move(u), std::move(phi), lip, sup, tail, res);
  }
  throw validation_error("config: unknown flux.type '" + type + "'");
}

inline Grid grid_from_config(const ParsedConfig& cfg) {
  return Grid(cfg.get_double("grid", "x_lo"), cfg.get_double("grid", "x_hi"),
              cfg.get_int("grid", "n_cells"));
}

inline InitialSpec initial_from_config(const ParsedConfig& cfg, double u_cap) {
  InitialSpec spec;
  spec.u_cap = u_cap;
  if (cfg.has("initial", "u0r")) spec.constant_value = cfg.get_double("initial", "u0r");
  if (cfg.has("initial", "u0r_breaks")) {
    spec.pw_breaks = cfg.get_array("initial", "u0r_breaks");
    spec.pw_values = cfg.get_array("initial", "u0r_values");
  }
  if (cfg.has("initial", "u0r_x")) {
    spec.table_x = cfg.get_array("initial", "u0r_x");
    spec.table_u = cfg.get_array("initial", "u0r_samples");
  }
  if (!spec.constant_value && spec.pw_values.empty() && spec.table_u.empty())
    spec.constant_value = 0.0;
  for (const auto& pair : cfg.get_repeated_arrays("initial", "atom")) {
    if (pair.size() != 2)
      throw validation_error("config: initial.atom must be [position, mass]");
    spec.atoms.emplace_back(pair[0], pair[1]);
  }
  return spec;
}

inline SolverConfig solver_from_config(const ParsedConfig& cfg) {
  SolverConfig sc;
  sc.cfl = cfg.get_double("solver", "cfl", 0.45);
  sc.u_cap = cfg.get_double("solver", "u_cap", 1e6);
  sc.t_end = cfg.get_double("solver", "t_end", 1.0);
  sc.snapshot_times = cfg.get_array("solver", "snapshot_times", {});
  sc.history_stride = cfg.get_int("solver", "history_stride", 0);
  const std::string mode = cfg.get_string("solver", "phantom_mode", "exact_tail");
  if (mode == "exact_tail") {
    sc.phantom_mode = ExactTail{};
  } else if (mode == "phantom") {
    sc.phantom_mode = FinitePhantom{cfg.get_double("solver", "phantom_value", 1e7)};
  } else {
    throw validation_error("config: solver.phantom_mode must be 'exact_tail' or 'phantom'");
  }
  std::sort(sc.snapshot_times.begin(), sc.snapshot_times.end());
  sc.snapshot_times.erase(std::unique(sc.snapshot_times.begin(), sc.snapshot_times.end()),
                          sc.snapshot_times.end());
  return sc;
}

struct VerifySettings {
  int nx_test = 5;
  int nt_test = 5;
  int n_k = 16;
  double window_lo = 0.1;
  double window_fraction = 0.8;  // of min(extinction, t_end)
};

inline VerifySettings verify_from_config(const ParsedConfig& cfg) {
  VerifySettings vs;
  vs.nx_test = cfg.get_int("verify", "nx_test", 5);
  vs.nt_test = cfg.get_int("verify", "nt_test", 5);
  vs.n_k = cfg.get_int("verify", "n_k", 16);
  vs.window_lo = cfg.get_double("verify", "window_lo", 0.1);
  vs.window_fraction = cfg.get_double("verify", "window_fraction", 0.8);
  return vs;
}

/// Everything a run needs, assembled and validated from one config file.
struct SimulationSetup {
  Grid grid;
  FluxModel flux;
  MeasureState initial;
  SolverConfig solver;
  VerifySettings verify;
  std::string output_directory;
  std::vector<std::string> warnings;
  ParsedConfig config;
};

inline SimulationSetup load_simulation(const ParsedConfig& cfg) {
  Grid grid = grid_from_config(cfg);
  FluxModel flux = flux_from_config(cfg);
  SolverConfig solver = solver_from_config(cfg);
  solver.validate(flux);
  InitialSpec ispec = initial_from_config(cfg, solver.u_cap);
  auto init = from_config(ispec, grid);
  return SimulationSetup{std::move(grid),
                         std::move(flux),
                         std::move(init.state),
                         std::move(solver),
                         verify_from_config(cfg),
                         cfg.get_string("output", "directory", "run_output"),
                         std::move(init.warnings),
                         cfg};
}

}  // namespace mvsol

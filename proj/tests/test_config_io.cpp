#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "mvsol/config.hpp"
#include "mvsol/io.hpp"

using namespace mvsol;
using Catch::Approx;

namespace {
const std::string kMinimalConfig = R"(
# comment
[grid]
x_lo = -1.0
x_hi = 3.0
n_cells = 100

[flux]
type = inverse_power
p = 1.0

[initial]
u0r = 0.0
atom = [0.0, 1.0]

[solver]
t_end = 0.25
snapshot_times = [0.0, 0.25]
history_stride = 1

[output]
directory = runs/minimal
)";
}  // namespace

TEST_CASE("config parsing: sections, arrays, repeated keys", "[config]") {
  const auto cfg = ParsedConfig::from_text(kMinimalConfig);
  CHECK(cfg.get_double("grid", "x_lo") == -1.0);
  CHECK(cfg.get_int("grid", "n_cells") == 100);
  CHECK(cfg.get_string("flux", "type") == "inverse_power");
  CHECK(cfg.get_array("solver", "snapshot_times") == std::vector<double>{0.0, 0.25});
  CHECK(cfg.get_double("solver", "cfl", 0.45) == 0.45);  // fallback
  CHECK(cfg.get_repeated_arrays("initial", "atom").size() == 1);

  CHECK_THROWS_AS(ParsedConfig::from_text("key = 1\n"), validation_error);   // outside section
  CHECK_THROWS_AS(ParsedConfig::from_text("[a\nk = 1\n"), validation_error); // bad header
  CHECK_THROWS_AS(cfg.get_double("grid", "missing"), validation_error);
  CHECK_THROWS_AS(ParsedConfig::from_text("[a]\nx = zz\n").get_double("a", "x"),
                  validation_error);
}

TEST_CASE("simulation setup from config", "[config]") {
  auto setup = load_simulation(ParsedConfig::from_text(kMinimalConfig));
  CHECK(setup.grid.n_cells == 100);
  CHECK(setup.flux.name().rfind("inverse_power", 0) == 0);
  CHECK(setup.initial.atoms.size() == 1);
  CHECK(setup.solver.t_end == 0.25);
  CHECK(setup.output_directory == "runs/minimal");

  auto bad = ParsedConfig::from_text(kMinimalConfig);
  bad.set("initial", "atom", "[0.0, -1.0]");
  CHECK_THROWS_AS(load_simulation(bad), validation_error);

  auto badflux = ParsedConfig::from_text(kMinimalConfig);
  badflux.set("flux", "type", "nonsense");
  CHECK_THROWS_AS(load_simulation(badflux), validation_error);
}

TEST_CASE("run directory round trip", "[io]") {
  namespace fs = std::filesystem;
  const auto tmp = fs::temp_directory_path() / "mvsol_io_test";
  fs::remove_all(tmp);

  auto setup = load_simulation(ParsedConfig::from_text(kMinimalConfig));
  auto traj = run(setup.initial, setup.flux, setup.solver);
  const auto out = io::write_run_directory(tmp.string(), setup, traj, 0.0);
  CHECK(fs::exists(out.manifest_path));
  CHECK(out.snapshots.size() == traj.snapshots.size());

  const auto loaded = io::load_run_directory(tmp.string());
  CHECK(loaded.trajectory.snapshots.size() == traj.snapshots.size());
  REQUIRE(loaded.trajectory.history.size() == traj.history.size());
  for (std::size_t k = 0; k < traj.history.size(); ++k)
    for (std::size_t i = 0; i < traj.history[k].size(); ++i)
      CHECK(loaded.trajectory.history[k][i] == traj.history[k][i]);  // %.17g is lossless
  REQUIRE(loaded.trajectory.ledger.atoms.size() == 1);
  CHECK(loaded.trajectory.ledger.atoms[0].initial_mass == 1.0);
  CHECK(loaded.trajectory.ledger.atoms[0].h_plus.size() ==
        traj.ledger.atoms[0].h_plus.size());
  fs::remove_all(tmp);
}

TEST_CASE("identical configs produce byte-identical CSV output", "[io]") {
  namespace fs = std::filesystem;
  const auto tmp1 = fs::temp_directory_path() / "mvsol_det_1";
  const auto tmp2 = fs::temp_directory_path() / "mvsol_det_2";
  fs::remove_all(tmp1);
  fs::remove_all(tmp2);

  auto setup = load_simulation(ParsedConfig::from_text(kMinimalConfig));
  auto t1 = run(setup.initial, setup.flux, setup.solver);
  auto t2 = run(setup.initial, setup.flux, setup.solver);
  io::write_run_directory(tmp1.string(), setup, t1, 0.0);
  io::write_run_directory(tmp2.string(), setup, t2, 0.0);

  for (const auto* name : {"snapshot_0000.csv", "snapshot_0001.csv", "atoms.csv",
                           "ledger_fluxes.csv", "history.csv"}) {
    std::ifstream a(tmp1 / name), b(tmp2 / name);
    REQUIRE(a.good());
    REQUIRE(b.good());
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
  }
  fs::remove_all(tmp1);
  fs::remove_all(tmp2);
}

TEST_CASE("sampled-table flux from config", "[config]") {
  std::string text = "[flux]\ntype = table\nu = [";
  std::string phi = "phi = [";
  for (int i = 0; i <= 40; ++i) {
    const double u = i * 0.5;
    text += (i ? ", " : "") + std::to_string(u);
    phi += (i ? ", " : "") + std::to_string(u / (1.0 + u));
  }
  text += "]\n" + phi + "]\n";
  text += "lipschitz_bound = 1.0\nsup_bound = 1.0\ntail = asymptotic\nphi_inf = 0.952\n";
  text += "u_tail = 20.0\n";
  const auto flux = flux_from_config(ParsedConfig::from_text(text));
  CHECK(flux.eval(2.0) == Approx(2.0 / 3.0).margin(1e-5));
  CHECK(flux.godunov_flux(kInfinity, 0.0) == Approx(0.952).margin(1e-3));
}

TEST_CASE("preset configs load cleanly", "[config]") {
  namespace fs = std::filesystem;
  for (const auto& entry : fs::directory_iterator(MVSOL_PRESET_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    INFO(entry.path().string());
    auto setup = load_simulation(ParsedConfig::from_file(entry.path().string()));
    CHECK(setup.grid.n_cells >= 1);
  }
}

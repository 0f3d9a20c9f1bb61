#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tan/bench.hpp"
#include "tan/errors.hpp"
#include "tan/runner.hpp"
#include "tan/scan.hpp"
#include "tan/scenario.hpp"
#include "tan/terrain.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// rows x cols grid with rows the largest divisor of m not above sqrt(m).
std::pair<int, int> grid_for(int m) {
  int rows = 1;
  for (int r = 1; r * r <= m; ++r) {
    if (m % r == 0) rows = r;
  }
  return {rows, m / rows};
}

int cmd_run(const std::string& scenario, std::optional<std::uint64_t> seed, std::optional<int> particles,
            const std::string& out) {
  tanav::ScenarioConfig cfg = tanav::load_scenario(scenario);
  if (seed) cfg.seed = *seed;
  if (particles) cfg.particles = *particles;
  tanav::validate(cfg);
  const tanav::RunResult r = tanav::run_scenario(cfg);
  tanav::write_run_outputs(r, out);
  const auto& q = r.rmse;
  std::cout << cfg.id << " seed " << cfg.seed << ": " << r.stats.measurement_steps << " steps, rmse (" << q.rmse.x()
            << ", " << q.rmse.y() << ", " << q.rmse.z() << ") m, last quarter (" << q.rmse_last_quarter.x() << ", "
            << q.rmse_last_quarter.y() << ", " << q.rmse_last_quarter.z() << ") m, " << r.stats.wall_seconds << " s\n";
  if (r.stats.hygiene_violations > 0) {
    std::cerr << "filter hygiene violations: " << r.stats.hygiene_violations << " (" << r.stats.first_violation
              << ")\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_bench(int particles, int points, const std::vector<std::string>& methods, const std::string& out,
              int steps, const std::string& kind, double altitude, std::uint64_t seed) {
  if (particles < 1 || points < 1 || steps < 1) throw tanav::ConfigError("particles, points and steps must be >= 1");
  tanav::BenchOptions opt;
  opt.altitude_agl = altitude;
  opt.seed = seed;
  if (!methods.empty()) {
    opt.methods.clear();
    for (const std::string& m : methods) {
      try {
        opt.methods.push_back(tanav::bench_method_from_string(m));
      } catch (const tanav::ValueError& e) {
        throw tanav::ConfigError(e.what());
      }
    }
  }
  tanav::TerrainKind tk;
  tk.tag = tanav::terrain_tag_from_string(kind);
  if (tk.tag == tanav::TerrainTag::flat) tk.base_elevation = 50.0;
  const tanav::DemGrid dem = tanav::synth_terrain(tk);
  const auto [rows, cols] = grid_for(points);
  const tanav::ScanPattern pattern = tanav::make_scan_pattern(rows, cols, 20.0);
  const auto result = tanav::bench_predictors(dem, pattern, static_cast<std::size_t>(particles),
                                            static_cast<std::size_t>(steps), opt);
  std::filesystem::create_directories(out);
  std::ofstream f(std::filesystem::path(out) / "bench.csv", std::ios::binary);
  if (!f) throw tanav::Error("cannot write bench.csv in " + out);
  tanav::write_bench_csv(result, f);
  tanav::write_bench_csv(result, std::cout);
  return 0;
}

int cmd_dem_synth(const std::string& kind, std::uint64_t seed, const std::string& out, double extent, double cell) {
  tanav::TerrainKind tk;
  try {
    tk.tag = tanav::terrain_tag_from_string(kind);
  } catch (const tanav::ValueError& e) {
    throw tanav::ConfigError(e.what());
  }
  tk.seed = seed;
  tk.extent = extent;
  if (tk.tag == tanav::TerrainTag::flat) tk.base_elevation = 50.0;
  if (!(cell > 0.0) || !(extent >= 2.0 * cell)) throw tanav::ConfigError("extent must span at least two cells");
  tanav::save_ascii_grid(tanav::synth_terrain(tk, cell), out);
  return 0;
}

int cmd_dem_info(const std::string& path) {
  const tanav::DemGrid dem = tanav::load_ascii_grid(path);
  const tanav::DemStats s = tanav::dem_stats(dem);
  std::cout << "ncols " << dem.n_cols << "\nnrows " << dem.n_rows << "\ncellsize " << dem.cell << "\nxllcorner "
            << dem.x_origin << "\nyllcorner " << dem.y_origin << "\nextent " << dem.extent_x() << " x "
            << dem.extent_y() << "\nmin " << s.min << "\nmax " << s.max << "\nmean " << s.mean << "\nnodata "
            << s.nodata_count << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Terrain-aided navigation simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write trace.csv and report.json");
  std::string scenario, run_out;
  std::optional<std::uint64_t> seed;
  std::optional<int> particles;
  run->add_option("--scenario", scenario, "Preset id (S1..S12) or JSON scenario file")->required();
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--particles", particles, "Override the particle count");
  run->add_option("--out", run_out, "Output directory")->required();

  auto* bench = app.add_subcommand("bench", "Time the point-cloud predictors");
  int b_particles = 500, b_points = 16, b_steps = 20;
  double b_altitude = 1000.0;
  std::uint64_t b_seed = 1;
  std::string b_kind = "rugged", b_out;
  std::vector<std::string> b_methods;
  bench->add_option("--particles", b_particles, "Particles per prediction")->capture_default_str();
  bench->add_option("--points", b_points, "Points per cloud")->capture_default_str();
  bench->add_option("--methods", b_methods, "raycast-triangles, raycast-bisection, sliding")->delimiter(',');
  bench->add_option("--steps", b_steps, "Timed steps per method")->capture_default_str();
  bench->add_option("--kind", b_kind, "Terrain kind")->capture_default_str();
  bench->add_option("--altitude", b_altitude, "Sensor height above ground, m")->capture_default_str();
  bench->add_option("--seed", b_seed, "Random seed")->capture_default_str();
  bench->add_option("--out", b_out, "Output directory")->required();

  auto* dem = app.add_subcommand("dem", "DEM utilities");
  dem->require_subcommand(1);
  auto* synth = dem->add_subcommand("synth", "Write a synthetic DEM as an ASCII grid");
  std::string d_kind = "rugged", d_out;
  std::uint64_t d_seed = 2024;
  double d_extent = 16000.0, d_cell = 30.0;
  synth->add_option("--kind", d_kind, "rugged or flat")->capture_default_str();
  synth->add_option("--seed", d_seed, "Terrain seed")->capture_default_str();
  synth->add_option("--extent", d_extent, "Side length, m")->capture_default_str();
  synth->add_option("--cell", d_cell, "Cell size, m")->capture_default_str();
  synth->add_option("--out", d_out, "Output file")->required();
  auto* info = dem->add_subcommand("info", "Summarize an ASCII grid");
  std::string i_path;
  info->add_option("file", i_path, "ASCII grid file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(scenario, seed, particles, run_out);
    if (bench->parsed()) return cmd_bench(b_particles, b_points, b_methods, b_out, b_steps, b_kind, b_altitude, b_seed);
    if (synth->parsed()) return cmd_dem_synth(d_kind, d_seed, d_out, d_extent, d_cell);
    if (info->parsed()) return cmd_dem_info(i_path);
  } catch (const tanav::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tanav::ValueError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tanav::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

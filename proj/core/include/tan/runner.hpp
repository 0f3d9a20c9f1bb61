#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "tan/mpf.hpp"
#include "tan/scenario.hpp"

namespace tanav {

struct StepRecord {
  double t = 0.0;
  Vec3 truth = Vec3::Zero();
  Vec3 nominal = Vec3::Zero();
  Vec3 estimate = Vec3::Zero();
  Vec3 error = Vec3::Zero();  // estimate - truth
  double ess = 0.0;
  double innov = 0.0;  // weighted mean particle innovation before reweighting
  double terrain_below = 0.0;  // truth DEM height under the vehicle
};

struct RunTrace {
  std::vector<StepRecord> steps;
};

enum class Window { full, last_quarter };

/// Per-axis RMSE over the whole run and over its last quarter.
struct RmseReport {
  Vec3 rmse = Vec3::Zero();
  Vec3 rmse_last_quarter = Vec3::Zero();

  double horizontal() const { return std::hypot(rmse.x(), rmse.y()); }
  double horizontal_last_quarter() const { return std::hypot(rmse_last_quarter.x(), rmse_last_quarter.y()); }
};

/// Throws EmptyTrace.
Vec3 compute_rmse(const RunTrace& trace, Window window);

/// RMSE over steps [begin, end).
Vec3 compute_rmse(const RunTrace& trace, std::size_t begin, std::size_t end);

RmseReport make_report(const RunTrace& trace);

struct RunStats {
  std::size_t imu_steps = 0;
  std::size_t measurement_steps = 0;
  std::size_t resamples = 0;
  std::size_t uniform_resets = 0;
  std::size_t failed_predictions = 0;
  std::size_t hygiene_checks = 0;
  std::size_t hygiene_violations = 0;
  std::string first_violation;
  double wall_seconds = 0.0;
};

struct RunResult {
  ScenarioConfig config;
  RunTrace trace;
  RmseReport rmse;
  RunStats stats;
  Vec3 initial_dp = Vec3::Zero();  // true initial position error
};

/// Full simulation. Module errors are rethrown as ScenarioError with the
/// step index.
RunResult run_scenario(const ScenarioConfig& cfg);

/// Process noise for one IMU step of the given configuration.
ProcessNoise process_noise(const ScenarioConfig& cfg, const ImuSpec& imu);

ImuSpec resolved_imu(const ScenarioConfig& cfg);
Vec3 resolved_dp0_std(const ScenarioConfig& cfg);
Vec12 resolved_sl0_std(const ScenarioConfig& cfg);
double resolved_sigma_lik(const ScenarioConfig& cfg);
TrajectorySpec trajectory_for(const ScenarioConfig& cfg);

inline constexpr const char* kTraceHeader =
    "t,true_x,true_y,true_z,nom_x,nom_y,nom_z,est_x,est_y,est_z,err_x,err_y,err_z,ess,innov";

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_trace_csv(const RunTrace& trace, std::ostream& out);
std::string report_json(const RunResult& r);

/// Writes trace.csv and report.json into dir (created if absent).
void write_run_outputs(const RunResult& r, const std::string& dir);

}  // namespace tanav

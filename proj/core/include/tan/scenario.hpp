#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tan/ins_core.hpp"
#include "tan/tan_predict.hpp"
#include "tan/terrain.hpp"
#include "tan/vehicle_sim.hpp"

namespace tanav {

enum class InitError { high, low };

std::string to_string(InitError e);
InitError init_error_from_string(const std::string& s);

inline constexpr double kHighAltitude = 1000.0;
inline constexpr double kLowAltitude = 150.0;

struct RatesConfig {
  double imu_hz = 50.0;
  /// IMU steps per measurement.
  int measurement_decimation = 1;
};

struct ScanConfig {
  int rows = 4;
  int cols = 4;
  double fov_deg = 20.0;
};

struct FilterConfig {
  /// Roughening std of the position particles, meters per measurement interval.
  double q_n_std = 0.5;
  /// Likelihood scale; unset means sigma_range, or hypot(sigma_alt, sigma_baro)
  /// for the altimeter.
  std::optional<double> sigma_lik;
  std::optional<Vec3> dp0_std;
  std::optional<Vec12> sl0_std;
  bool information_step = true;
  double ess_threshold = 0.5;
  /// Start every particle at the true initial error with zero spread.
  bool init_at_truth = false;
};

struct ScenarioConfig {
  std::string id = "custom";
  TerrainKind terrain;
  double cell = 30.0;
  ImuGrade imu_grade = ImuGrade::navigation;
  std::optional<double> accel_noise_std;
  std::optional<double> gyro_noise_std;
  double bank = 30.0;  // degrees
  double altitude_agl = kHighAltitude;
  double speed = 100.0;
  PredictorKind predictor = PredictorKind::sliding;
  RaycastMethod raycast_method = RaycastMethod::triangles;
  InitError init_error = InitError::high;
  int particles = 500;
  std::uint64_t seed = 0;
  double duration = 120.0;
  RatesConfig rates;
  SensorNoise sensor;
  FilterConfig filter;
  ScanConfig scan;
};

bool is_preset(const std::string& id);
std::vector<std::string> preset_ids();

/// Throws UnknownPreset.
ScenarioConfig scenario_preset(const std::string& id);

/// Preset id or path to a JSON scenario file. Throws UnknownPreset,
/// SchemaError (with the offending field path) or ConfigError.
ScenarioConfig load_scenario(const std::string& id_or_path);

/// JSON text form; a file's "id" naming a preset selects it as the base.
ScenarioConfig parse_scenario_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Throws ConfigError when the configuration is inconsistent.
void validate(const ScenarioConfig& cfg);

Vec3 initial_position_std(InitError e);
Vec12 initial_linear_std(InitError e, ImuGrade grade);

/// Legs for the preset flight pattern of the given bank angle.
std::vector<Leg> preset_legs(double bank_deg, double duration, double speed = 100.0, double roll_ramp = 2.0);

}  // namespace tanav

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tan/geometry.hpp"
#include "tan/scan.hpp"
#include "tan/terrain.hpp"

namespace tanav {

inline constexpr double kGravity = 9.80665;

/// Navigation frame is local East-North-Up; gravity points down.
inline Vec3 gravity_vector() { return {0.0, 0.0, -kGravity}; }

struct TruthState {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  UnitQuaternion q;
  Vec3 a = Vec3::Zero();      // inertial acceleration, navigation frame
  Vec3 omega = Vec3::Zero();  // body rates
};

struct Leg {
  enum class Kind { straight, turn };
  Kind kind = Kind::straight;
  double duration = 0.0;        // straight legs, seconds
  double bank_deg = 0.0;        // turn legs; positive banks right (heading decreases)
  double heading_change_deg = 0.0;  // turn legs, magnitude

  static Leg straight(double seconds) { return {Kind::straight, seconds, 0.0, 0.0}; }
  static Leg turn(double bank_deg, double heading_change_deg) {
    return {Kind::turn, 0.0, bank_deg, heading_change_deg};
  }
};

struct TrajectorySpec {
  std::vector<Leg> legs;
  double speed = 100.0;
  /// Clearance above the highest terrain point under the horizontal path.
  /// The flight is level at that constant altitude.
  double altitude_agl = 1000.0;
  double rate = 50.0;
  double start_x = 0.0;
  double start_y = 0.0;
  double heading = 0.0;  // radians from east, counter-clockwise
  /// Smooth roll-in / roll-out time at either end of a turn leg. Zero makes
  /// roll change instantaneously, which is only meaningful for a trajectory
  /// that starts in its turn.
  double roll_ramp = 2.0;
};

/// Coordinated-turn turn rate magnitude g * tan(bank) / speed.
double coordinated_turn_rate(double bank_rad, double speed);

/// Time a turn leg takes, ramps included.
double turn_leg_duration(const Leg& leg, double speed, double roll_ramp);

/// Constant-speed level trajectory of straight legs and coordinated turns with
/// zero sideslip. Horizontal motion is integrated with RK4 substeps; a and
/// omega are analytic. Throws TerrainCollision if any sample is at or below
/// terrain, OutOfBounds if the path leaves the DEM.
std::vector<TruthState> gen_trajectory(const TrajectorySpec& spec, const DemGrid& dem);

enum class ImuGrade { navigation, tactical_low_end };

std::string to_string(ImuGrade g);
ImuGrade imu_grade_from_string(const std::string& s);

struct ImuSpec {
  ImuGrade grade = ImuGrade::navigation;
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();
  double accel_noise_std = 0.0;
  double gyro_noise_std = 0.0;
  double rate = 50.0;
};

/// Bias ranges per component, m/s^2 and rad/s.
struct GradeBounds {
  double accel_min, accel_max, gyro_min, gyro_max;
};

GradeBounds grade_bounds(ImuGrade g);

/// Preset with constant biases inside the grade's range and default noise.
ImuSpec imu_preset(ImuGrade g, double rate = 50.0);

/// Throws ValueError if noise stds are negative or biases leave the grade range.
void validate(const ImuSpec& spec);

struct ImuSample {
  double t = 0.0;
  Vec3 a_m = Vec3::Zero();
  Vec3 omega_m = Vec3::Zero();
};

/// a_m = R^T (a - g) + bias + noise, omega_m = omega + bias + noise, where a
/// and omega are the mean acceleration and body rate over [t_k, t_k+1] (the
/// velocity and attitude increments a strapdown unit reports). The last sample
/// uses the instantaneous values. Noise at sample k comes from the (seed, imu,
/// k) stream.
std::vector<ImuSample> synth_imu(const std::vector<TruthState>& truth, const ImuSpec& spec, std::uint64_t seed);

struct SensorNoise {
  double sigma_range = 1.0;
  double sigma_alt = 1.0;
  double sigma_baro = 2.0;
  double baro_bias = 5.0;
  std::uint64_t seed = 0;
};

struct Pose {
  Vec3 p = Vec3::Zero();
  UnitQuaternion q;
};

inline constexpr double kDefaultTMax = 20000.0;

/// Raycast (triangles) every pattern direction from the pose; each range is
/// perturbed by N(0, sigma_range^2) and the point stored in the sensor frame.
/// Throws RayMiss(i) for the first ray that escapes.
PointCloud sense_point_cloud(const DemGrid& dem, const Pose& pose, const ScanPattern& pattern, const SensorNoise& noise,
                             std::uint64_t step, double t_max = kDefaultTMax);

enum class AltimeterMode { nadir_vertical, body_axis };

/// Terrain clearance: vertical (bilinear DEM under the aircraft) or slant
/// range along body -z.
double sense_radar_altimeter(const DemGrid& dem, const Pose& pose, AltimeterMode mode, const SensorNoise& noise,
                             std::uint64_t step, double t_max = kDefaultTMax);

/// Barometric altitude above MSL: p_z + bias + noise.
double sense_baro(const Pose& pose, const SensorNoise& noise, std::uint64_t step);

}  // namespace tanav

#include "tan/vehicle_sim.hpp"

#include <cmath>

#include "tan/errors.hpp"
#include "tan/rng.hpp"

namespace tanav {

std::string to_string(ImuGrade g) { return g == ImuGrade::navigation ? "navigation" : "tactical_low_end"; }

ImuGrade imu_grade_from_string(const std::string& s) {
  if (s == "navigation") return ImuGrade::navigation;
  if (s == "tactical_low_end") return ImuGrade::tactical_low_end;
  throw ValueError("unknown IMU grade '" + s + "'");
}

GradeBounds grade_bounds(ImuGrade g) {
  // Aviation and Tactical rows of the usual IMU grade table.
  if (g == ImuGrade::navigation) return {3e-4, 1e-3, 5e-8, 5e-8};
  return {0.01, 0.1, 5e-6, 5e-4};
}

ImuSpec imu_preset(ImuGrade g, double rate) {
  ImuSpec s;
  s.grade = g;
  s.rate = rate;
  if (g == ImuGrade::navigation) {
    s.accel_bias = Vec3(6e-4, -6e-4, 6e-4);
    s.gyro_bias = Vec3(5e-8, -5e-8, 5e-8);
    s.accel_noise_std = 0.005;
    s.gyro_noise_std = 1e-5;
  } else {
    s.accel_bias = Vec3(0.05, -0.05, 0.05);
    s.gyro_bias = Vec3(5e-5, -5e-5, 5e-5);
    s.accel_noise_std = 0.05;
    s.gyro_noise_std = 5e-4;
  }
  return s;
}

void validate(const ImuSpec& spec) {
  if (spec.accel_noise_std < 0.0 || spec.gyro_noise_std < 0.0) throw ValueError("IMU noise std must be >= 0");
  if (!(spec.rate > 0.0)) throw ValueError("IMU rate must be > 0");
  const GradeBounds b = grade_bounds(spec.grade);
  constexpr double slack = 1e-9;
  for (int i = 0; i < 3; ++i) {
    const double a = std::abs(spec.accel_bias[i]);
    const double w = std::abs(spec.gyro_bias[i]);
    if (a < b.accel_min * (1 - slack) || a > b.accel_max * (1 + slack)) {
      throw ValueError("accelerometer bias outside the " + to_string(spec.grade) + " range");
    }
    if (w < b.gyro_min * (1 - slack) || w > b.gyro_max * (1 + slack)) {
      throw ValueError("gyro bias outside the " + to_string(spec.grade) + " range");
    }
  }
}

std::vector<ImuSample> synth_imu(const std::vector<TruthState>& truth, const ImuSpec& spec, std::uint64_t seed) {
  std::vector<ImuSample> out;
  out.reserve(truth.size());
  const Vec3 g = gravity_vector();
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const TruthState& s = truth[k];
    Engine eng = make_engine(seed, Stream::imu, k);
    Vec3 na, nw;
    for (int i = 0; i < 3; ++i) na[i] = spec.accel_noise_std * gauss(eng);
    for (int i = 0; i < 3; ++i) nw[i] = spec.gyro_noise_std * gauss(eng);
    Vec3 accel = s.a, rate = s.omega;
    if (k + 1 < truth.size()) {
      const TruthState& next = truth[k + 1];
      const double dt = next.t - s.t;
      accel = (next.v - s.v) / dt;
      rate = quat_to_rotvec(quat_compose(s.q.conjugate(), next.q)) / dt;
    }
    ImuSample m;
    m.t = s.t;
    m.a_m = quat_rotate(s.q.conjugate(), accel - g) + spec.accel_bias + na;
    m.omega_m = rate + spec.gyro_bias + nw;
    out.push_back(m);
  }
  return out;
}

PointCloud sense_point_cloud(const DemGrid& dem, const Pose& pose, const ScanPattern& pattern, const SensorNoise& noise,
                             std::uint64_t step, double t_max) {
  const Mat3 R = pose.q.matrix();
  Engine eng = make_engine(noise.seed, Stream::range, step);
  PointCloud pc;
  pc.pts.reserve(pattern.size());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const Vec3& d = pattern.dirs[i];
    const CastResult res = raycast_dem(dem, Ray{pose.p, R * d}, t_max, RaycastMethod::triangles);
    if (!res) throw RayMiss(i);
    const double range = res.hit.t + noise.sigma_range * gauss(eng);
    pc.pts.push_back(range * d);
  }
  return pc;
}

double sense_radar_altimeter(const DemGrid& dem, const Pose& pose, AltimeterMode mode, const SensorNoise& noise,
                             std::uint64_t step, double t_max) {
  Engine eng = make_engine(noise.seed, Stream::altimeter, step);
  const double n = noise.sigma_alt * gauss(eng);
  if (mode == AltimeterMode::nadir_vertical) {
    return pose.p.z() - sample_bilinear(dem, pose.p.x(), pose.p.y()) + n;
  }
  const Vec3 down = quat_rotate(pose.q, Vec3(0.0, 0.0, -1.0));
  return raycast_dem_first_hit(dem, Ray{pose.p, down}, t_max, RaycastMethod::triangles).t + n;
}

double sense_baro(const Pose& pose, const SensorNoise& noise, std::uint64_t step) {
  Engine eng = make_engine(noise.seed, Stream::baro, step);
  return pose.p.z() + noise.baro_bias + noise.sigma_baro * gauss(eng);
}

}  // namespace tanav

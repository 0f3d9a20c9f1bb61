#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "tan/errors.hpp"
#include "tan/vehicle_sim.hpp"

namespace tanav {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

DemGrid flat_world() { return testing::plane_dem(0, 0, 0, 401, 50.0, -10000.0, -10000.0); }

Mat3 rodrigues(const Vec3& theta) {
  const double a = theta.norm();
  if (a == 0.0) return Mat3::Identity();
  const Mat3 k = skew(theta / a);
  return Mat3::Identity() + std::sin(a) * k + (1.0 - std::cos(a)) * k * k;
}

double sample_std(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

TEST(Trajectory, StraightLegSamplesAndDistance) {
  TrajectorySpec spec;
  spec.legs = {Leg::straight(60.0)};
  const auto tr = gen_trajectory(spec, flat_world());
  ASSERT_EQ(tr.size(), 3001u);
  EXPECT_NEAR((tr.back().p - tr.front().p).norm(), 6000.0, 1e-6);
  EXPECT_NEAR(tr.back().t, 60.0, 1e-12);
  for (const TruthState& s : tr) {
    EXPECT_NEAR(s.p.z(), 1000.0, 1e-12);
    EXPECT_EQ(s.a, Vec3::Zero());
  }
}

TEST(Trajectory, CoordinatedTurnRate) {
  EXPECT_NEAR(coordinated_turn_rate(30.0 * kDeg, 100.0), 0.0566, 5e-5);
  EXPECT_NEAR(coordinated_turn_rate(30.0 * kDeg, 100.0), kGravity * std::tan(30.0 * kDeg) / 100.0, 1e-15);
}

TEST(Trajectory, FullCircleCloses) {
  // Speed chosen so the circle takes exactly 100 s and lands on a sample.
  const double bank = 30.0 * kDeg;
  TrajectorySpec spec;
  spec.speed = kGravity * std::tan(bank) * 100.0 / (2.0 * std::numbers::pi);
  spec.roll_ramp = 0.0;
  spec.legs = {Leg::turn(30.0, 360.0)};
  const auto tr = gen_trajectory(spec, flat_world());
  ASSERT_EQ(tr.size(), 5001u);
  EXPECT_LT((tr.back().p - tr.front().p).norm(), 1e-3);
  const double radius = spec.speed / coordinated_turn_rate(bank, spec.speed);
  for (std::size_t k = 0; k < tr.size(); k += 100) {
    const double dist = (tr[k].p - tr[0].p).head<2>().norm();
    EXPECT_LE(dist, 2.0 * radius + 1e-6);
  }
}

TEST(Trajectory, TurnLegDurationIncludesRamps) {
  TrajectorySpec spec;
  spec.legs = {Leg::turn(-45.0, 90.0)};
  const auto tr = gen_trajectory(spec, flat_world());
  const double d = turn_leg_duration(spec.legs[0], spec.speed, spec.roll_ramp);
  EXPECT_NEAR(tr.back().t, std::floor(d * spec.rate + 1e-9) / spec.rate, 1e-9);
  const double heading_end = std::atan2(tr.back().v.y(), tr.back().v.x());
  EXPECT_NEAR(heading_end, 90.0 * kDeg, 2e-3);  // negative bank turns left
}

TEST(Trajectory, KinematicsAreConsistent) {
  TrajectorySpec spec;
  spec.legs = {Leg::straight(5.0), Leg::turn(30.0, 90.0), Leg::straight(5.0)};
  const auto tr = gen_trajectory(spec, flat_world());
  const double dt = 1.0 / spec.rate;
  for (std::size_t k = 1; k + 1 < tr.size(); k += 7) {
    const Vec3 v_fd = (tr[k + 1].p - tr[k - 1].p) / (2.0 * dt);
    EXPECT_LT((v_fd - tr[k].v).norm(), 2e-3);
    const Vec3 a_fd = (tr[k + 1].v - tr[k - 1].v) / (2.0 * dt);
    EXPECT_LT((a_fd - tr[k].a).norm(), 5e-3);
    const Vec3 w_fd = quat_to_rotvec(quat_compose(tr[k - 1].q.conjugate(), tr[k + 1].q)) / (2.0 * dt);
    EXPECT_LT((w_fd - tr[k].omega).norm(), 2e-3);
    // Coordinated: no sideslip, specific force has no body-y component.
    const Vec3 f = quat_rotate(tr[k].q.conjugate(), tr[k].a - gravity_vector());
    EXPECT_NEAR(f.y(), 0.0, 1e-9);
  }
}

TEST(Trajectory, ClearsTerrain) {
  const DemGrid d = testing::rugged_dem(8000.0);
  TrajectorySpec spec;
  spec.start_x = 1000.0;
  spec.start_y = 4000.0;
  spec.altitude_agl = 150.0;
  spec.legs = {Leg::straight(20.0), Leg::turn(30.0, 90.0), Leg::straight(10.0)};
  const auto tr = gen_trajectory(spec, d);
  double clearance = 1e9;
  for (const TruthState& s : tr) clearance = std::min(clearance, s.p.z() - sample_surface(d, s.p.x(), s.p.y()));
  EXPECT_NEAR(clearance, 150.0, 1e-6);
}

TEST(Trajectory, CollisionAndExitThrow) {
  TrajectorySpec spec;
  spec.legs = {Leg::straight(10.0)};
  spec.altitude_agl = 0.0;
  EXPECT_THROW(gen_trajectory(spec, flat_world()), TerrainCollision);
  spec.altitude_agl = 100.0;
  spec.legs = {Leg::straight(200.0)};
  EXPECT_THROW(gen_trajectory(spec, flat_world()), OutOfBounds);
}

std::vector<TruthState> hover(std::size_t n) {
  std::vector<TruthState> tr(n);
  for (std::size_t k = 0; k < n; ++k) tr[k].t = k / 50.0;
  return tr;
}

TEST(Imu, LevelRestReadsGravity) {
  ImuSpec spec;
  const auto m = synth_imu(hover(10), spec, 1);
  for (const ImuSample& s : m) {
    EXPECT_NEAR((s.a_m - Vec3(0, 0, kGravity)).norm(), 0.0, 1e-12);
    EXPECT_EQ(s.omega_m, Vec3::Zero());
  }
}

TEST(Imu, BiasWithoutNoiseIsExact) {
  ImuSpec spec = imu_preset(ImuGrade::tactical_low_end);
  spec.accel_noise_std = 0.0;
  spec.gyro_noise_std = 0.0;
  Vec3 sum_a = Vec3::Zero(), sum_w = Vec3::Zero();
  const auto m = synth_imu(hover(1000), spec, 1);
  for (const ImuSample& s : m) {
    sum_a += s.a_m - Vec3(0, 0, kGravity);
    sum_w += s.omega_m;
  }
  EXPECT_LT((sum_a / 1000.0 - spec.accel_bias).norm(), 1e-12);
  EXPECT_LT((sum_w / 1000.0 - spec.gyro_bias).norm(), 1e-12);
}

TEST(Imu, SamplesAreIntervalIncrements) {
  TrajectorySpec spec;
  spec.legs = {Leg::straight(1.0), Leg::turn(45.0, 60.0), Leg::straight(1.0)};
  const auto tr = gen_trajectory(spec, flat_world());
  const auto m = synth_imu(tr, ImuSpec{}, 0);
  const Vec3 g(0, 0, -kGravity);
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    const double dt = tr[k + 1].t - tr[k].t;
    const Vec3 v = tr[k].v + (tr[k].q.matrix() * m[k].a_m + g) * dt;
    EXPECT_LT((v - tr[k + 1].v).norm(), 1e-10);
    const Mat3 r = tr[k].q.matrix() * rodrigues(m[k].omega_m * dt);
    EXPECT_LT((r - tr[k + 1].q.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
  const TruthState& last = tr.back();
  EXPECT_LT((m.back().a_m - last.q.matrix().transpose() * (last.a - g)).norm(), 1e-12);
  EXPECT_LT((m.back().omega_m - last.omega).norm(), 1e-15);
}

TEST(Imu, NoiseStdMatches) {
  ImuSpec spec;
  spec.accel_noise_std = 0.05;
  spec.gyro_noise_std = 1e-3;
  const auto m = synth_imu(hover(100000), spec, 7);
  std::vector<double> ax, wz;
  for (const ImuSample& s : m) {
    ax.push_back(s.a_m.x());
    wz.push_back(s.omega_m.z());
  }
  EXPECT_NEAR(sample_std(ax) / 0.05, 1.0, 0.02);
  EXPECT_NEAR(sample_std(wz) / 1e-3, 1.0, 0.02);
}

TEST(Imu, DeterministicInSeed) {
  const ImuSpec spec = imu_preset(ImuGrade::navigation);
  const auto a = synth_imu(hover(50), spec, 3);
  const auto b = synth_imu(hover(50), spec, 3);
  const auto c = synth_imu(hover(50), spec, 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].a_m, b[k].a_m);
    EXPECT_NE(a[k].a_m, c[k].a_m);
  }
}

TEST(Imu, PresetsRespectGradeRanges) {
  for (ImuGrade g : {ImuGrade::navigation, ImuGrade::tactical_low_end}) {
    const ImuSpec s = imu_preset(g);
    EXPECT_NO_THROW(validate(s));
    const GradeBounds b = grade_bounds(g);
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(std::abs(s.accel_bias[i]), b.accel_min);
      EXPECT_LE(std::abs(s.accel_bias[i]), b.accel_max);
      EXPECT_GE(std::abs(s.gyro_bias[i]), b.gyro_min);
      EXPECT_LE(std::abs(s.gyro_bias[i]), b.gyro_max);
    }
    EXPECT_EQ(imu_grade_from_string(to_string(g)), g);
  }
  ImuSpec bad = imu_preset(ImuGrade::navigation);
  bad.accel_bias.x() = 0.05;
  EXPECT_THROW(validate(bad), ValueError);
  bad = imu_preset(ImuGrade::navigation);
  bad.gyro_noise_std = -1.0;
  EXPECT_THROW(validate(bad), ValueError);
}

SensorNoise quiet() {
  SensorNoise n;
  n.sigma_range = n.sigma_alt = n.sigma_baro = n.baro_bias = 0.0;
  return n;
}

TEST(PointCloudSensor, LevelNadirOverFlatGround) {
  const DemGrid d = testing::plane_dem(0, 0, 0);
  const PointCloud pc = sense_point_cloud(d, {Vec3(0, 0, 100), {}}, make_scan_pattern(1, 1, 20.0), quiet(), 0);
  EXPECT_LT((pc.pts[0] - Vec3(0, 0, -100)).norm(), 1e-12);
}

TEST(PointCloudSensor, NoiselessPointsLieOnSurface) {
  const DemGrid d = testing::rugged_dem(6000.0);
  const Pose pose{Vec3(3000, 3000, 1500), quat_from_euler(0.5, 0.1, -0.2)};
  const PointCloud pc = sense_point_cloud(d, pose, make_scan_pattern(4, 4, 20.0), quiet(), 0);
  for (const Vec3& s : pc.pts) {
    const Vec3 w = pose.p + quat_rotate(pose.q, s);
    EXPECT_NEAR(w.z(), sample_surface(d, w.x(), w.y()), 1e-6);
  }
}

TEST(PointCloudSensor, RangeNoiseIsUnbiased) {
  const DemGrid d = testing::plane_dem(0, 0, 0);
  SensorNoise n = quiet();
  n.sigma_range = 1.0;
  const ScanPattern one = make_scan_pattern(1, 1, 20.0);
  double sum = 0.0;
  std::vector<double> ranges;
  for (std::uint64_t k = 0; k < 10000; ++k) {
    const double r = sense_point_cloud(d, {Vec3(0, 0, 100), {}}, one, n, k).pts[0].norm();
    sum += r - 100.0;
    ranges.push_back(r);
  }
  EXPECT_NEAR(sum / 10000.0, 0.0, 0.03);
  EXPECT_NEAR(sample_std(ranges), 1.0, 0.03);
}

TEST(PointCloudSensor, MissRaises) {
  const DemGrid d = testing::plane_dem(0, 0, 0);
  const Pose upside_down{Vec3(0, 0, 100), quat_from_yaw_roll(0.0, std::numbers::pi)};
  EXPECT_THROW(sense_point_cloud(d, upside_down, make_scan_pattern(2, 2, 10.0), quiet(), 0), RayMiss);
}

TEST(Altimeter, NadirAndSlant) {
  const DemGrid d = testing::plane_dem(0, 0, 0, 201, 10.0, -1000.0, -1000.0);
  const Pose level{Vec3(0, 0, 500), {}};
  EXPECT_NEAR(sense_radar_altimeter(d, level, AltimeterMode::nadir_vertical, quiet(), 0), 500.0, 1e-12);
  const Pose rolled{Vec3(0, 0, 500), quat_from_yaw_roll(0.0, 60.0 * kDeg)};
  EXPECT_NEAR(sense_radar_altimeter(d, rolled, AltimeterMode::body_axis, quiet(), 0), 1000.0, 1e-9);
  EXPECT_NEAR(sense_radar_altimeter(d, rolled, AltimeterMode::nadir_vertical, quiet(), 0), 500.0, 1e-12);
}

TEST(Baro, BiasAndNoise) {
  SensorNoise n = quiet();
  EXPECT_EQ(sense_baro({Vec3(0, 0, 1200), {}}, n, 0), 1200.0);
  n.baro_bias = 5.0;
  EXPECT_EQ(sense_baro({Vec3(0, 0, 1200), {}}, n, 0), 1205.0);
  n.sigma_baro = 2.0;
  std::vector<double> h;
  for (std::uint64_t k = 0; k < 100000; ++k) h.push_back(sense_baro({Vec3(0, 0, 1200), {}}, n, k));
  EXPECT_NEAR(sample_std(h) / 2.0, 1.0, 0.02);
  EXPECT_EQ(sense_baro({Vec3(0, 0, 1200), {}}, n, 17), sense_baro({Vec3(0, 0, 1200), {}}, n, 17));
}

}  // namespace
}  // namespace tanav

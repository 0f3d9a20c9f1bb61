#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support.hpp"
#include "tan/errors.hpp"
#include "tan/ins_core.hpp"
#include "tan/vehicle_sim.hpp"

namespace tanav {
namespace {

constexpr double kT = 0.02;

TEST(Nominal, HoverIsStationary) {
  NominalState s;
  s.p_bar = Vec3(10, 20, 300);
  const ImuSample m{0.0, Vec3(0, 0, kGravity), Vec3::Zero()};
  NominalState n = s;
  for (int k = 0; k < 500; ++k) n = propagate_nominal(n, m, kT);
  EXPECT_LT((n.p_bar - s.p_bar).norm(), 1e-9);
  EXPECT_LT(n.v_bar.norm(), 1e-9);
  EXPECT_NEAR(n.q_bar.w, 1.0, 1e-15);
}

TEST(Nominal, FreeFallGainsGravity) {
  NominalState n;
  const ImuSample m{0.0, Vec3::Zero(), Vec3::Zero()};
  for (int k = 0; k < 50; ++k) n = propagate_nominal(n, m, kT);
  EXPECT_NEAR(n.v_bar.z(), -kGravity, 1e-9);
  EXPECT_NEAR(n.v_bar.head<2>().norm(), 0.0, 1e-15);
}

TEST(Nominal, YawRateIntegratesToQuarterTurn) {
  NominalState n;
  const ImuSample m{0.0, Vec3(0, 0, kGravity), Vec3(0, 0, std::numbers::pi / 2)};
  for (int k = 0; k < 50; ++k) n = propagate_nominal(n, m, kT);
  Mat3 rz;
  rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_LT((n.q_bar.matrix() - rz).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Nominal, RejectsNonPositiveStep) {
  EXPECT_THROW(propagate_nominal(NominalState{}, ImuSample{}, 0.0), ValueError);
  EXPECT_THROW(error_transition(NominalState{}, ImuSample{}, -1.0), ValueError);
}

TEST(ErrorTransition, VanishingStepIsIdentity) {
  NominalState s;
  s.q_bar = quat_from_euler(0.3, 0.1, -0.2);
  const ImuSample m{0.0, Vec3(0.5, -0.3, 9.9), Vec3(0.01, 0.02, -0.03)};
  const ErrorModel e = error_transition(s, m, 1e-12);
  EXPECT_LT((e.a_l - Mat12::Identity()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(e.a_n.cwiseAbs().maxCoeff(), 1e-11);
}

TEST(ErrorTransition, LevelBlocksAreExplicit) {
  const ImuSample m{0.0, Vec3(0, 0, 9.81), Vec3::Zero()};
  const ErrorModel e = error_transition(NominalState{}, m, kT);
  Mat3 want;
  want << 0, 0.1962, 0, -0.1962, 0, 0, 0, 0, 0;
  EXPECT_LT((e.a_l.block<3, 3>(0, 3) - want).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((e.a_l.block<3, 3>(0, 6) + kT * Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((e.a_l.block<3, 3>(3, 9) + kT * Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((e.a_l.block<3, 3>(3, 3) - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  Mat3x12 an = Mat3x12::Zero();
  an.block<3, 3>(0, 0) = kT * Mat3::Identity();
  EXPECT_EQ(e.a_n, an);
  EXPECT_TRUE(e.a_l.bottomRightCorner(6, 6).isIdentity(0.0));
  EXPECT_TRUE(e.a_l.bottomLeftCorner(6, 6).isZero(0.0));
}

TEST(ErrorTransition, AttitudeBlockIsRotation) {
  std::mt19937_64 g(31);
  std::normal_distribution<double> n(0.0, 0.5);
  for (int i = 0; i < 100; ++i) {
    const ImuSample m{0.0, Vec3(n(g), n(g), 9.8 + n(g)), Vec3(n(g), n(g), n(g))};
    const Mat3 b = error_transition(NominalState{}, m, kT).a_l.block<3, 3>(3, 3);
    EXPECT_NEAR(b.determinant(), 1.0, 1e-12);
    EXPECT_LT((b * b.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ErrorTransition, FirstOrderConsistent) {
  std::mt19937_64 g(32);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto vec = [&](double s) { return Vec3(s * u(g), s * u(g), s * u(g)); };
  for (int i = 0; i < 100; ++i) {
    NominalState s;
    s.p_bar = vec(3000.0);
    s.v_bar = vec(100.0);
    s.q_bar = quat_from_rotvec(vec(3.0));
    s.a_bias_bar = vec(0.05);
    s.omega_bias_bar = vec(1e-4);
    const ImuSample m{0.0, Vec3(0, 0, kGravity) + vec(5.0), vec(0.5)};
    ErrorState e;
    e.dp = vec(1.0);
    e.dv = vec(0.1);
    e.dtheta = vec(1e-3);
    e.da_bias = vec(1e-3);
    e.domega_bias = vec(1e-5);
    ErrorState half = e;
    half.dp *= 0.5;
    half.dv *= 0.5;
    half.dtheta *= 0.5;
    half.da_bias *= 0.5;
    half.domega_bias *= 0.5;
    const double r1 = testing::linearization_residual(s, m, e, kT);
    const double r2 = testing::linearization_residual(s, m, half, kT);
    EXPECT_GE(r1 / r2, 3.5) << i << " r1=" << r1 << " r2=" << r2;
  }
}

TEST(OpenLoop, ZeroErrorIsNominal) {
  NominalState s;
  s.p_bar = Vec3(1, 2, 3);
  s.v_bar = Vec3(4, 5, 6);
  s.q_bar = quat_from_euler(0.1, 0.2, 0.3);
  const TotalState t = correct_open_loop(s, ErrorState{});
  EXPECT_EQ(t.p, s.p_bar);
  EXPECT_EQ(t.v, s.v_bar);
  EXPECT_LT((t.q.matrix() - s.q_bar.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(OpenLoop, PositionAndAttitudeOffsets) {
  NominalState s;
  s.q_bar = quat_from_euler(0.7, -0.1, 0.2);
  ErrorState e;
  e.dp = Vec3(3, 4, 0);
  e.dtheta = Vec3(0, 0, 1e-3);
  const TotalState t = correct_open_loop(s, e);
  EXPECT_NEAR((t.p - s.p_bar).norm(), 5.0, 1e-12);
  Mat3 rz;
  rz << std::cos(1e-3), -std::sin(1e-3), 0, std::sin(1e-3), std::cos(1e-3), 0, 0, 0, 1;
  EXPECT_LT((t.q.matrix() - s.q_bar.matrix() * rz).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(OpenLoop, ErrorBetweenInvertsCorrection) {
  NominalState s;
  s.p_bar = Vec3(100, -50, 900);
  s.q_bar = quat_from_euler(-1.0, 0.05, 0.3);
  ErrorState e;
  e.dp = Vec3(1, -2, 0.5);
  e.dv = Vec3(0.1, 0.0, -0.1);
  e.dtheta = Vec3(2e-3, -1e-3, 5e-4);
  e.da_bias = Vec3(1e-3, 0, 0);
  const ErrorState back = error_between(testing::perturbed(s, e), s);
  EXPECT_LT((back.linear() - e.linear()).norm(), 1e-12);
  EXPECT_LT((back.dp - e.dp).norm(), 1e-12);
}

double dead_reckoning_error(const std::vector<TruthState>& tr, const ImuSpec& spec, std::uint64_t seed) {
  const auto imu = synth_imu(tr, spec, seed);
  NominalState n = nominal_from_truth(tr[0], ErrorState{});
  for (std::size_t k = 1; k < tr.size(); ++k) n = propagate_nominal(n, imu[k - 1], kT);
  return (n.p_bar - tr.back().p).norm();
}

TEST(DeadReckoning, PerfectImuTracksSTurn) {
  TrajectorySpec spec;
  spec.legs = {Leg::straight(5.0), Leg::turn(30.0, 90.0), Leg::turn(-30.0, 90.0)};
  const double used = 5.0 + 2.0 * turn_leg_duration(spec.legs[1], spec.speed, spec.roll_ramp);
  spec.legs.push_back(Leg::straight(60.0 - used));
  const DemGrid dem = testing::plane_dem(0, 0, 0, 301, 50.0, -2000.0, -7500.0);
  const auto tr = gen_trajectory(spec, dem);
  EXPECT_LE(dead_reckoning_error(tr, ImuSpec{}, 0), 0.5);
}

TEST(DeadReckoning, TacticalDriftsMoreThanNavigation) {
  TrajectorySpec spec;
  spec.legs = {Leg::straight(120.0)};
  const DemGrid dem = testing::plane_dem(0, 0, 0, 301, 50.0, -2000.0, -7500.0);
  const auto tr = gen_trajectory(spec, dem);
  double nav = 0.0, tac = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    nav += dead_reckoning_error(tr, imu_preset(ImuGrade::navigation), seed);
    tac += dead_reckoning_error(tr, imu_preset(ImuGrade::tactical_low_end), seed);
  }
  EXPECT_GE(tac, nav);
  EXPECT_GT(tac / 5.0, 100.0);
}

TEST(ErrorStateLayout, LinearPartsRoundTrip) {
  Vec12 l;
  for (int i = 0; i < 12; ++i) l[i] = i + 1.0;
  const ErrorState e = ErrorState::from_parts(Vec3(-1, -2, -3), l);
  EXPECT_EQ(e.dv, Vec3(1, 2, 3));
  EXPECT_EQ(e.dtheta, Vec3(4, 5, 6));
  EXPECT_EQ(e.da_bias, Vec3(7, 8, 9));
  EXPECT_EQ(e.domega_bias, Vec3(10, 11, 12));
  EXPECT_EQ(e.linear(), l);
}

}  // namespace
}  // namespace tanav

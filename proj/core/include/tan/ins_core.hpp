#pragma once

#include <Eigen/Core>

#include "tan/geometry.hpp"
#include "tan/vehicle_sim.hpp"

namespace tanav {

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat3x12 = Eigen::Matrix<double, 3, 12>;
using Mat12x3 = Eigen::Matrix<double, 12, 3>;

/// Dead-reckoned navigation state.
struct NominalState {
  Vec3 p_bar = Vec3::Zero();
  Vec3 v_bar = Vec3::Zero();
  UnitQuaternion q_bar;
  Vec3 a_bias_bar = Vec3::Zero();
  Vec3 omega_bias_bar = Vec3::Zero();
  Vec3 g_bar = gravity_vector();
};

/// Small-signal deviation of the truth from the nominal state:
/// p = p_bar + dp, v = v_bar + dv, q = q_bar * exp(dtheta), biases additive.
struct ErrorState {
  Vec3 dp = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
  Vec3 dtheta = Vec3::Zero();
  Vec3 da_bias = Vec3::Zero();
  Vec3 domega_bias = Vec3::Zero();

  /// Linear substate ordered (dv, dtheta, da_bias, domega_bias).
  Vec12 linear() const;
  static ErrorState from_parts(const Vec3& dp, const Vec12& linear);
};

/// Process noise of the conditionally linear error model.
struct ProcessNoise {
  Eigen::Matrix3d q_n = 0.25 * Eigen::Matrix3d::Identity();
  Mat12 q_l = Mat12::Identity() * 1e-12;
};

struct ErrorModel {
  Mat3x12 a_n = Mat3x12::Zero();
  Mat12 a_l = Mat12::Identity();
  Eigen::Matrix3d q_n = Eigen::Matrix3d::Zero();
  Mat12 q_l = Mat12::Zero();
  double t_s = 0.0;
};

/// One Euler step for position and velocity with an exact quaternion
/// exponential for attitude; biases and gravity are held.
NominalState propagate_nominal(const NominalState& s, const ImuSample& imu, double t_s);

/// Discrete error-state transition for one IMU step.
/// a_n = [T I 0]; a_l is
///   [ I  -R[a]x T  -R T   0   ]
///   [ 0   R{wT}^T   0    -T I ]
///   [ 0   0         I     0   ]
///   [ 0   0         0     I   ]
/// with a = a_m - a_bias_bar and w = omega_m - omega_bias_bar.
ErrorModel error_transition(const NominalState& s, const ImuSample& imu, double t_s,
                            const ProcessNoise& noise = ProcessNoise{});

struct TotalState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  UnitQuaternion q;
};

/// Open-loop composition of nominal and estimated error; the nominal state is
/// not modified.
TotalState correct_open_loop(const NominalState& s, const ErrorState& e);

/// Error between a total navigation state and a nominal one (inverse of
/// correct_open_loop, including biases).
ErrorState error_between(const NominalState& truth_like, const NominalState& nominal);

/// Nominal state built from truth minus an error sample. Biases of the
/// result are zero; the caller supplies the truth biases through e.
NominalState nominal_from_truth(const TruthState& truth, const ErrorState& e);

}  // namespace tanav

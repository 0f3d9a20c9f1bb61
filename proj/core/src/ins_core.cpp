#include "tan/ins_core.hpp"

#include "tan/errors.hpp"

namespace tanav {

Vec12 ErrorState::linear() const {
  Vec12 v;
  v << dv, dtheta, da_bias, domega_bias;
  return v;
}

ErrorState ErrorState::from_parts(const Vec3& dp, const Vec12& l) {
  ErrorState e;
  e.dp = dp;
  e.dv = l.segment<3>(0);
  e.dtheta = l.segment<3>(3);
  e.da_bias = l.segment<3>(6);
  e.domega_bias = l.segment<3>(9);
  return e;
}

NominalState propagate_nominal(const NominalState& s, const ImuSample& imu, double t_s) {
  if (!(t_s > 0.0)) throw ValueError("T_s must be > 0");
  NominalState n = s;
  n.p_bar = s.p_bar + s.v_bar * t_s;
  n.v_bar = s.v_bar + (quat_rotate(s.q_bar, imu.a_m - s.a_bias_bar) + s.g_bar) * t_s;
  n.q_bar = quat_compose(s.q_bar, quat_from_rotvec((imu.omega_m - s.omega_bias_bar) * t_s));
  return n;
}

ErrorModel error_transition(const NominalState& s, const ImuSample& imu, double t_s, const ProcessNoise& noise) {
  if (!(t_s > 0.0)) throw ValueError("T_s must be > 0");
  const Mat3 R = s.q_bar.matrix();
  const Mat3 I = Mat3::Identity();
  const Vec3 accel = imu.a_m - s.a_bias_bar;
  const Vec3 rate = imu.omega_m - s.omega_bias_bar;

  ErrorModel m;
  m.t_s = t_s;
  m.a_n.block<3, 3>(0, 0) = t_s * I;
  m.a_l.setIdentity();
  m.a_l.block<3, 3>(0, 3) = -R * skew(accel) * t_s;
  m.a_l.block<3, 3>(0, 6) = -R * t_s;
  m.a_l.block<3, 3>(3, 3) = quat_from_rotvec(rate * t_s).matrix().transpose();
  m.a_l.block<3, 3>(3, 9) = -t_s * I;
  m.q_n = noise.q_n;
  m.q_l = noise.q_l;
  return m;
}

TotalState correct_open_loop(const NominalState& s, const ErrorState& e) {
  return {s.p_bar + e.dp, s.v_bar + e.dv, quat_compose(s.q_bar, quat_from_rotvec(e.dtheta))};
}

ErrorState error_between(const NominalState& t, const NominalState& n) {
  ErrorState e;
  e.dp = t.p_bar - n.p_bar;
  e.dv = t.v_bar - n.v_bar;
  e.dtheta = quat_to_rotvec(quat_compose(n.q_bar.conjugate(), t.q_bar));
  e.da_bias = t.a_bias_bar - n.a_bias_bar;
  e.domega_bias = t.omega_bias_bar - n.omega_bias_bar;
  return e;
}

NominalState nominal_from_truth(const TruthState& truth, const ErrorState& e) {
  NominalState n;
  n.p_bar = truth.p - e.dp;
  n.v_bar = truth.v - e.dv;
  n.q_bar = quat_compose(truth.q, quat_from_rotvec(-e.dtheta));
  return n;
}

}  // namespace tanav

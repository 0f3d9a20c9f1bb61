#include "tan/tan_predict.hpp"

#include <cmath>

#include "tan/errors.hpp"

namespace tanav {

HypotheticalPose make_hypothetical_pose(const Vec3& p_bar, const UnitQuaternion& q_bar, const Vec3& dp,
                                        const Vec3& dtheta) {
  return {p_bar + dp, quat_compose(q_bar, quat_from_rotvec(dtheta))};
}

std::string to_string(PredictorKind k) {
  switch (k) {
    case PredictorKind::raycast:
      return "raycast";
    case PredictorKind::sliding:
      return "sliding";
    case PredictorKind::altimeter:
      return "altimeter";
  }
  return "?";
}

PredictorKind predictor_from_string(const std::string& s) {
  if (s == "raycast") return PredictorKind::raycast;
  if (s == "sliding") return PredictorKind::sliding;
  if (s == "altimeter") return PredictorKind::altimeter;
  throw ValueError("unknown predictor '" + s + "'");
}

PointCloud predict_pc_raycast(const DemGrid& dem, const HypotheticalPose& pose, const ScanPattern& pattern,
                              RaycastMethod method, double t_max) {
  const Mat3 R = pose.q.matrix();
  PointCloud pc;
  pc.pts.reserve(pattern.size());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const Vec3& d = pattern.dirs[i];
    const CastResult res = raycast_dem(dem, Ray{pose.p, R * d}, t_max, method);
    if (!res) throw RayMiss(i);
    pc.pts.push_back(res.hit.t * d);
  }
  return pc;
}

void predict_pc_sliding(const DemGrid& dem, const HypotheticalPose& pose, const PointCloud& received,
                        std::span<double> out) {
  if (out.size() != received.size()) throw LengthMismatch("sliding output length differs from the received cloud");
  const Mat3 R = pose.q.matrix();
  const double r31 = R(2, 0), r32 = R(2, 1), r33 = R(2, 2);
  if (std::abs(r33) < kSlidingMinR33) {
    throw DegenerateGeometry("sensor z-axis is too close to horizontal for sliding prediction");
  }
  const SurfaceView surface(dem);
  for (std::size_t i = 0; i < received.size(); ++i) {
    const Vec3& c = received.pts[i];
    const Vec3 w = pose.p + R * c;
    const double ground = surface(w.x(), w.y());
    out[i] = (ground - pose.p.z() - r31 * c.x() - r32 * c.y()) / r33;
  }
}

std::vector<double> predict_pc_sliding(const DemGrid& dem, const HypotheticalPose& pose, const PointCloud& received) {
  std::vector<double> z(received.size());
  predict_pc_sliding(dem, pose, received, z);
  return z;
}

double predict_altimeter(const DemGrid& dem, const Vec3& p_bar, double h_baro, const Vec3& dp) {
  return (h_baro + dp.z()) - sample_bilinear(dem, p_bar.x() + dp.x(), p_bar.y() + dp.y());
}

double innovation_error(const PointCloud& received, const PointCloud& predicted) {
  if (received.size() != predicted.size()) throw LengthMismatch("point clouds differ in length");
  if (received.size() == 0) return 0.0;
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < received.size(); ++i) sum += (received.pts[i] - predicted.pts[i]).cwiseAbs();
  return (sum / static_cast<double>(received.size())).norm();
}

double innovation_error(const PointCloud& received, std::span<const double> predicted_z) {
  if (received.size() != predicted_z.size()) throw LengthMismatch("predicted z count differs from the cloud");
  if (received.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < received.size(); ++i) sum += std::abs(received.pts[i].z() - predicted_z[i]);
  return sum / static_cast<double>(received.size());
}

double innovation_error(double received_alt, double predicted_alt) { return received_alt - predicted_alt; }

}  // namespace tanav

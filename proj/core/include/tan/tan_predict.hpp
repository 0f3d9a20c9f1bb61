#pragma once

#include <span>
#include <string>
#include <vector>

#include "tan/geometry.hpp"
#include "tan/scan.hpp"
#include "tan/terrain.hpp"

namespace tanav {

/// Pose a particle hypothesises: p_bar + dp, q_bar * exp(dtheta).
struct HypotheticalPose {
  Vec3 p = Vec3::Zero();
  UnitQuaternion q;
};

HypotheticalPose make_hypothetical_pose(const Vec3& p_bar, const UnitQuaternion& q_bar, const Vec3& dp,
                                        const Vec3& dtheta);

enum class PredictorKind { raycast, sliding, altimeter };

std::string to_string(PredictorKind k);
PredictorKind predictor_from_string(const std::string& s);

/// Minimum |r33| (vertical component of the sensor z-axis) for sliding.
inline constexpr double kSlidingMinR33 = 0.05;

/// Innovation assigned to a particle whose prediction is impossible
/// (ray miss, degenerate sliding geometry, pose off the DEM).
inline constexpr double kMissError = 1e4;

/// Noiseless raycast prediction of the pattern from the hypothetical pose,
/// in that pose's sensor frame. Throws RayMiss(i).
PointCloud predict_pc_raycast(const DemGrid& dem, const HypotheticalPose& pose, const ScanPattern& pattern,
                              RaycastMethod method, double t_max = 20000.0);

/// Sliding-grid prediction of sensor-frame z for every received point.
///
/// Each received point is mapped to the navigation frame with the
/// hypothetical pose, the DEM surface is read at that horizontal location,
/// and the point is slid along the sensor z-axis until its height matches.
/// Throws DegenerateGeometry when |r33| < kSlidingMinR33 and OutOfBounds when
/// a mapped point leaves the DEM.
std::vector<double> predict_pc_sliding(const DemGrid& dem, const HypotheticalPose& pose, const PointCloud& received);

/// Allocation-free form; out.size() must equal received.size().
void predict_pc_sliding(const DemGrid& dem, const HypotheticalPose& pose, const PointCloud& received,
                        std::span<double> out);

/// Predicted clearance with the nominal height replaced by the barometer:
/// (h_baro + dp.z) - DEM(p_bar.xy + dp.xy), bilinear.
double predict_altimeter(const DemGrid& dem, const Vec3& p_bar, double h_baro, const Vec3& dp);

/// Raycast innovation: root of the summed squares of per-axis mean |diff|.
double innovation_error(const PointCloud& received, const PointCloud& predicted);

/// Sliding innovation: mean |z - z_hat|.
double innovation_error(const PointCloud& received, std::span<const double> predicted_z);

/// Altimeter innovation, signed: a - a_hat.
double innovation_error(double received_alt, double predicted_alt);

}  // namespace tanav

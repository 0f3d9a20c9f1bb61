#pragma once

#include <optional>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "tan/terrain.hpp"

namespace tanav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Scalar-first Hamilton unit quaternion describing a body-to-navigation rotation.
struct UnitQuaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static UnitQuaternion identity() { return {}; }

  double norm() const;
  UnitQuaternion normalized() const;
  UnitQuaternion conjugate() const { return {w, -x, -y, -z}; }
  Mat3 matrix() const;
  Vec3 vec() const { return {x, y, z}; }
};

/// Exponential map: rotation by |theta| about theta / |theta|.
UnitQuaternion quat_from_rotvec(const Vec3& theta);

/// Inverse of quat_from_rotvec, angle in [0, pi].
Vec3 quat_to_rotvec(const UnitQuaternion& q);

/// Hamilton product a * b, renormalized.
UnitQuaternion quat_compose(const UnitQuaternion& a, const UnitQuaternion& b);

Vec3 quat_rotate(const UnitQuaternion& q, const Vec3& v);

/// Rotation about navigation z (yaw) then body x (roll): R = Rz(yaw) * Rx(roll).
UnitQuaternion quat_from_yaw_roll(double yaw, double roll);

/// Yaw-pitch-roll (z-y-x) composition.
UnitQuaternion quat_from_euler(double yaw, double pitch, double roll);

Mat3 skew(const Vec3& v);

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit
};

struct Triangle {
  Vec3 v0, v1, v2;
};

struct Hit {
  double t = 0.0;
  Vec3 point = Vec3::Zero();
};

/// Moller-Trumbore intersection. Returns the hit with t >= 0 whose
/// barycentric coordinates lie in [-edge_tol, 1 + edge_tol]. Near-parallel
/// rays (|det| < 1e-12) never hit.
std::optional<Hit> ray_triangle_intersect(const Ray& r, const Triangle& tri, double edge_tol = 0.0);

enum class RaycastMethod { triangles, bisection };

enum class CastStatus { hit, no_hit, out_of_bounds };

struct CastResult {
  CastStatus status = CastStatus::no_hit;
  Hit hit;

  explicit operator bool() const { return status == CastStatus::hit; }
};

/// Bracket width at which the bisection caster stops.
inline constexpr double kBisectionTolerance = 1e-3;

/// First intersection of a ray with the triangulated DEM surface.
///
/// triangles: 2-D DDA over the cells crossed by the ray's horizontal
/// projection, testing the two triangles of each cell in traversal order.
/// bisection: march t in steps of cell/2 until ray_z(t) - surface(t) changes
/// sign, then bisect the bracket down to kBisectionTolerance.
/// A ray that leaves the grid first reports out_of_bounds; one that travels
/// past t_max (or starts below the surface) reports no_hit.
CastResult raycast_dem(const DemGrid& dem, const Ray& r, double t_max, RaycastMethod method);

/// Throwing form: NoHit beyond t_max, OutOfBounds when the ray leaves the grid.
Hit raycast_dem_first_hit(const DemGrid& dem, const Ray& r, double t_max, RaycastMethod method);

std::string to_string(RaycastMethod m);

}  // namespace tanav

#include "tan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tan/errors.hpp"

namespace tanav {

double UnitQuaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

UnitQuaternion UnitQuaternion::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Mat3 UnitQuaternion::matrix() const {
  const double ww = w * w, xx = x * x, yy = y * y, zz = z * z;
  const double xy = x * y, xz = x * z, yz = y * z, wx = w * x, wy = w * y, wz = w * z;
  Mat3 m;
  m << ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),
       2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),
       2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz;
  return m;
}

UnitQuaternion quat_from_rotvec(const Vec3& theta) {
  const double angle = theta.norm();
  double s;  // sin(angle / 2) / angle
  double c;
  if (angle < 1e-6) {
    const double a2 = angle * angle;
    s = 0.5 - a2 / 48.0;
    c = 1.0 - a2 / 8.0;
  } else {
    s = std::sin(0.5 * angle) / angle;
    c = std::cos(0.5 * angle);
  }
  return UnitQuaternion{c, s * theta.x(), s * theta.y(), s * theta.z()}.normalized();
}

Vec3 quat_to_rotvec(const UnitQuaternion& q_in) {
  UnitQuaternion q = q_in.normalized();
  if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
  const Vec3 v = q.vec();
  const double vn = v.norm();
  if (vn < 1e-12) return 2.0 * v / q.w;
  const double angle = 2.0 * std::atan2(vn, q.w);
  return v * (angle / vn);
}

UnitQuaternion quat_compose(const UnitQuaternion& a, const UnitQuaternion& b) {
  return UnitQuaternion{a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w}
      .normalized();
}

Vec3 quat_rotate(const UnitQuaternion& q, const Vec3& v) {
  const Vec3 u = q.vec();
  const Vec3 t = 2.0 * u.cross(v);
  return v + q.w * t + u.cross(t);
}

UnitQuaternion quat_from_yaw_roll(double yaw, double roll) {
  return quat_compose(quat_from_rotvec(Vec3(0.0, 0.0, yaw)), quat_from_rotvec(Vec3(roll, 0.0, 0.0)));
}

UnitQuaternion quat_from_euler(double yaw, double pitch, double roll) {
  return quat_compose(quat_compose(quat_from_rotvec(Vec3(0.0, 0.0, yaw)), quat_from_rotvec(Vec3(0.0, pitch, 0.0))),
                      quat_from_rotvec(Vec3(roll, 0.0, 0.0)));
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

std::optional<Hit> ray_triangle_intersect(const Ray& r, const Triangle& tri, double edge_tol) {
  const Vec3 e1 = tri.v1 - tri.v0;
  const Vec3 e2 = tri.v2 - tri.v0;
  const Vec3 p = r.dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-12) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = r.origin - tri.v0;
  const double u = s.dot(p) * inv;
  if (u < -edge_tol || u > 1.0 + edge_tol) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = r.dir.dot(q) * inv;
  if (v < -edge_tol || u + v > 1.0 + edge_tol) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t < 0.0) return std::nullopt;
  return Hit{t, r.origin + t * r.dir};
}

std::string to_string(RaycastMethod m) { return m == RaycastMethod::triangles ? "triangles" : "bisection"; }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDemEdgeTol = 1e-9;

double surface_clamped(const DemGrid& dem, double x, double y) {
  return sample_surface(dem, std::clamp(x, dem.x_origin, dem.x_max()), std::clamp(y, dem.y_origin, dem.y_max()));
}

// Parameter at which the horizontal projection leaves the grid extent.
double exit_parameter(const DemGrid& dem, const Ray& r) {
  double t = kInf;
  if (r.dir.x() > 0.0) t = std::min(t, (dem.x_max() - r.origin.x()) / r.dir.x());
  if (r.dir.x() < 0.0) t = std::min(t, (dem.x_origin - r.origin.x()) / r.dir.x());
  if (r.dir.y() > 0.0) t = std::min(t, (dem.y_max() - r.origin.y()) / r.dir.y());
  if (r.dir.y() < 0.0) t = std::min(t, (dem.y_origin - r.origin.y()) / r.dir.y());
  return std::max(t, 0.0);
}

CastResult make_hit(const Ray& r, double t) {
  return {CastStatus::hit, Hit{t, r.origin + t * r.dir}};
}

CastResult cast_vertical(const DemGrid& dem, const Ray& r, double t_max) {
  if (r.dir.z() >= 0.0) return {};
  const double ground = sample_surface(dem, r.origin.x(), r.origin.y());
  const double t = (r.origin.z() - ground) / -r.dir.z();
  if (t < 0.0 || t > t_max) return {};
  CastResult res = make_hit(r, t);
  res.hit.point.z() = ground;
  return res;
}

CastResult cast_triangles(const DemGrid& dem, const Ray& r, double t_max) {
  const double dx = r.dir.x();
  const double dy = r.dir.y();
  const double cell = dem.cell;
  const double gx = (r.origin.x() - dem.x_origin) / cell;
  const double gy = (r.origin.y() - dem.y_origin) / cell;
  int col = std::clamp(static_cast<int>(std::floor(gx)), 0, dem.n_cols - 2);
  int row = std::clamp(static_cast<int>(std::floor(gy)), 0, dem.n_rows - 2);

  const int step_c = dx > 0.0 ? 1 : -1;
  const int step_r = dy > 0.0 ? 1 : -1;
  const double delta_x = dx != 0.0 ? cell / std::abs(dx) : kInf;
  const double delta_y = dy != 0.0 ? cell / std::abs(dy) : kInf;
  double next_x = kInf;
  double next_y = kInf;
  if (dx != 0.0) next_x = (dem.x_origin + (col + (dx > 0.0 ? 1 : 0)) * cell - r.origin.x()) / dx;
  if (dy != 0.0) next_y = (dem.y_origin + (row + (dy > 0.0 ? 1 : 0)) * cell - r.origin.y()) / dy;

  double t_in = 0.0;
  while (true) {
    if (t_in > t_max) return {};
    const double t_out = std::min(next_x, next_y);
    // Lowest ray height inside this cell's parameter interval.
    const double z_low = r.dir.z() <= 0.0 ? r.origin.z() + r.dir.z() * std::min(t_out, t_max)
                                          : r.origin.z() + r.dir.z() * t_in;
    if (z_low <= cell_max(dem, col, row)) {
      const double x0 = dem.x_origin + col * cell;
      const double y0 = dem.y_origin + row * cell;
      const Vec3 sw(x0, y0, dem.at_sw(col, row));
      const Vec3 se(x0 + cell, y0, dem.at_sw(col + 1, row));
      const Vec3 nw(x0, y0 + cell, dem.at_sw(col, row + 1));
      const Vec3 ne(x0 + cell, y0 + cell, dem.at_sw(col + 1, row + 1));
      double best = kInf;
      if (auto h = ray_triangle_intersect(r, Triangle{sw, se, ne}, kDemEdgeTol)) best = std::min(best, h->t);
      if (auto h = ray_triangle_intersect(r, Triangle{sw, ne, nw}, kDemEdgeTol)) best = std::min(best, h->t);
      if (best < kInf) {
        if (best > t_max) return {};
        return make_hit(r, best);
      }
    }
    if (next_x < next_y) {
      col += step_c;
      t_in = next_x;
      next_x += delta_x;
    } else {
      row += step_r;
      t_in = next_y;
      next_y += delta_y;
    }
    if (col < 0 || col > dem.n_cols - 2 || row < 0 || row > dem.n_rows - 2) {
      if (t_in > t_max) return {};
      return {CastStatus::out_of_bounds, {}};
    }
  }
}

CastResult cast_bisection(const DemGrid& dem, const Ray& r, double t_max) {
  auto f = [&](double t) {
    return r.origin.z() + t * r.dir.z() - surface_clamped(dem, r.origin.x() + t * r.dir.x(), r.origin.y() + t * r.dir.y());
  };
  const double t_exit = exit_parameter(dem, r);
  const double t_end = std::min(t_max, t_exit);
  const double step = 0.5 * dem.cell;

  double lo = 0.0;
  if (f(lo) < 0.0) return {};
  double hi = lo;
  bool bracketed = false;
  while (hi < t_end) {
    hi = std::min(lo + step, t_end);
    if (f(hi) <= 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed) {
    if (t_exit < t_max) return {CastStatus::out_of_bounds, {}};
    return {};
  }
  while (hi - lo > kBisectionTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return make_hit(r, 0.5 * (lo + hi));
}

}  // namespace

CastResult raycast_dem(const DemGrid& dem, const Ray& r, double t_max, RaycastMethod method) {
  if (!dem.contains(r.origin.x(), r.origin.y())) return {CastStatus::out_of_bounds, {}};
  if (r.origin.z() < sample_surface(dem, r.origin.x(), r.origin.y())) return {};
  if (std::hypot(r.dir.x(), r.dir.y()) < 1e-12) return cast_vertical(dem, r, t_max);
  return method == RaycastMethod::triangles ? cast_triangles(dem, r, t_max) : cast_bisection(dem, r, t_max);
}

Hit raycast_dem_first_hit(const DemGrid& dem, const Ray& r, double t_max, RaycastMethod method) {
  const CastResult res = raycast_dem(dem, r, t_max, method);
  switch (res.status) {
    case CastStatus::hit:
      return res.hit;
    case CastStatus::out_of_bounds:
      throw OutOfBounds("ray left the DEM extent before hitting the surface");
    case CastStatus::no_hit:
      break;
  }
  throw NoHit("no surface hit within t_max");
}

}  // namespace tanav

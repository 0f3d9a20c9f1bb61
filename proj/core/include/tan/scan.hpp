#pragma once

#include <vector>

#include "tan/geometry.hpp"

namespace tanav {

/// Ordered sensor-frame ray directions of a point-cloud sensor.
struct ScanPattern {
  std::vector<Vec3> dirs;
  double fov_deg = 0.0;
  int rows = 0;
  int cols = 0;

  std::size_t size() const { return dirs.size(); }
};

/// Ordered sensor-frame points; index i belongs to pattern direction i.
struct PointCloud {
  std::vector<Vec3> pts;

  std::size_t size() const { return pts.size(); }
};

/// rows x cols angular grid centred on -z. Column c tilts towards +x and row
/// r towards +y by angles spread evenly over [-fov, +fov]; a single row or
/// column sits at 0. Row-major order.
ScanPattern make_scan_pattern(int rows, int cols, double fov_deg);

}  // namespace tanav

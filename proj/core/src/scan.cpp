#include "tan/scan.hpp"

#include <cmath>
#include <numbers>

#include "tan/errors.hpp"

namespace tanav {

namespace {

double spread(int i, int n, double half_angle) {
  if (n == 1) return 0.0;
  return -half_angle + 2.0 * half_angle * i / (n - 1);
}

}  // namespace

ScanPattern make_scan_pattern(int rows, int cols, double fov_deg) {
  if (rows < 1 || cols < 1) throw ValueError("scan pattern needs at least one row and column");
  if (!(fov_deg > 0.0 && fov_deg < 90.0)) throw ValueError("scan fov must be in (0, 90) degrees");
  const double half = fov_deg * std::numbers::pi / 180.0;
  ScanPattern pat;
  pat.rows = rows;
  pat.cols = cols;
  pat.fov_deg = fov_deg;
  pat.dirs.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      pat.dirs.push_back(Vec3(std::tan(spread(c, cols, half)), std::tan(spread(r, rows, half)), -1.0).normalized());
    }
  }
  return pat;
}

}  // namespace tanav

#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tanav {

/// Regular-grid digital elevation model.
///
/// Nodes are point-registered: node (col, row) sits at
/// x = x_origin + col * cell, y = y_origin + (n_rows - 1 - row) * cell, so row 0
/// is the northernmost row and (x_origin, y_origin) is the south-west node.
struct DemGrid {
  double x_origin = 0.0;
  double y_origin = 0.0;
  double cell = 30.0;
  int n_cols = 0;
  int n_rows = 0;
  std::vector<double> elev;  // row-major, row 0 = north
  double nodata = -9999.0;

  double extent_x() const { return (n_cols - 1) * cell; }
  double extent_y() const { return (n_rows - 1) * cell; }
  double x_max() const { return x_origin + extent_x(); }
  double y_max() const { return y_origin + extent_y(); }

  bool contains(double x, double y) const {
    return x >= x_origin && x <= x_max() && y >= y_origin && y <= y_max();
  }

  /// Elevation at a node indexed from the south-west corner.
  double at_sw(int col, int row_from_south) const {
    return elev[static_cast<std::size_t>(n_rows - 1 - row_from_south) * n_cols + col];
  }

  bool operator==(const DemGrid&) const = default;
};

/// Throws ValueError when the grid violates its invariants.
void validate(const DemGrid& dem);

enum class TerrainTag { rugged, flat };

struct TerrainKind {
  TerrainTag tag = TerrainTag::rugged;
  std::uint64_t seed = 2024;
  double extent = 16000.0;  // meters, square
  double base_elevation = 100.0;
};

std::string to_string(TerrainTag tag);
TerrainTag terrain_tag_from_string(const std::string& s);

/// Bilinear interpolation of the four surrounding nodes.
/// Throws OutOfBounds outside the extent and NoData if a corner is nodata.
double sample_bilinear(const DemGrid& dem, double x, double y);

/// Height of the triangulated surface: each cell split along its SW-NE
/// diagonal into two planar triangles. This is the surface the raycasters
/// intersect and the sliding predictor reads.
double sample_surface(const DemGrid& dem, double x, double y);

/// Inline evaluator of the triangulated surface for hot loops; same values
/// as sample_surface up to rounding.
class SurfaceView {
 public:
  explicit SurfaceView(const DemGrid& dem)
      : dem_(&dem), inv_cell_(1.0 / dem.cell), x_max_(dem.x_max()), y_max_(dem.y_max()) {}

  double operator()(double x, double y) const {
    const DemGrid& d = *dem_;
    if (!(x >= d.x_origin && x <= x_max_ && y >= d.y_origin && y <= y_max_)) out_of_bounds(x, y);
    const double gx = (x - d.x_origin) * inv_cell_;
    const double gy = (y - d.y_origin) * inv_cell_;
    const int col = std::min(static_cast<int>(gx), d.n_cols - 2);
    const int row = std::min(static_cast<int>(gy), d.n_rows - 2);
    const double* sw = d.elev.data() + static_cast<std::size_t>(d.n_rows - 1 - row) * d.n_cols + col;
    const double* nw = sw - d.n_cols;
    const double h00 = sw[0], h10 = sw[1], h01 = nw[0], h11 = nw[1];
    if (h00 == d.nodata || h10 == d.nodata || h01 == d.nodata || h11 == d.nodata) no_data(col, row);
    const double u = gx - col, v = gy - row;
    if (u >= v) return h00 + u * (h10 - h00) + v * (h11 - h10);
    return h00 + v * (h01 - h00) + u * (h11 - h01);
  }

 private:
  [[noreturn]] static void out_of_bounds(double x, double y);
  [[noreturn]] static void no_data(int col, int row);

  const DemGrid* dem_;
  double inv_cell_, x_max_, y_max_;
};

/// Largest elevation of the four nodes of the cell containing (x, y).
double cell_max(const DemGrid& dem, int col, int row_from_south);

DemGrid parse_ascii_grid(std::istream& in);
DemGrid parse_ascii_grid(const std::string& text);
void serialize_ascii_grid(const DemGrid& dem, std::ostream& out);
std::string serialize_ascii_grid(const DemGrid& dem);

DemGrid load_ascii_grid(const std::string& path);
void save_ascii_grid(const DemGrid& dem, const std::string& path);

/// Deterministic synthetic terrain. The grid's south-west node is at (0, 0).
DemGrid synth_terrain(const TerrainKind& kind, double cell, int n_cols, int n_rows);

/// Convenience: square grid covering kind.extent at the given cell size.
DemGrid synth_terrain(const TerrainKind& kind, double cell = 30.0);

struct DemStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t nodata_count = 0;
};

DemStats dem_stats(const DemGrid& dem);

}  // namespace tanav

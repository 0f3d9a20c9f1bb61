#include "tan/terrain.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "tan/errors.hpp"
#include "tan/rng.hpp"

namespace tanav {

namespace {

struct CellLocation {
  int col;
  int row;  // from south
  double u;
  double v;
};

CellLocation locate(const DemGrid& dem, double x, double y) {
  if (!(dem.contains(x, y))) {
    throw OutOfBounds("point (" + std::to_string(x) + ", " + std::to_string(y) + ") is outside the DEM");
  }
  const double gx = (x - dem.x_origin) / dem.cell;
  const double gy = (y - dem.y_origin) / dem.cell;
  // gx, gy >= 0 here, so truncation is floor.
  const int col = std::min(static_cast<int>(gx), dem.n_cols - 2);
  const int row = std::min(static_cast<int>(gy), dem.n_rows - 2);
  return {col, row, gx - col, gy - row};
}

struct Corners {
  double h00, h10, h01, h11;  // SW, SE, NW, NE
};

Corners corners(const DemGrid& dem, const CellLocation& loc) {
  Corners c{dem.at_sw(loc.col, loc.row), dem.at_sw(loc.col + 1, loc.row), dem.at_sw(loc.col, loc.row + 1),
            dem.at_sw(loc.col + 1, loc.row + 1)};
  if (c.h00 == dem.nodata || c.h10 == dem.nodata || c.h01 == dem.nodata || c.h11 == dem.nodata) {
    throw NoData("nodata node in cell (" + std::to_string(loc.col) + ", " + std::to_string(loc.row) + ")");
  }
  return c;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_number(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

void validate(const DemGrid& dem) {
  if (!(dem.cell > 0.0) || !std::isfinite(dem.cell)) throw ValueError("cellsize must be > 0");
  if (dem.n_cols < 2 || dem.n_rows < 2) throw ValueError("grid must be at least 2x2");
  if (dem.elev.size() != static_cast<std::size_t>(dem.n_cols) * dem.n_rows) {
    throw ValueError("elevation count does not match nrows * ncols");
  }
  for (double h : dem.elev) {
    if (h != dem.nodata && !std::isfinite(h)) throw ValueError("non-finite elevation");
  }
}

std::string to_string(TerrainTag tag) { return tag == TerrainTag::rugged ? "rugged" : "flat"; }

TerrainTag terrain_tag_from_string(const std::string& s) {
  if (s == "rugged") return TerrainTag::rugged;
  if (s == "flat") return TerrainTag::flat;
  throw ValueError("unknown terrain kind '" + s + "'");
}

double sample_bilinear(const DemGrid& dem, double x, double y) {
  const CellLocation loc = locate(dem, x, y);
  const Corners c = corners(dem, loc);
  const double south = c.h00 + loc.u * (c.h10 - c.h00);
  const double north = c.h01 + loc.u * (c.h11 - c.h01);
  return south + loc.v * (north - south);
}

double sample_surface(const DemGrid& dem, double x, double y) { return SurfaceView(dem)(x, y); }

void SurfaceView::out_of_bounds(double x, double y) {
  throw OutOfBounds("point (" + std::to_string(x) + ", " + std::to_string(y) + ") is outside the DEM");
}

void SurfaceView::no_data(int col, int row) {
  throw NoData("nodata node in cell (" + std::to_string(col) + ", " + std::to_string(row) + ")");
}

double cell_max(const DemGrid& dem, int col, int row) {
  return std::max({dem.at_sw(col, row), dem.at_sw(col + 1, row), dem.at_sw(col, row + 1), dem.at_sw(col + 1, row + 1)});
}

DemGrid parse_ascii_grid(std::istream& in) {
  static constexpr std::array<const char*, 6> kKeys = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize",
                                                       "nodata_value"};
  std::array<double, 6> header{};
  std::array<bool, 6> seen{};

  std::string line;
  std::size_t line_no = 0;
  for (int h = 0; h < 6; ++h) {
    if (!std::getline(in, line)) throw ParseError(line_no + 1, "unexpected end of header");
    ++line_no;
    std::istringstream ls(line);
    std::string key, value, extra;
    if (!(ls >> key >> value) || (ls >> extra)) throw ParseError(line_no, "malformed header line '" + line + "'");
    const auto it = std::find(kKeys.begin(), kKeys.end(), lower(key));
    if (it == kKeys.end()) throw ParseError(line_no, "unknown header key '" + key + "'");
    const auto idx = static_cast<std::size_t>(it - kKeys.begin());
    if (seen[idx]) throw ParseError(line_no, "duplicate header key '" + key + "'");
    if (!parse_number(value, header[idx])) throw ParseError(line_no, "bad number '" + value + "'");
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < kKeys.size(); ++i) {
    if (!seen[i]) throw ParseError(line_no, std::string("missing header key '") + kKeys[i] + "'");
  }

  DemGrid dem;
  if (header[0] != std::floor(header[0]) || header[1] != std::floor(header[1])) {
    throw ParseError(2, "ncols/nrows must be integers");
  }
  dem.n_cols = static_cast<int>(header[0]);
  dem.n_rows = static_cast<int>(header[1]);
  dem.x_origin = header[2];
  dem.y_origin = header[3];
  dem.cell = header[4];
  dem.nodata = header[5];
  if (!(dem.cell > 0.0)) throw ValueError("cellsize must be > 0");
  if (dem.n_cols < 2 || dem.n_rows < 2) throw ValueError("grid must be at least 2x2");

  dem.elev.reserve(static_cast<std::size_t>(dem.n_cols) * dem.n_rows);
  int rows_read = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (rows_read == dem.n_rows) throw ParseError(line_no, "more data rows than nrows");
    std::istringstream ls(line);
    std::string tok;
    int count = 0;
    while (ls >> tok) {
      double v = 0.0;
      if (!parse_number(tok, v)) throw ParseError(line_no, "bad number '" + tok + "'");
      if (count == dem.n_cols) throw ParseError(line_no, "row has more than ncols values");
      dem.elev.push_back(v);
      ++count;
    }
    if (count != dem.n_cols) {
      throw ParseError(line_no, "row has " + std::to_string(count) + " values, expected " + std::to_string(dem.n_cols));
    }
    ++rows_read;
  }
  if (rows_read != dem.n_rows) {
    throw ParseError(line_no, "expected " + std::to_string(dem.n_rows) + " data rows, got " + std::to_string(rows_read));
  }
  validate(dem);
  return dem;
}

DemGrid parse_ascii_grid(const std::string& text) {
  std::istringstream in(text);
  return parse_ascii_grid(in);
}

void serialize_ascii_grid(const DemGrid& dem, std::ostream& out) {
  out << "ncols " << dem.n_cols << '\n'
      << "nrows " << dem.n_rows << '\n'
      << "xllcorner " << format_double(dem.x_origin) << '\n'
      << "yllcorner " << format_double(dem.y_origin) << '\n'
      << "cellsize " << format_double(dem.cell) << '\n'
      << "NODATA_value " << format_double(dem.nodata) << '\n';
  for (int r = 0; r < dem.n_rows; ++r) {
    for (int c = 0; c < dem.n_cols; ++c) {
      if (c) out << ' ';
      out << format_double(dem.elev[static_cast<std::size_t>(r) * dem.n_cols + c]);
    }
    out << '\n';
  }
}

std::string serialize_ascii_grid(const DemGrid& dem) {
  std::ostringstream out;
  serialize_ascii_grid(dem, out);
  return out.str();
}

DemGrid load_ascii_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_ascii_grid(in);
}

void save_ascii_grid(const DemGrid& dem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  serialize_ascii_grid(dem, out);
}

DemGrid synth_terrain(const TerrainKind& kind, double cell, int n_cols, int n_rows) {
  if (n_cols < 2 || n_rows < 2) throw ValueError("grid must be at least 2x2");
  if (!(cell > 0.0)) throw ValueError("cell must be > 0");
  if (!(kind.extent > 0.0)) throw ValueError("terrain extent must be > 0");

  DemGrid dem;
  dem.cell = cell;
  dem.n_cols = n_cols;
  dem.n_rows = n_rows;
  dem.elev.assign(static_cast<std::size_t>(n_cols) * n_rows, kind.base_elevation);

  Engine eng = make_engine(kind.seed, Stream::terrain);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(eng); };
  const double two_pi = 2.0 * std::numbers::pi;
  const double ex = dem.extent_x();
  const double ey = dem.extent_y();

  auto add_field = [&](auto&& f) {
    for (int r = 0; r < n_rows; ++r) {
      const double y = (n_rows - 1 - r) * cell;
      for (int c = 0; c < n_cols; ++c) {
        dem.elev[static_cast<std::size_t>(r) * n_cols + c] += f(c * cell, y);
      }
    }
  };

  if (kind.tag == TerrainTag::rugged) {
    // Gaussian hills, roughly one per square kilometre, truncated at 4 sigma.
    const auto n_hills = static_cast<int>(std::max(8.0, std::round(ex * ey / 1.0e6)));
    for (int k = 0; k < n_hills; ++k) {
      const double cx = uniform(0.0, ex);
      const double cy = uniform(0.0, ey);
      const double amp = uniform(40.0, 220.0);
      const double sigma = uniform(250.0, 900.0);
      const double reach = 4.0 * sigma;
      const int c0 = std::max(0, static_cast<int>(std::floor((cx - reach) / cell)));
      const int c1 = std::min(n_cols - 1, static_cast<int>(std::ceil((cx + reach) / cell)));
      const int s0 = std::max(0, static_cast<int>(std::floor((cy - reach) / cell)));
      const int s1 = std::min(n_rows - 1, static_cast<int>(std::ceil((cy + reach) / cell)));
      const double inv = 1.0 / (2.0 * sigma * sigma);
      for (int s = s0; s <= s1; ++s) {
        const double dy = s * cell - cy;
        const std::size_t row = static_cast<std::size_t>(n_rows - 1 - s) * n_cols;
        for (int c = c0; c <= c1; ++c) {
          const double dx = c * cell - cx;
          dem.elev[row + c] += amp * std::exp(-(dx * dx + dy * dy) * inv);
        }
      }
    }
    const double lx = uniform(3000.0, 5000.0), px = uniform(0.0, two_pi);
    const double ly = uniform(3000.0, 5000.0), py = uniform(0.0, two_pi);
    add_field([&](double x, double y) { return 40.0 * std::sin(two_pi * x / lx + px) + 40.0 * std::sin(two_pi * y / ly + py); });
  } else {
    // Gentle tilt (0.05 %) rising towards the north-east plus <= 5 m of undulation.
    const double dir = uniform(0.0, 0.5 * std::numbers::pi);
    const double sx = 5.0e-4 * std::cos(dir);
    const double sy = 5.0e-4 * std::sin(dir);
    const double lx = uniform(1500.0, 3000.0), px = uniform(0.0, two_pi);
    const double ly = uniform(1500.0, 3000.0), py = uniform(0.0, two_pi);
    add_field([&](double x, double y) {
      return sx * x + sy * y + 1.25 * std::sin(two_pi * x / lx + px) + 1.25 * std::sin(two_pi * y / ly + py);
    });
  }
  return dem;
}

DemGrid synth_terrain(const TerrainKind& kind, double cell) {
  const int n = static_cast<int>(std::round(kind.extent / cell)) + 1;
  return synth_terrain(kind, cell, n, n);
}

DemStats dem_stats(const DemGrid& dem) {
  DemStats s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t n = 0;
  for (double h : dem.elev) {
    if (h == dem.nodata) {
      ++s.nodata_count;
      continue;
    }
    s.min = std::min(s.min, h);
    s.max = std::max(s.max, h);
    sum += h;
    ++n;
  }
  s.mean = n ? sum / static_cast<double>(n) : 0.0;
  return s;
}

}  // namespace tanav

#include "tan/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "tan/errors.hpp"
#include "tan/rng.hpp"
#include "tan/runner.hpp"
#include "tan/tan_predict.hpp"
#include "tan/vehicle_sim.hpp"

namespace tanav {

std::string to_string(BenchMethod m) {
  switch (m) {
    case BenchMethod::raycast_triangles:
      return "raycast-triangles";
    case BenchMethod::raycast_bisection:
      return "raycast-bisection";
    case BenchMethod::sliding:
      return "sliding";
  }
  return "?";
}

BenchMethod bench_method_from_string(const std::string& s) {
  if (s == "raycast-triangles" || s == "triangles") return BenchMethod::raycast_triangles;
  if (s == "raycast-bisection" || s == "bisection") return BenchMethod::raycast_bisection;
  if (s == "sliding") return BenchMethod::sliding;
  throw ValueError("unknown bench method '" + s + "'");
}

namespace {

struct StepInput {
  PointCloud cloud;
  std::vector<HypotheticalPose> poses;
};

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double idx = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (idx - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::vector<BenchRow> bench_predictors(const DemGrid& dem, const ScanPattern& pattern, std::size_t n_particles,
                                       std::size_t steps, const BenchOptions& opt) {
  if (n_particles < 1 || steps < 1) throw ValueError("particles and steps must be >= 1");
  const double margin = opt.spread * 4.0 + opt.altitude_agl + 200.0;
  if (dem.extent_x() < 2.0 * margin || dem.extent_y() < 2.0 * margin) {
    throw ValueError("DEM is too small for the benchmark geometry");
  }

  std::vector<StepInput> inputs(steps);
  SensorNoise noise;
  noise.seed = opt.seed;
  for (std::size_t s = 0; s < steps; ++s) {
    Engine eng = make_engine(opt.seed, Stream::bench, s);
    const double x = dem.x_origin + margin + uniform01(eng) * (dem.extent_x() - 2.0 * margin);
    const double y = dem.y_origin + margin + uniform01(eng) * (dem.extent_y() - 2.0 * margin);
    const double yaw = 2.0 * std::numbers::pi * uniform01(eng);
    const double roll = 0.2 * (uniform01(eng) - 0.5);
    const Pose truth{Vec3(x, y, sample_surface(dem, x, y) + opt.altitude_agl), quat_from_yaw_roll(yaw, roll)};
    inputs[s].cloud = sense_point_cloud(dem, truth, pattern, noise, s, opt.t_max);
    inputs[s].poses.reserve(n_particles);
    for (std::size_t i = 0; i < n_particles; ++i) {
      const Vec3 dp(opt.spread * gauss(eng), opt.spread * gauss(eng), 0.2 * opt.spread * gauss(eng));
      const Vec3 dth(1e-3 * gauss(eng), 1e-3 * gauss(eng), 1e-3 * gauss(eng));
      inputs[s].poses.push_back(make_hypothetical_pose(truth.p, truth.q, dp, dth));
    }
  }

  using clock = std::chrono::steady_clock;
  std::vector<double> z(pattern.size());
  std::vector<std::vector<double>> times(opt.methods.size());
  std::vector<std::size_t> failures(opt.methods.size(), 0);
  double sink = 0.0;
  // Methods are interleaved per step so that machine load drifts affect them alike.
  for (const StepInput& in : inputs) {
    for (std::size_t mi = 0; mi < opt.methods.size(); ++mi) {
      const BenchMethod method = opt.methods[mi];
      const RaycastMethod rm =
          method == BenchMethod::raycast_bisection ? RaycastMethod::bisection : RaycastMethod::triangles;
      const auto t0 = clock::now();
      for (const HypotheticalPose& pose : in.poses) {
        try {
          if (method == BenchMethod::sliding) {
            predict_pc_sliding(dem, pose, in.cloud, z);
            sink += z[0];
          } else {
            sink += predict_pc_raycast(dem, pose, pattern, rm, opt.t_max).pts[0].z();
          }
        } catch (const Error&) {
          ++failures[mi];
        }
      }
      times[mi].push_back(std::chrono::duration<double, std::micro>(clock::now() - t0).count());
    }
  }
  // Keeps the optimizer from discarding the predictions.
  [[maybe_unused]] volatile double guard = sink;

  std::vector<BenchRow> rows;
  for (std::size_t mi = 0; mi < opt.methods.size(); ++mi) {
    BenchRow row;
    row.method = opt.methods[mi];
    row.m_points = pattern.size();
    row.n_particles = n_particles;
    row.failures = failures[mi];
    double sum = 0.0;
    for (double t : times[mi]) sum += t;
    row.mean_us = sum / static_cast<double>(times[mi].size());
    row.p50_us = percentile(times[mi], 0.5);
    row.p99_us = percentile(times[mi], 0.99);
    row.per_point_ns = row.mean_us * 1e3 / static_cast<double>(n_particles * pattern.size());
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << kBenchHeader << '\n';
  for (const BenchRow& r : rows) {
    out << to_string(r.method) << ',' << r.m_points << ',' << r.n_particles << ',' << format_double(r.mean_us) << ','
        << format_double(r.p50_us) << ',' << format_double(r.p99_us) << ',' << format_double(r.per_point_ns) << '\n';
  }
}

}  // namespace tanav

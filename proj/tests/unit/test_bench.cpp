#include <gtest/gtest.h>

#include <sstream>

#include "tan/bench.hpp"
#include "tan/errors.hpp"

namespace tanav {
namespace {

DemGrid bench_dem(TerrainTag tag) {
  TerrainKind k;
  k.tag = tag;
  k.extent = 8000.0;
  if (tag == TerrainTag::flat) k.base_elevation = 50.0;
  return synth_terrain(k, 30.0);
}

const BenchRow& row(const std::vector<BenchRow>& rows, BenchMethod m) {
  for (const BenchRow& r : rows) {
    if (r.method == m) return r;
  }
  throw std::logic_error("method missing");
}

TEST(Bench, MethodNames) {
  for (BenchMethod m : {BenchMethod::raycast_triangles, BenchMethod::raycast_bisection, BenchMethod::sliding}) {
    EXPECT_EQ(bench_method_from_string(to_string(m)), m);
  }
  EXPECT_EQ(bench_method_from_string("triangles"), BenchMethod::raycast_triangles);
  EXPECT_THROW(bench_method_from_string("magic"), ValueError);
}

TEST(Bench, RowsAndCsv) {
  const DemGrid dem = bench_dem(TerrainTag::rugged);
  const auto rows = bench_predictors(dem, make_scan_pattern(2, 2, 20.0), 20, 3);
  ASSERT_EQ(rows.size(), 3u);
  for (const BenchRow& r : rows) {
    EXPECT_EQ(r.m_points, 4u);
    EXPECT_EQ(r.n_particles, 20u);
    EXPECT_GT(r.p50_us, 0.0);
    EXPECT_LE(r.p50_us, r.p99_us);
    EXPECT_EQ(r.failures, 0u);
  }
  std::ostringstream os;
  write_bench_csv(rows, os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), kBenchHeader);
}

TEST(Bench, SlidingCostIgnoresRayLength) {
  const DemGrid dem = bench_dem(TerrainTag::rugged);
  const ScanPattern pat = make_scan_pattern(4, 4, 20.0);
  BenchOptions opt;
  opt.methods = {BenchMethod::sliding};
  opt.t_max = 20000.0;
  const double long_range = bench_predictors(dem, pat, 500, 30, opt)[0].p50_us;
  opt.t_max = 2000.0;
  const double short_range = bench_predictors(dem, pat, 500, 30, opt)[0].p50_us;
  EXPECT_GE(long_range / short_range, 0.5);
  EXPECT_LE(long_range / short_range, 2.0);
}

TEST(Bench, RaycastCostGrowsWithRange) {
  const DemGrid dem = bench_dem(TerrainTag::flat);
  const ScanPattern pat = make_scan_pattern(4, 4, 20.0);
  BenchOptions opt;
  opt.methods = {BenchMethod::raycast_triangles};
  opt.altitude_agl = 100.0;
  const auto low = bench_predictors(dem, pat, 200, 20, opt);
  opt.altitude_agl = 1000.0;
  const auto high = bench_predictors(dem, pat, 200, 20, opt);
  EXPECT_LT(row(low, BenchMethod::raycast_triangles).p50_us, row(high, BenchMethod::raycast_triangles).p50_us);
}

}  // namespace
}  // namespace tanav

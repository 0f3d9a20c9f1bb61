#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "tan/scan.hpp"
#include "tan/terrain.hpp"

namespace tanav {

enum class BenchMethod { raycast_triangles, raycast_bisection, sliding };

std::string to_string(BenchMethod m);
BenchMethod bench_method_from_string(const std::string& s);

struct BenchOptions {
  /// Height of the sensor above the terrain directly below it.
  double altitude_agl = 1000.0;
  double t_max = 20000.0;
  /// Horizontal spread of the particle positions around the sensed pose.
  double spread = 50.0;
  std::uint64_t seed = 1;
  std::vector<BenchMethod> methods{BenchMethod::raycast_triangles, BenchMethod::raycast_bisection,
                                   BenchMethod::sliding};
};

struct BenchRow {
  BenchMethod method = BenchMethod::sliding;
  std::size_t m_points = 0;
  std::size_t n_particles = 0;
  double mean_us = 0.0;  // per full N-particle prediction
  double p50_us = 0.0;
  double p99_us = 0.0;
  double per_point_ns = 0.0;
  std::size_t failures = 0;
};

/// Times a full N-particle prediction per step for each method on identical
/// poses and received clouds. Single-threaded.
std::vector<BenchRow> bench_predictors(const DemGrid& dem, const ScanPattern& pattern, std::size_t n_particles,
                                       std::size_t steps, const BenchOptions& opt = {});

inline constexpr const char* kBenchHeader = "method,m_points,n_particles,mean_us,p50_us,p99_us,per_point_ns";

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace tanav

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tan/ins_core.hpp"

namespace tanav {

struct Particle {
  Vec3 s_n = Vec3::Zero();
  Vec12 s_l = Vec12::Zero();
  double weight = 0.0;
};

struct MpfState {
  std::vector<Particle> particles;
  Mat12 P = Mat12::Zero();
  double sigma_lik = 1.0;
  double ess_threshold = 0.5;
  std::uint64_t rng_seed = 0;
  std::uint64_t step = 0;
  std::uint64_t resample_count = 0;
  std::uint64_t uniform_resets = 0;
  bool information_step = true;

  std::size_t size() const { return particles.size(); }
};

MpfState mpf_init(std::size_t n, const Vec3& dp0_std, const Vec12& sl0_std, std::uint64_t seed);

/// Gaussian reweighting by exp(-err^2 / (2 sigma_lik^2)), evaluated in the
/// log domain. Falls back to uniform weights (counted in uniform_resets) when
/// no particle retains positive weight.
void mpf_measurement_update(MpfState& st, std::span<const double> errs);

double effective_sample_size(const MpfState& st);

/// Systematic resampling when ESS < ess_threshold * N. Returns true if the
/// particle set was resampled.
bool mpf_resample(MpfState& st);

/// Kalman gain of the linear substate given the sampled nonlinear transition.
Mat12x3 mpf_gain(const Mat12& P, const Mat3x12& a_n, const Mat3& q_n);

/// Marginalized time update: sample the nonlinear part, use the sample as a
/// measurement of the linear part, then predict the linear part.
/// Throws SingularInnovation if A_n P A_n^T + Q_n is not positive definite.
void mpf_time_update(MpfState& st, const ErrorModel& model);

ErrorState mpf_estimate(const MpfState& st);

struct Hygiene {
  double weight_sum_error = 0.0;
  double ess = 0.0;
  double asymmetry = 0.0;
  double min_eigenvalue = 0.0;
  bool ok = true;
};

inline constexpr double kWeightSumTol = 1e-12;
inline constexpr double kCovarianceTol = 1e-10;

Hygiene check_hygiene(const MpfState& st);

}  // namespace tanav

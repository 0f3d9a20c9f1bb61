#include "tan/mpf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "tan/errors.hpp"
#include "tan/rng.hpp"

namespace tanav {

MpfState mpf_init(std::size_t n, const Vec3& dp0_std, const Vec12& sl0_std, std::uint64_t seed) {
  if (n < 1) throw ValueError("particle count must be >= 1");
  if ((dp0_std.array() < 0.0).any() || (sl0_std.array() < 0.0).any()) {
    throw ValueError("prior standard deviations must be >= 0");
  }
  MpfState st;
  st.rng_seed = seed;
  st.particles.resize(n);
  Engine eng = make_engine(seed, Stream::mpf_init);
  const double w = 1.0 / static_cast<double>(n);
  for (Particle& p : st.particles) {
    for (int i = 0; i < 3; ++i) p.s_n[i] = dp0_std[i] * gauss(eng);
    p.weight = w;
  }
  st.P = sl0_std.array().square().matrix().asDiagonal();
  return st;
}

void mpf_measurement_update(MpfState& st, std::span<const double> errs) {
  if (errs.size() != st.size()) throw LengthMismatch("one innovation per particle is required");
  if (!(st.sigma_lik > 0.0)) throw ValueError("sigma_lik must be > 0");
  const double inv = 1.0 / (2.0 * st.sigma_lik * st.sigma_lik);
  std::vector<double> logw(st.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (!std::isfinite(errs[i])) throw ValueError("innovation " + std::to_string(i) + " is not finite");
    logw[i] = std::log(st.particles[i].weight) - errs[i] * errs[i] * inv;
    best = std::max(best, logw[i]);
  }
  if (!std::isfinite(best)) {
    ++st.uniform_resets;
    for (Particle& p : st.particles) p.weight = 1.0 / static_cast<double>(st.size());
    return;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < st.size(); ++i) {
    st.particles[i].weight = std::exp(logw[i] - best);
    sum += st.particles[i].weight;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) throw AllZeroWeights("weights cannot be renormalized");
  for (Particle& p : st.particles) p.weight /= sum;
}

double effective_sample_size(const MpfState& st) {
  double s2 = 0.0;
  for (const Particle& p : st.particles) s2 += p.weight * p.weight;
  return 1.0 / s2;
}

bool mpf_resample(MpfState& st) {
  const std::size_t n = st.size();
  if (effective_sample_size(st) >= st.ess_threshold * static_cast<double>(n)) return false;
  Engine eng = make_engine(st.rng_seed, Stream::mpf_resample, st.resample_count);
  ++st.resample_count;
  const double stride = 1.0 / static_cast<double>(n);
  const double u0 = uniform01(eng) * stride;
  std::vector<Particle> out;
  out.reserve(n);
  double cum = st.particles[0].weight;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = u0 + static_cast<double>(i) * stride;
    while (u > cum && j + 1 < n) cum += st.particles[++j].weight;
    out.push_back(st.particles[j]);
    out.back().weight = stride;
  }
  st.particles = std::move(out);
  return true;
}

Mat12x3 mpf_gain(const Mat12& P, const Mat3x12& a_n, const Mat3& q_n) {
  const Mat3 S = a_n * P * a_n.transpose() + q_n;
  Eigen::LLT<Mat3> llt(S);
  if (llt.info() != Eigen::Success) throw SingularInnovation("A_n P A_n^T + Q_n is not positive definite");
  return llt.solve(a_n * P).transpose();
}

void mpf_time_update(MpfState& st, const ErrorModel& m) {
  const Mat3 S = m.a_n * st.P * m.a_n.transpose() + m.q_n;
  const bool deterministic = (S.array() == 0.0).all();
  Mat3 L = Mat3::Zero();
  Mat12x3 K = Mat12x3::Zero();
  if (!deterministic) {
    Eigen::LLT<Mat3> llt(S);
    if (llt.info() != Eigen::Success) throw SingularInnovation("A_n P A_n^T + Q_n is not positive definite");
    L = llt.matrixL();
    if (st.information_step) K = llt.solve(m.a_n * st.P).transpose();
  }

  Engine eng = make_engine(st.rng_seed, Stream::mpf_process, st.step);
  for (Particle& p : st.particles) {
    Vec3 xi;
    for (int i = 0; i < 3; ++i) xi[i] = gauss(eng);
    const Vec3 noise = deterministic ? Vec3::Zero() : Vec3(L * xi);
    // z - A_n s_l equals the sampled process noise.
    p.s_n += m.a_n * p.s_l + noise;
    if (st.information_step && !deterministic) p.s_l += K * noise;
    p.s_l = m.a_l * p.s_l;
  }

  Mat12 P_star = st.P;
  if (st.information_step && !deterministic) P_star -= K * m.a_n * st.P;
  Mat12 P = m.a_l * P_star * m.a_l.transpose() + m.q_l;
  st.P = 0.5 * (P + P.transpose());
  ++st.step;
}

ErrorState mpf_estimate(const MpfState& st) {
  Vec3 dp = Vec3::Zero();
  Vec12 sl = Vec12::Zero();
  for (const Particle& p : st.particles) {
    dp += p.weight * p.s_n;
    sl += p.weight * p.s_l;
  }
  return ErrorState::from_parts(dp, sl);
}

Hygiene check_hygiene(const MpfState& st) {
  Hygiene h;
  double sum = 0.0;
  bool weights_valid = true;
  for (const Particle& p : st.particles) {
    sum += p.weight;
    if (!(p.weight >= 0.0 && p.weight <= 1.0)) weights_valid = false;
  }
  h.weight_sum_error = std::abs(sum - 1.0);
  h.ess = effective_sample_size(st);
  h.asymmetry = (st.P - st.P.transpose()).norm();
  Eigen::SelfAdjointEigenSolver<Mat12> eig(st.P, Eigen::EigenvaluesOnly);
  h.min_eigenvalue = eig.eigenvalues().minCoeff();
  const double n = static_cast<double>(st.size());
  // ESS is exact for uniform weights only up to rounding.
  const double ess_slack = 1e-9 * n;
  h.ok = weights_valid && h.weight_sum_error <= kWeightSumTol && h.ess >= 1.0 - ess_slack &&
         h.ess <= n + ess_slack && h.asymmetry <= kCovarianceTol && h.min_eigenvalue >= -kCovarianceTol &&
         st.P.allFinite();
  return h;
}

}  // namespace tanav

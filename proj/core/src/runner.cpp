#include "tan/runner.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tan/errors.hpp"
#include "tan/rng.hpp"
#include "tan/scan.hpp"

namespace tanav {

Vec3 compute_rmse(const RunTrace& trace, std::size_t begin, std::size_t end) {
  if (end > trace.steps.size()) end = trace.steps.size();
  if (begin >= end) throw EmptyTrace("no records in the RMSE window");
  Vec3 sq = Vec3::Zero();
  for (std::size_t i = begin; i < end; ++i) sq += trace.steps[i].error.cwiseAbs2();
  return (sq / static_cast<double>(end - begin)).cwiseSqrt();
}

Vec3 compute_rmse(const RunTrace& trace, Window window) {
  const std::size_t n = trace.steps.size();
  if (n == 0) throw EmptyTrace("trace has no records");
  const std::size_t begin = window == Window::full ? 0 : n - std::max<std::size_t>(1, n / 4);
  return compute_rmse(trace, begin, n);
}

RmseReport make_report(const RunTrace& trace) {
  return {compute_rmse(trace, Window::full), compute_rmse(trace, Window::last_quarter)};
}

ImuSpec resolved_imu(const ScenarioConfig& cfg) {
  ImuSpec imu = imu_preset(cfg.imu_grade, cfg.rates.imu_hz);
  if (cfg.accel_noise_std) imu.accel_noise_std = *cfg.accel_noise_std;
  if (cfg.gyro_noise_std) imu.gyro_noise_std = *cfg.gyro_noise_std;
  return imu;
}

Vec3 resolved_dp0_std(const ScenarioConfig& cfg) {
  return cfg.filter.dp0_std ? *cfg.filter.dp0_std : initial_position_std(cfg.init_error);
}

Vec12 resolved_sl0_std(const ScenarioConfig& cfg) {
  return cfg.filter.sl0_std ? *cfg.filter.sl0_std : initial_linear_std(cfg.init_error, cfg.imu_grade);
}

double resolved_sigma_lik(const ScenarioConfig& cfg) {
  if (cfg.filter.sigma_lik) return *cfg.filter.sigma_lik;
  // The altimeter innovation also carries the barometer noise.
  const double s = cfg.predictor == PredictorKind::altimeter ? std::hypot(cfg.sensor.sigma_alt, cfg.sensor.sigma_baro)
                                                             : cfg.sensor.sigma_range;
  return std::max(s, 0.1);
}

ProcessNoise process_noise(const ScenarioConfig& cfg, const ImuSpec& imu) {
  const double t = 1.0 / cfg.rates.imu_hz;
  const double q_n = cfg.filter.q_n_std * cfg.filter.q_n_std / cfg.rates.measurement_decimation;
  ProcessNoise n;
  n.q_n = q_n * Mat3::Identity();
  Vec12 d;
  const double dv = imu.accel_noise_std * t;
  const double dth = imu.gyro_noise_std * t;
  // Slow bias random walk keeps the bias block from collapsing.
  const double ab = 1e-6 * std::sqrt(t);
  const double wb = 1e-9 * std::sqrt(t);
  d << Vec3::Constant(dv * dv), Vec3::Constant(dth * dth), Vec3::Constant(ab * ab), Vec3::Constant(wb * wb);
  n.q_l = d.asDiagonal();
  return n;
}

TrajectorySpec trajectory_for(const ScenarioConfig& cfg) {
  TrajectorySpec spec;
  spec.speed = cfg.speed;
  spec.altitude_agl = cfg.altitude_agl;
  spec.rate = cfg.rates.imu_hz;
  spec.legs = preset_legs(cfg.bank, cfg.duration, cfg.speed, spec.roll_ramp);
  spec.start_x = cfg.terrain.extent * 0.15;
  spec.start_y = cfg.terrain.extent * 0.5;
  spec.heading = 0.0;
  return spec;
}

namespace {

struct Predictor {
  const DemGrid& dem;
  const ScenarioConfig& cfg;
  const ScanPattern& pattern;
  std::vector<double> z_buf;

  // Innovation of one particle; kMissError when its pose cannot be predicted.
  double error(const NominalState& nom, const Particle& p, const PointCloud& cloud, double alt, double baro,
               std::size_t& failures) {
    try {
      switch (cfg.predictor) {
        case PredictorKind::sliding: {
          const HypotheticalPose pose = make_hypothetical_pose(nom.p_bar, nom.q_bar, p.s_n, p.s_l.segment<3>(3));
          z_buf.resize(cloud.size());
          predict_pc_sliding(dem, pose, cloud, z_buf);
          return innovation_error(cloud, z_buf);
        }
        case PredictorKind::raycast: {
          const HypotheticalPose pose = make_hypothetical_pose(nom.p_bar, nom.q_bar, p.s_n, p.s_l.segment<3>(3));
          return innovation_error(cloud, predict_pc_raycast(dem, pose, pattern, cfg.raycast_method));
        }
        case PredictorKind::altimeter:
          return innovation_error(alt, predict_altimeter(dem, nom.p_bar, baro, p.s_n));
      }
    } catch (const RayMiss&) {
    } catch (const DegenerateGeometry&) {
    } catch (const OutOfBounds&) {
    }
    ++failures;
    return kMissError;
  }
};

void record_hygiene(const MpfState& st, RunStats& stats, std::size_t step, const char* where) {
  ++stats.hygiene_checks;
  const Hygiene h = check_hygiene(st);
  if (h.ok) return;
  if (stats.hygiene_violations++ == 0) {
    std::ostringstream os;
    os << "step " << step << " after " << where << ": weight sum error " << h.weight_sum_error << ", ess " << h.ess
       << ", asymmetry " << h.asymmetry << ", min eigenvalue " << h.min_eigenvalue;
    stats.first_violation = os.str();
  }
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  const auto wall0 = std::chrono::steady_clock::now();
  RunResult out;
  out.config = cfg;
  std::size_t step = 0;

  try {
    const DemGrid dem = synth_terrain(cfg.terrain, cfg.cell);
    std::vector<TruthState> truth = gen_trajectory(trajectory_for(cfg), dem);
    // The last planned leg may overrun a short duration.
    while (truth.size() > 1 && truth.back().t > cfg.duration + 1e-9) truth.pop_back();
    const ImuSpec imu_spec = resolved_imu(cfg);
    const std::vector<ImuSample> imu = synth_imu(truth, imu_spec, cfg.seed);
    const ScanPattern pattern = make_scan_pattern(cfg.scan.rows, cfg.scan.cols, cfg.scan.fov_deg);
    SensorNoise sensor = cfg.sensor;
    sensor.seed = cfg.seed;
    const double t_s = 1.0 / cfg.rates.imu_hz;
    const ProcessNoise noise = process_noise(cfg, imu_spec);
    const Vec3 dp0_std = resolved_dp0_std(cfg);
    const Vec12 sl0_std = resolved_sl0_std(cfg);

    // True initial error: the nominal starts at truth minus a prior draw and
    // believes the biases are zero.
    ErrorState e0;
    {
      Engine eng = make_engine(cfg.seed, Stream::initial_error);
      for (int i = 0; i < 3; ++i) e0.dp[i] = dp0_std[i] * gauss(eng);
      for (int i = 0; i < 3; ++i) e0.dv[i] = sl0_std[i] * gauss(eng);
      for (int i = 0; i < 3; ++i) e0.dtheta[i] = sl0_std[3 + i] * gauss(eng);
      e0.da_bias = imu_spec.accel_bias;
      e0.domega_bias = imu_spec.gyro_bias;
    }
    out.initial_dp = e0.dp;
    NominalState nom = nominal_from_truth(truth[0], e0);

    MpfState mpf = cfg.filter.init_at_truth ? mpf_init(cfg.particles, Vec3::Zero(), Vec12::Zero(), cfg.seed)
                                            : mpf_init(cfg.particles, dp0_std, sl0_std, cfg.seed);
    if (cfg.filter.init_at_truth) {
      for (Particle& p : mpf.particles) {
        p.s_n = e0.dp;
        p.s_l = e0.linear();
      }
    }
    mpf.sigma_lik = resolved_sigma_lik(cfg);
    mpf.ess_threshold = cfg.filter.ess_threshold;
    mpf.information_step = cfg.filter.information_step;

    Predictor predictor{dem, cfg, pattern, {}};
    std::vector<double> errs(mpf.size());
    const auto dec = static_cast<std::size_t>(cfg.rates.measurement_decimation);
    out.trace.steps.reserve(truth.size() / dec + 1);

    for (step = 0; step < truth.size(); ++step) {
      if (step > 0) {
        const ImuSample& m = imu[step - 1];
        const ErrorModel model = error_transition(nom, m, t_s, noise);
        nom = propagate_nominal(nom, m, t_s);
        mpf_time_update(mpf, model);
        record_hygiene(mpf, out.stats, step, "time update");
      }
      ++out.stats.imu_steps;
      if (step % dec != 0) continue;

      const TruthState& x = truth[step];
      const Pose pose{x.p, x.q};
      PointCloud cloud;
      double alt = 0.0, baro = 0.0;
      if (cfg.predictor == PredictorKind::altimeter) {
        alt = sense_radar_altimeter(dem, pose, AltimeterMode::nadir_vertical, sensor, step);
        baro = sense_baro(pose, sensor, step);
      } else {
        cloud = sense_point_cloud(dem, pose, pattern, sensor, step);
      }

      double innov = 0.0;
      for (std::size_t i = 0; i < mpf.size(); ++i) {
        errs[i] = predictor.error(nom, mpf.particles[i], cloud, alt, baro, out.stats.failed_predictions);
        innov += mpf.particles[i].weight * errs[i];
      }
      mpf_measurement_update(mpf, errs);
      record_hygiene(mpf, out.stats, step, "measurement update");

      StepRecord r;
      r.t = x.t;
      r.truth = x.p;
      r.nominal = nom.p_bar;
      r.ess = effective_sample_size(mpf);
      r.innov = innov;
      const ErrorState est = mpf_estimate(mpf);
      r.estimate = correct_open_loop(nom, est).p;
      if (cfg.predictor == PredictorKind::altimeter) r.estimate.z() = baro + est.dp.z();
      r.error = r.estimate - r.truth;
      r.terrain_below = sample_surface(dem, x.p.x(), x.p.y());
      out.trace.steps.push_back(r);
      ++out.stats.measurement_steps;

      if (mpf_resample(mpf)) ++out.stats.resamples;
      record_hygiene(mpf, out.stats, step, "resample");
    }
    out.stats.uniform_resets = mpf.uniform_resets;
  } catch (const ConfigError&) {
    throw;
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(step, e.what());
  }

  out.rmse = make_report(out.trace);
  out.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const StepRecord& r : trace.steps) {
    out << format_double(r.t);
    for (const Vec3* v : {&r.truth, &r.nominal, &r.estimate, &r.error}) {
      for (int i = 0; i < 3; ++i) out << ',' << format_double((*v)[i]);
    }
    out << ',' << format_double(r.ess) << ',' << format_double(r.innov) << '\n';
  }
}

std::string report_json(const RunResult& r) {
  using nlohmann::json;
  auto vec = [](const Vec3& v) { return json{{"x", v.x()}, {"y", v.y()}, {"z", v.z()}}; };
  json j;
  j["scenario"] = json::parse(scenario_to_json(r.config));
  j["rmse"] = vec(r.rmse.rmse);
  j["rmse"]["horizontal"] = r.rmse.horizontal();
  j["rmse_last_quarter"] = vec(r.rmse.rmse_last_quarter);
  j["rmse_last_quarter"]["horizontal"] = r.rmse.horizontal_last_quarter();
  j["initial_position_error"] = vec(r.initial_dp);
  j["stats"] = {{"imu_steps", r.stats.imu_steps},
                {"measurement_steps", r.stats.measurement_steps},
                {"resamples", r.stats.resamples},
                {"uniform_resets", r.stats.uniform_resets},
                {"failed_predictions", r.stats.failed_predictions},
                {"hygiene_checks", r.stats.hygiene_checks},
                {"hygiene_violations", r.stats.hygiene_violations}};
  if (!r.stats.first_violation.empty()) j["stats"]["first_violation"] = r.stats.first_violation;
  return j.dump(2);
}

void write_run_outputs(const RunResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  {
    std::ofstream f(base / "trace.csv", std::ios::binary);
    if (!f) throw Error("cannot write " + (base / "trace.csv").string());
    write_trace_csv(r.trace, f);
  }
  std::ofstream f(base / "report.json", std::ios::binary);
  if (!f) throw Error("cannot write " + (base / "report.json").string());
  f << report_json(r) << '\n';
}

}  // namespace tanav

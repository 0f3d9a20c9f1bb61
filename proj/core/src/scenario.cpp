#include "tan/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "tan/errors.hpp"

namespace tanav {

using nlohmann::json;

std::string to_string(InitError e) { return e == InitError::high ? "high" : "low"; }

InitError init_error_from_string(const std::string& s) {
  if (s == "high") return InitError::high;
  if (s == "low") return InitError::low;
  throw ValueError("unknown init_error '" + s + "'");
}

Vec3 initial_position_std(InitError e) {
  return e == InitError::high ? Vec3(100.0, 100.0, 30.0) : Vec3(10.0, 10.0, 5.0);
}

Vec12 initial_linear_std(InitError e, ImuGrade grade) {
  const ImuSpec imu = imu_preset(grade);
  const double dv = e == InitError::high ? 1.0 : 0.1;
  const double dtheta = e == InitError::high ? 1e-3 : 2e-4;
  Vec12 s;
  s << Vec3::Constant(dv), Vec3::Constant(dtheta), imu.accel_bias.cwiseAbs(), imu.gyro_bias.cwiseAbs();
  return s;
}

std::vector<Leg> preset_legs(double bank_deg, double duration, double speed, double ramp) {
  if (bank_deg == 0.0) return {Leg::straight(duration)};
  std::vector<Leg> legs;
  if (std::abs(bank_deg) < 45.0) {
    legs = {Leg::straight(20.0), Leg::turn(bank_deg, 90.0), Leg::straight(20.0), Leg::turn(-bank_deg, 90.0)};
  } else {
    legs = {Leg::straight(10.0), Leg::turn(bank_deg, 360.0), Leg::straight(10.0), Leg::turn(-bank_deg, 360.0)};
  }
  std::vector<Leg> out;
  double used = 0.0;
  for (const Leg& l : legs) {
    if (used >= duration) break;
    out.push_back(l);
    used += turn_leg_duration(l, speed, ramp);
  }
  if (used < duration) out.push_back(Leg::straight(duration - used));
  return out;
}

namespace {

struct PresetRow {
  const char* id;
  TerrainTag terrain;
  ImuGrade imu;
  double bank;
  double altitude;
  PredictorKind predictor;
};

constexpr std::array<PresetRow, 12> kPresets{{
    {"S1", TerrainTag::rugged, ImuGrade::navigation, 30.0, kHighAltitude, PredictorKind::sliding},
    {"S2", TerrainTag::rugged, ImuGrade::tactical_low_end, 30.0, kHighAltitude, PredictorKind::sliding},
    {"S3", TerrainTag::rugged, ImuGrade::navigation, 30.0, kHighAltitude, PredictorKind::raycast},
    {"S4", TerrainTag::rugged, ImuGrade::navigation, 30.0, kHighAltitude, PredictorKind::sliding},
    {"S5", TerrainTag::rugged, ImuGrade::navigation, 60.0, kLowAltitude, PredictorKind::raycast},
    {"S6", TerrainTag::rugged, ImuGrade::navigation, 60.0, kLowAltitude, PredictorKind::sliding},
    {"S7", TerrainTag::rugged, ImuGrade::navigation, 0.0, kHighAltitude, PredictorKind::raycast},
    {"S8", TerrainTag::rugged, ImuGrade::navigation, 0.0, kHighAltitude, PredictorKind::sliding},
    {"S9", TerrainTag::rugged, ImuGrade::navigation, 0.0, kHighAltitude, PredictorKind::altimeter},
    {"S10", TerrainTag::flat, ImuGrade::navigation, 0.0, kHighAltitude, PredictorKind::raycast},
    {"S11", TerrainTag::flat, ImuGrade::navigation, 0.0, kHighAltitude, PredictorKind::sliding},
    {"S12", TerrainTag::flat, ImuGrade::navigation, 0.0, kHighAltitude, PredictorKind::altimeter},
}};

double default_base_elevation(TerrainTag t) { return t == TerrainTag::rugged ? 100.0 : 50.0; }

const PresetRow* find_preset(const std::string& id) {
  for (const PresetRow& r : kPresets) {
    if (id == r.id) return &r;
  }
  return nullptr;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw SchemaError(path.empty() ? "$" : path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!known) throw SchemaError(join(path, it.key()), "unknown key");
  }
}

const json* field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(path, "expected a finite number");
  return d;
}

std::uint64_t as_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) throw SchemaError(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  const auto i = v.get<std::int64_t>();
  if (i < -1000000000 || i > 1000000000) throw SchemaError(path, "integer out of range");
  return static_cast<int>(i);
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw SchemaError(path, "expected a boolean");
  return v.get<bool>();
}

template <int N>
Eigen::Matrix<double, N, 1> as_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(N)) {
    throw SchemaError(path, "expected an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out[i] = as_number(v[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return out;
}

template <typename F>
auto parse_enum(const json& v, const std::string& path, F&& from_string) {
  const std::string s = as_string(v, path);
  try {
    return from_string(s);
  } catch (const ValueError& e) {
    throw SchemaError(path, e.what());
  }
}

template <int N>
json vec_json(const Eigen::Matrix<double, N, 1>& v) {
  json a = json::array();
  for (int i = 0; i < N; ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

bool is_preset(const std::string& id) { return find_preset(id) != nullptr; }

std::vector<std::string> preset_ids() {
  std::vector<std::string> ids;
  for (const PresetRow& r : kPresets) ids.emplace_back(r.id);
  return ids;
}

ScenarioConfig scenario_preset(const std::string& id) {
  const PresetRow* row = find_preset(id);
  if (!row) throw UnknownPreset(id);
  ScenarioConfig c;
  c.id = row->id;
  c.terrain.tag = row->terrain;
  c.terrain.base_elevation = default_base_elevation(row->terrain);
  c.imu_grade = row->imu;
  c.bank = row->bank;
  c.altitude_agl = row->altitude;
  c.predictor = row->predictor;
  return c;
}

ScenarioConfig parse_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, "", {"id", "terrain", "imu_grade", "imu", "bank", "altitude_agl", "speed", "predictor",
                     "raycast_method", "init_error", "particles", "seed", "duration", "rates", "sensor", "filter",
                     "scan"});

  ScenarioConfig c;
  if (const json* v = field(j, "id")) {
    const std::string id = as_string(*v, "id");
    if (is_preset(id)) c = scenario_preset(id);
    c.id = id;
  }

  if (const json* t = field(j, "terrain")) {
    check_keys(*t, "terrain", {"kind", "seed", "extent", "base_elevation", "cell"});
    if (const json* v = field(*t, "kind")) {
      c.terrain.tag = parse_enum(*v, "terrain.kind", terrain_tag_from_string);
      c.terrain.base_elevation = default_base_elevation(c.terrain.tag);
    }
    if (const json* v = field(*t, "seed")) c.terrain.seed = as_u64(*v, "terrain.seed");
    if (const json* v = field(*t, "extent")) c.terrain.extent = as_number(*v, "terrain.extent");
    if (const json* v = field(*t, "base_elevation")) c.terrain.base_elevation = as_number(*v, "terrain.base_elevation");
    if (const json* v = field(*t, "cell")) c.cell = as_number(*v, "terrain.cell");
  }
  if (const json* v = field(j, "imu_grade")) c.imu_grade = parse_enum(*v, "imu_grade", imu_grade_from_string);
  if (const json* m = field(j, "imu")) {
    check_keys(*m, "imu", {"accel_noise_std", "gyro_noise_std"});
    if (const json* v = field(*m, "accel_noise_std")) c.accel_noise_std = as_number(*v, "imu.accel_noise_std");
    if (const json* v = field(*m, "gyro_noise_std")) c.gyro_noise_std = as_number(*v, "imu.gyro_noise_std");
  }
  if (const json* v = field(j, "bank")) c.bank = as_number(*v, "bank");
  if (const json* v = field(j, "altitude_agl")) c.altitude_agl = as_number(*v, "altitude_agl");
  if (const json* v = field(j, "speed")) c.speed = as_number(*v, "speed");
  if (const json* v = field(j, "predictor")) c.predictor = parse_enum(*v, "predictor", predictor_from_string);
  if (const json* v = field(j, "raycast_method")) {
    const std::string s = as_string(*v, "raycast_method");
    if (s == "triangles") {
      c.raycast_method = RaycastMethod::triangles;
    } else if (s == "bisection") {
      c.raycast_method = RaycastMethod::bisection;
    } else {
      throw SchemaError("raycast_method", "expected 'triangles' or 'bisection'");
    }
  }
  if (const json* v = field(j, "init_error")) c.init_error = parse_enum(*v, "init_error", init_error_from_string);
  if (const json* v = field(j, "particles")) c.particles = as_int(*v, "particles");
  if (const json* v = field(j, "seed")) c.seed = as_u64(*v, "seed");
  if (const json* v = field(j, "duration")) c.duration = as_number(*v, "duration");
  if (const json* r = field(j, "rates")) {
    check_keys(*r, "rates", {"imu_hz", "measurement_decimation"});
    if (const json* v = field(*r, "imu_hz")) c.rates.imu_hz = as_number(*v, "rates.imu_hz");
    if (const json* v = field(*r, "measurement_decimation")) {
      c.rates.measurement_decimation = as_int(*v, "rates.measurement_decimation");
    }
  }
  if (const json* s = field(j, "sensor")) {
    check_keys(*s, "sensor", {"sigma_range", "sigma_alt", "sigma_baro", "baro_bias"});
    if (const json* v = field(*s, "sigma_range")) c.sensor.sigma_range = as_number(*v, "sensor.sigma_range");
    if (const json* v = field(*s, "sigma_alt")) c.sensor.sigma_alt = as_number(*v, "sensor.sigma_alt");
    if (const json* v = field(*s, "sigma_baro")) c.sensor.sigma_baro = as_number(*v, "sensor.sigma_baro");
    if (const json* v = field(*s, "baro_bias")) c.sensor.baro_bias = as_number(*v, "sensor.baro_bias");
  }
  if (const json* f = field(j, "filter")) {
    check_keys(*f, "filter",
               {"q_n_std", "sigma_lik", "dp0_std", "sl0_std", "information_step", "ess_threshold", "init_at_truth"});
    if (const json* v = field(*f, "q_n_std")) c.filter.q_n_std = as_number(*v, "filter.q_n_std");
    if (const json* v = field(*f, "sigma_lik")) c.filter.sigma_lik = as_number(*v, "filter.sigma_lik");
    if (const json* v = field(*f, "dp0_std")) c.filter.dp0_std = as_vector<3>(*v, "filter.dp0_std");
    if (const json* v = field(*f, "sl0_std")) c.filter.sl0_std = as_vector<12>(*v, "filter.sl0_std");
    if (const json* v = field(*f, "information_step")) c.filter.information_step = as_bool(*v, "filter.information_step");
    if (const json* v = field(*f, "ess_threshold")) c.filter.ess_threshold = as_number(*v, "filter.ess_threshold");
    if (const json* v = field(*f, "init_at_truth")) c.filter.init_at_truth = as_bool(*v, "filter.init_at_truth");
  }
  if (const json* s = field(j, "scan")) {
    check_keys(*s, "scan", {"rows", "cols", "fov"});
    if (const json* v = field(*s, "rows")) c.scan.rows = as_int(*v, "scan.rows");
    if (const json* v = field(*s, "cols")) c.scan.cols = as_int(*v, "scan.cols");
    if (const json* v = field(*s, "fov")) c.scan.fov_deg = as_number(*v, "scan.fov");
  }
  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::string& id_or_path) {
  if (is_preset(id_or_path)) return scenario_preset(id_or_path);
  std::ifstream in(id_or_path);
  if (!in) {
    if (id_or_path.find('/') == std::string::npos && id_or_path.find('.') == std::string::npos) {
      throw UnknownPreset(id_or_path);
    }
    throw ConfigError("cannot open scenario file '" + id_or_path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_json(ss.str());
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["id"] = c.id;
  j["terrain"] = {{"kind", to_string(c.terrain.tag)},
                  {"seed", c.terrain.seed},
                  {"extent", c.terrain.extent},
                  {"base_elevation", c.terrain.base_elevation},
                  {"cell", c.cell}};
  j["imu_grade"] = to_string(c.imu_grade);
  json imu = json::object();
  if (c.accel_noise_std) imu["accel_noise_std"] = *c.accel_noise_std;
  if (c.gyro_noise_std) imu["gyro_noise_std"] = *c.gyro_noise_std;
  if (!imu.empty()) j["imu"] = imu;
  j["bank"] = c.bank;
  j["altitude_agl"] = c.altitude_agl;
  j["speed"] = c.speed;
  j["predictor"] = to_string(c.predictor);
  j["raycast_method"] = to_string(c.raycast_method);
  j["init_error"] = to_string(c.init_error);
  j["particles"] = c.particles;
  j["seed"] = c.seed;
  j["duration"] = c.duration;
  j["rates"] = {{"imu_hz", c.rates.imu_hz}, {"measurement_decimation", c.rates.measurement_decimation}};
  j["sensor"] = {{"sigma_range", c.sensor.sigma_range},
                 {"sigma_alt", c.sensor.sigma_alt},
                 {"sigma_baro", c.sensor.sigma_baro},
                 {"baro_bias", c.sensor.baro_bias}};
  json f = {{"q_n_std", c.filter.q_n_std},
            {"information_step", c.filter.information_step},
            {"ess_threshold", c.filter.ess_threshold},
            {"init_at_truth", c.filter.init_at_truth}};
  if (c.filter.sigma_lik) f["sigma_lik"] = *c.filter.sigma_lik;
  if (c.filter.dp0_std) f["dp0_std"] = vec_json<3>(*c.filter.dp0_std);
  if (c.filter.sl0_std) f["sl0_std"] = vec_json<12>(*c.filter.sl0_std);
  j["filter"] = f;
  j["scan"] = {{"rows", c.scan.rows}, {"cols", c.scan.cols}, {"fov", c.scan.fov_deg}};
  return j.dump(2);
}

void validate(const ScenarioConfig& c) {
  auto fail = [](const std::string& path, const std::string& what) { throw SchemaError(path, what); };
  if (c.particles < 1) fail("particles", "must be >= 1");
  if (!(c.duration > 0.0)) fail("duration", "must be > 0");
  if (!(c.speed > 0.0)) fail("speed", "must be > 0");
  if (!(c.altitude_agl > 0.0)) fail("altitude_agl", "must be > 0");
  if (!(std::abs(c.bank) < 85.0)) fail("bank", "magnitude must be < 85 degrees");
  if (!(c.cell > 0.0)) fail("terrain.cell", "must be > 0");
  if (!(c.terrain.extent >= 2.0 * c.cell)) fail("terrain.extent", "must span at least two cells");
  if (!(c.rates.imu_hz > 0.0)) fail("rates.imu_hz", "must be > 0");
  if (c.rates.measurement_decimation < 1) fail("rates.measurement_decimation", "must be >= 1");
  if (c.sensor.sigma_range < 0.0) fail("sensor.sigma_range", "must be >= 0");
  if (c.sensor.sigma_alt < 0.0) fail("sensor.sigma_alt", "must be >= 0");
  if (c.sensor.sigma_baro < 0.0) fail("sensor.sigma_baro", "must be >= 0");
  if (c.accel_noise_std && *c.accel_noise_std < 0.0) fail("imu.accel_noise_std", "must be >= 0");
  if (c.gyro_noise_std && *c.gyro_noise_std < 0.0) fail("imu.gyro_noise_std", "must be >= 0");
  if (c.filter.q_n_std < 0.0) fail("filter.q_n_std", "must be >= 0");
  if (c.filter.q_n_std == 0.0 && !c.filter.init_at_truth) fail("filter.q_n_std", "must be > 0");
  if (c.filter.sigma_lik && !(*c.filter.sigma_lik > 0.0)) fail("filter.sigma_lik", "must be > 0");
  if (c.filter.dp0_std && (c.filter.dp0_std->array() < 0.0).any()) fail("filter.dp0_std", "must be >= 0");
  if (c.filter.sl0_std && (c.filter.sl0_std->array() < 0.0).any()) fail("filter.sl0_std", "must be >= 0");
  if (!(c.filter.ess_threshold >= 0.0 && c.filter.ess_threshold <= 1.0)) {
    fail("filter.ess_threshold", "must be in [0, 1]");
  }
  if (c.scan.rows < 1) fail("scan.rows", "must be >= 1");
  if (c.scan.cols < 1) fail("scan.cols", "must be >= 1");
  if (!(c.scan.fov_deg > 0.0 && c.scan.fov_deg < 80.0)) fail("scan.fov", "must be in (0, 80) degrees");
}

}  // namespace tanav

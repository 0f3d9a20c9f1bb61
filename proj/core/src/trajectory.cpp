#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tan/errors.hpp"
#include "tan/vehicle_sim.hpp"

namespace tanav {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Roll angle as a function of time within one segment of the profile.
struct RollSegment {
  enum class Shape { constant, ramp_in, ramp_out };
  double t0 = 0.0;
  double t1 = 0.0;
  double bank = 0.0;  // radians, signed
  Shape shape = Shape::constant;

  // (roll, roll rate) at absolute time t inside the segment
  std::pair<double, double> eval(double t) const {
    const double len = t1 - t0;
    switch (shape) {
      case Shape::constant:
        return {bank, 0.0};
      case Shape::ramp_in: {
        const double s = std::numbers::pi * (t - t0) / len;
        return {0.5 * bank * (1.0 - std::cos(s)), 0.5 * bank * std::numbers::pi / len * std::sin(s)};
      }
      case Shape::ramp_out: {
        const double s = std::numbers::pi * (t - t0) / len;
        return {0.5 * bank * (1.0 + std::cos(s)), -0.5 * bank * std::numbers::pi / len * std::sin(s)};
      }
    }
    return {0.0, 0.0};
  }
};

class RollProfile {
 public:
  void add(double duration, double bank, RollSegment::Shape shape) {
    if (duration <= 0.0) return;
    const double t0 = segments_.empty() ? 0.0 : segments_.back().t1;
    segments_.push_back({t0, t0 + duration, bank, shape});
  }

  double duration() const { return segments_.empty() ? 0.0 : segments_.back().t1; }

  std::pair<double, double> eval(double t) const {
    if (segments_.empty()) return {0.0, 0.0};
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double tv, const RollSegment& s) { return tv < s.t1; });
    if (it == segments_.end()) it = std::prev(segments_.end());
    return it->eval(std::clamp(t, it->t0, it->t1));
  }

 private:
  std::vector<RollSegment> segments_;
};

// Heading change accumulated over a cosine roll ramp to `bank`, by Simpson's rule.
double ramp_heading_change(double bank, double ramp, double speed) {
  constexpr int n = 2000;
  const double h = ramp / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double roll = 0.5 * bank * (1.0 - std::cos(std::numbers::pi * i / n));
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * kGravity * std::tan(roll) / speed;
  }
  return std::abs(sum * h / 3.0);
}

struct Horizontal {
  double heading, x, y;
};

}  // namespace

double coordinated_turn_rate(double bank_rad, double speed) { return kGravity * std::tan(bank_rad) / speed; }

double turn_leg_duration(const Leg& leg, double speed, double roll_ramp) {
  if (leg.kind == Leg::Kind::straight) return leg.duration;
  const double bank = leg.bank_deg * kDeg;
  const double rate = std::abs(coordinated_turn_rate(bank, speed));
  const double ramp_change = roll_ramp > 0.0 ? ramp_heading_change(bank, roll_ramp, speed) : 0.0;
  return (std::abs(leg.heading_change_deg) * kDeg - 2.0 * ramp_change) / rate + 2.0 * roll_ramp;
}

std::vector<TruthState> gen_trajectory(const TrajectorySpec& spec, const DemGrid& dem) {
  if (!(spec.speed > 0.0)) throw ValueError("speed must be > 0");
  if (!(spec.rate > 0.0)) throw ValueError("rate must be > 0");
  if (spec.roll_ramp < 0.0) throw ValueError("roll ramp must be >= 0");

  RollProfile profile;
  for (const Leg& leg : spec.legs) {
    if (leg.kind == Leg::Kind::straight) {
      profile.add(leg.duration, 0.0, RollSegment::Shape::constant);
      continue;
    }
    const double bank = leg.bank_deg * kDeg;
    if (!(std::abs(leg.bank_deg) > 0.0 && std::abs(leg.bank_deg) < 85.0)) {
      throw ValueError("turn bank must be in (0, 85) degrees in magnitude");
    }
    const double total = std::abs(leg.heading_change_deg) * kDeg;
    const double rate = std::abs(coordinated_turn_rate(bank, spec.speed));
    const double ramp_change = spec.roll_ramp > 0.0 ? ramp_heading_change(bank, spec.roll_ramp, spec.speed) : 0.0;
    const double hold = (total - 2.0 * ramp_change) / rate;
    if (hold < 0.0) throw ValueError("turn heading change is too small for the roll ramps");
    profile.add(spec.roll_ramp, bank, RollSegment::Shape::ramp_in);
    profile.add(hold, bank, RollSegment::Shape::constant);
    profile.add(spec.roll_ramp, bank, RollSegment::Shape::ramp_out);
  }

  const double dt = 1.0 / spec.rate;
  const auto n = static_cast<std::size_t>(std::floor(profile.duration() * spec.rate + 1e-9)) + 1;
  const double speed = spec.speed;

  auto heading_rate = [&](double t) { return -kGravity * std::tan(profile.eval(t).first) / speed; };
  auto deriv = [&](double t, const Horizontal& s) {
    return Horizontal{heading_rate(t), speed * std::cos(s.heading), speed * std::sin(s.heading)};
  };

  std::vector<Horizontal> path(n);
  path[0] = {spec.heading, spec.start_x, spec.start_y};
  constexpr int kSubsteps = 10;
  const double h = dt / kSubsteps;
  for (std::size_t k = 1; k < n; ++k) {
    Horizontal s = path[k - 1];
    double t = (k - 1) * dt;
    for (int j = 0; j < kSubsteps; ++j) {
      auto axpy = [](const Horizontal& a, const Horizontal& d, double m) {
        return Horizontal{a.heading + m * d.heading, a.x + m * d.x, a.y + m * d.y};
      };
      const Horizontal k1 = deriv(t, s);
      const Horizontal k2 = deriv(t + 0.5 * h, axpy(s, k1, 0.5 * h));
      const Horizontal k3 = deriv(t + 0.5 * h, axpy(s, k2, 0.5 * h));
      const Horizontal k4 = deriv(t + h, axpy(s, k3, h));
      s.heading += h / 6.0 * (k1.heading + 2.0 * k2.heading + 2.0 * k3.heading + k4.heading);
      s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      s.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
      t += h;
    }
    path[k] = s;
  }

  double highest = -std::numeric_limits<double>::infinity();
  for (const Horizontal& s : path) highest = std::max(highest, sample_surface(dem, s.x, s.y));
  const double z = highest + spec.altitude_agl;

  std::vector<TruthState> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = k * dt;
    const auto [roll, roll_rate] = profile.eval(t);
    const double psi = path[k].heading;
    const double psi_rate = heading_rate(t);
    TruthState& s = out[k];
    s.t = t;
    s.p = Vec3(path[k].x, path[k].y, z);
    s.v = speed * Vec3(std::cos(psi), std::sin(psi), 0.0);
    s.a = speed * psi_rate * Vec3(-std::sin(psi), std::cos(psi), 0.0);
    s.q = quat_from_yaw_roll(psi, roll);
    s.omega = Vec3(roll_rate, psi_rate * std::sin(roll), psi_rate * std::cos(roll));
    if (z <= sample_surface(dem, s.p.x(), s.p.y())) {
      throw TerrainCollision("trajectory meets terrain at t = " + std::to_string(t) + " s");
    }
  }
  return out;
}

}  // namespace tanav

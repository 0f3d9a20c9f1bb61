#pragma once

#include <functional>

#include <algorithm>
#include <cmath>

#include "tan/geometry.hpp"
#include "tan/ins_core.hpp"
#include "tan/terrain.hpp"

namespace tanav::testing {

/// n x n grid with south-west node at (x0, y0) and node heights f(x, y).
inline DemGrid grid_from(const std::function<double(double, double)>& f, int n, double cell, double x0 = 0.0,
                         double y0 = 0.0) {
  DemGrid d;
  d.x_origin = x0;
  d.y_origin = y0;
  d.cell = cell;
  d.n_cols = n;
  d.n_rows = n;
  d.elev.resize(static_cast<std::size_t>(n) * n);
  for (int row = 0; row < n; ++row) {
    const double y = y0 + (n - 1 - row) * cell;
    for (int col = 0; col < n; ++col) d.elev[static_cast<std::size_t>(row) * n + col] = f(x0 + col * cell, y);
  }
  return d;
}

inline DemGrid plane_dem(double a, double b, double c, int n = 101, double cell = 10.0, double x0 = -500.0,
                         double y0 = -500.0) {
  return grid_from([=](double x, double y) { return a * x + b * y + c; }, n, cell, x0, y0);
}

inline DemGrid rugged_dem(double extent = 6000.0, double cell = 30.0, std::uint64_t seed = 2024) {
  TerrainKind k;
  k.seed = seed;
  k.extent = extent;
  return synth_terrain(k, cell);
}

struct MarchResult {
  bool found = false;
  double t = 0.0;
};

// Fine linear march on the triangulated surface, refined by bisection.
inline MarchResult fine_march(const DemGrid& d, const Ray& r, double t_max) {
  const double step = d.cell / 100.0;
  auto f = [&](double t) {
    const Vec3 p = r.origin + t * r.dir;
    return p.z() - sample_surface(d, p.x(), p.y());
  };
  double t0 = 0.0;
  for (double t1 = step; t1 <= t_max; t1 += step) {
    const Vec3 p = r.origin + t1 * r.dir;
    if (!d.contains(p.x(), p.y())) return {};
    if (f(t1) <= 0.0) {
      for (int k = 0; k < 60; ++k) {
        const double tm = 0.5 * (t0 + t1);
        (f(tm) > 0.0 ? t0 : t1) = tm;
      }
      return {true, t1};
    }
    t0 = t1;
  }
  return {};
}

// Angle between the ray and the local surface, using a finite-difference normal.
inline double incidence(const DemGrid& d, const Ray& r, const Vec3& p) {
  const double h = 0.05;
  auto s = [&](double x, double y) { return sample_surface(d, x, y); };
  const double gx = (s(p.x() + h, p.y()) - s(p.x() - h, p.y())) / (2 * h);
  const double gy = (s(p.x(), p.y() + h) - s(p.x(), p.y() - h)) / (2 * h);
  const Vec3 n = Vec3(-gx, -gy, 1.0).normalized();
  return std::asin(std::min(1.0, std::abs(n.dot(r.dir))));
}

// Nominal with the error applied, propagated with biases b_bar + delta b.
inline NominalState perturbed(const NominalState& s, const ErrorState& e) {
  NominalState t = s;
  t.p_bar += e.dp;
  t.v_bar += e.dv;
  t.q_bar = quat_compose(s.q_bar, quat_from_rotvec(e.dtheta));
  t.a_bias_bar += e.da_bias;
  t.omega_bias_bar += e.domega_bias;
  return t;
}

inline double linearization_residual(const NominalState& s, const ImuSample& m, const ErrorState& e, double t_s) {
  const ErrorModel mdl = error_transition(s, m, t_s);
  const ErrorState actual = error_between(propagate_nominal(perturbed(s, e), m, t_s), propagate_nominal(s, m, t_s));
  const Vec12 l = e.linear();
  const Vec3 dp = e.dp + mdl.a_n * l;
  const Vec12 lin = mdl.a_l * l;
  return std::sqrt((actual.dp - dp).squaredNorm() + (actual.linear() - lin).squaredNorm());
}

}  // namespace tanav::testing

#include "hda/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace hda {

void VehicleParams::validate() const {
  if (t_max <= 0.0) throw std::invalid_argument("VehicleParams: t_max <= 0");
  if (m_0 <= m_dry) throw std::invalid_argument("VehicleParams: m_0 <= m_dry");
  if (i_sp <= 0.0 || g_ref <= 0.0) throw std::invalid_argument("VehicleParams: bad Isp/g_ref");
  if (thrust_error_ratio < 0.0) throw std::invalid_argument("VehicleParams: negative thrust error");
}

namespace {

// RK4 over (r, v, m) with constant thrust across the interval.
LanderState rk4_step(const LanderState& s, const Vec3& thrust, double mdot_mag, const Vec3& g, double dt) {
  struct Deriv {
    Vec3 dr, dv;
    double dm;
  };
  auto f = [&](const Vec3& v, double m) -> Deriv {
    return {v, thrust / m + g, -mdot_mag};
  };
  const Deriv k1 = f(s.v, s.m);
  const Deriv k2 = f(s.v + k1.dv * (dt / 2), s.m + k1.dm * (dt / 2));
  const Deriv k3 = f(s.v + k2.dv * (dt / 2), s.m + k2.dm * (dt / 2));
  const Deriv k4 = f(s.v + k3.dv * dt, s.m + k3.dm * dt);

  LanderState out = s;
  out.r = s.r + (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr) * (dt / 6.0);
  out.v = s.v + (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv) * (dt / 6.0);
  out.m = s.m + (k1.dm + 2.0 * k2.dm + 2.0 * k3.dm + k4.dm) * (dt / 6.0);
  out.t = s.t + dt;
  return out;
}

}  // namespace

PropagateResult propagate(const LanderState& state, const Vec3& commanded_thrust, double dt,
                          const VehicleParams& params, Rng& rng) {
  params.validate();
  if (dt <= 0.0) throw std::invalid_argument("propagate: dt <= 0");
  const double commanded_mag = commanded_thrust.norm();
  if (commanded_mag > params.t_max * (1.0 + 1e-9))
    throw std::invalid_argument("propagate: commanded thrust exceeds t_max");

  Vec3 thrust = commanded_thrust;
  if (params.thrust_error_ratio > 0.0 && commanded_mag > 0.0) {
    const double eps = rng.normal_truncated(params.thrust_error_ratio, 3.0);
    thrust = commanded_thrust * (1.0 + eps);
    const double mag = thrust.norm();
    if (mag > params.t_max) thrust = thrust * (params.t_max / mag);
  }
  const double mag = thrust.norm();
  const double mdot = mag / (params.g_ref * params.i_sp);

  PropagateResult res;
  res.executed_thrust = mag;

  const double fuel = state.m - params.m_dry;
  const double burn_time = mdot > 0.0 ? fuel / mdot : dt + 1.0;
  if (burn_time >= dt) {
    res.state = rk4_step(state, thrust, mdot, params.g, dt);
  } else {
    // Burn to dry mass, then coast the remainder.
    res.fuel_exhausted = true;
    LanderState mid = burn_time > 0.0 ? rk4_step(state, thrust, mdot, params.g, burn_time) : state;
    mid.m = params.m_dry;
    res.state = rk4_step(mid, Vec3{}, 0.0, params.g, dt - burn_time);
  }
  if (res.state.m < params.m_dry) {
    res.state.m = params.m_dry;
    res.fuel_exhausted = true;
  }
  return res;
}

double glide_slope_angle(const Vec3& r) {
  if (r.z <= 0.0) throw std::domain_error("glide_slope_angle: r_z <= 0");
  return std::atan(r.horizontal_norm() / r.z) * 180.0 / M_PI;
}

}  // namespace hda

#pragma once

#include "hda/rng.hpp"
#include "hda/vec3.hpp"

namespace hda {

struct LanderState {
  Vec3 r;          // m, field frame, z up
  Vec3 v;          // m/s
  double m = 0.0;  // kg
  double t = 0.0;  // s elapsed
};

struct VehicleParams {
  double m_0 = 1200.0;    // kg wet
  double m_dry = 1150.0;  // kg
  double i_sp = 325.0;    // s
  double t_max = 12000.0; // N
  Vec3 g{0.0, 0.0, -1.62};
  double g_ref = 9.80665;
  double thrust_error_ratio = 0.05;  // 0 disables execution error

  void validate() const;
};

struct PropagateResult {
  LanderState state;
  bool fuel_exhausted = false;
  double executed_thrust = 0.0;  // N, after error and saturation
};

// One RK4 step of the translational dynamics with mass depletion. The
// commanded thrust is perturbed by a multiplicative magnitude error
// (truncated at 3 sigma) and re-saturated; if propellant runs out mid-step
// the thrust cuts to zero for the remainder.
PropagateResult propagate(const LanderState& state, const Vec3& commanded_thrust, double dt,
                          const VehicleParams& params, Rng& rng);

// theta_g = arctan(horizontal distance / altitude), degrees. The slant angle
// reported in evaluation metrics is 90 - theta_g.
double glide_slope_angle(const Vec3& r);

}  // namespace hda

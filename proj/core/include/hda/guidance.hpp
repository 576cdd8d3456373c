#pragma once

#include <optional>

#include "hda/dynamics.hpp"
#include "hda/vec3.hpp"

namespace hda {

struct GuidanceTarget {
  Vec3 r_f;
  Vec3 v_f;            // default soft landing: zero
  double t_go = 0.0;   // s remaining
};

struct GuidanceGains {
  double k_r = 6.0;
  double k_v = 2.0;
};

struct ZemZev {
  Vec3 zem;  // projected final position miss, m
  Vec3 zev;  // projected final velocity miss, m/s
};

// Projected miss with no further control over the remaining t_go.
ZemZev zem_zev(const LanderState& state, const GuidanceTarget& target, const Vec3& g);

// a = K_R/t_go^2 * ZEM - K_V/t_go * ZEV, saturated to T_max/m preserving
// direction.
Vec3 commanded_accel(const ZemZev& zz, const GuidanceGains& gains, double t_go, double mass,
                     double t_max);

// Smallest positive real root of the energy-optimal time-to-go quartic.
// Sign-scan with 0.5 s steps over (0, t_max_s] then bisection; nullopt when
// no positive root exists.
std::optional<double> optimal_tgo(const Vec3& r, const Vec3& v, const Vec3& r_f, const Vec3& v_f,
                                  const Vec3& g, double t_max_s = 500.0);

// The quartic residual itself (exposed for oracle tests).
double tgo_polynomial(double t, const Vec3& r, const Vec3& v, const Vec3& r_f, const Vec3& v_f,
                      const Vec3& g);

}  // namespace hda

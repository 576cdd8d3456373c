#include "hda/guidance.hpp"

#include <cmath>
#include <stdexcept>

namespace hda {

ZemZev zem_zev(const LanderState& state, const GuidanceTarget& target, const Vec3& g) {
  if (target.t_go <= 0.0) throw std::invalid_argument("zem_zev: t_go <= 0");
  const double t = target.t_go;
  ZemZev zz;
  zz.zem = target.r_f - (state.r + state.v * t + g * (0.5 * t * t));
  zz.zev = target.v_f - (state.v + g * t);
  return zz;
}

Vec3 commanded_accel(const ZemZev& zz, const GuidanceGains& gains, double t_go, double mass,
                     double t_max) {
  if (t_go <= 0.0) throw std::invalid_argument("commanded_accel: t_go <= 0");
  if (mass <= 0.0) throw std::invalid_argument("commanded_accel: mass <= 0");
  const Vec3 a = zz.zem * (gains.k_r / (t_go * t_go)) - zz.zev * (gains.k_v / t_go);
  const double a_max = t_max / mass;
  const double mag = a.norm();
  if (mag <= a_max) return a;
  return a * (a_max / mag);
}

double tgo_polynomial(double t, const Vec3& r, const Vec3& v, const Vec3& r_f, const Vec3& v_f,
                      const Vec3& g) {
  const Vec3 dr = r_f - r;
  const double t2 = t * t;
  return t2 * t2 * g.dot(g) - 2.0 * t2 * (v.dot(v) + v_f.dot(v) + v_f.dot(v_f)) +
         12.0 * t * dr.dot(v + v_f) - 18.0 * dr.dot(dr);
}

std::optional<double> optimal_tgo(const Vec3& r, const Vec3& v, const Vec3& r_f, const Vec3& v_f,
                                  const Vec3& g, double t_max_s) {
  const auto p = [&](double t) { return tgo_polynomial(t, r, v, r_f, v_f, g); };

  const double step = 0.5;
  double prev_t = 0.0;
  double prev_p = p(0.0);
  for (double t = step; t <= t_max_s + 1e-12; t += step) {
    const double cur = p(t);
    if (cur == 0.0) return t;
    if ((prev_p < 0.0 && cur > 0.0) || (prev_p > 0.0 && cur < 0.0)) {
      double lo = prev_t, hi = t;
      double plo = prev_p;
      while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        const double pm = p(mid);
        if (pm == 0.0) return mid;
        if ((plo < 0.0) == (pm < 0.0)) {
          lo = mid;
          plo = pm;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      if (root > 0.0) return root;
    }
    prev_t = t;
    prev_p = cur;
  }
  return std::nullopt;
}

}  // namespace hda

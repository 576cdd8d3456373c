#include <cmath>
#include <optional>

#include "doctest.h"
#include "hda/guidance.hpp"
#include "hda/rng.hpp"

using namespace hda;

namespace {

const Vec3 kGravity{0.0, 0.0, -1.62};

// Independent dense-scan root finder used as the oracle for optimal_tgo:
// evaluate the quartic on a fine lattice and bisect the first sign change.
std::optional<double> oracle_tgo(const Vec3& r, const Vec3& v, const Vec3& r_f, const Vec3& v_f,
                                 const Vec3& g) {
  const double step = 0.01;
  double prev_t = step;
  double prev_f = tgo_polynomial(prev_t, r, v, r_f, v_f, g);
  for (double t = 2 * step; t <= 500.0; t += step) {
    const double f = tgo_polynomial(t, r, v, r_f, v_f, g);
    if (prev_f == 0.0) return prev_t;
    if ((prev_f < 0.0) != (f < 0.0)) {
      double lo = prev_t, hi = t;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((tgo_polynomial(mid, r, v, r_f, v_f, g) < 0.0) == (prev_f < 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev_t = t;
    prev_f = f;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("worked time-to-go case: 1000 m up, 30 m/s down") {
  const Vec3 r{0, 0, 1000}, v{0, 0, -30}, r_f{0, 0, 50}, v_f{0, 0, 0};
  const auto t = optimal_tgo(r, v, r_f, v_f, kGravity);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(38.5).epsilon(0.1 / 38.5));
  // The returned root really is a root
  const double scale = std::pow(*t, 4) * kGravity.dot(kGravity);
  CHECK(std::abs(tgo_polynomial(*t, r, v, r_f, v_f, kGravity)) / scale < 1e-6);
}

TEST_CASE("optimal_tgo matches the dense-scan oracle on random states") {
  Rng rng(2024);
  int found = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 r{rng.uniform(-400, 400), rng.uniform(-400, 400), rng.uniform(200, 1500)};
    const Vec3 v{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-40, -5)};
    const Vec3 r_f{rng.uniform(-50, 50), rng.uniform(-50, 50), 50.0};
    const Vec3 v_f{0, 0, 0};
    const auto mine = optimal_tgo(r, v, r_f, v_f, kGravity);
    const auto ref = oracle_tgo(r, v, r_f, v_f, kGravity);
    REQUIRE(mine.has_value() == ref.has_value());
    if (mine) {
      ++found;
      CHECK(std::abs(*mine - *ref) < 0.05);
      const double scale = std::pow(*mine, 4) * kGravity.dot(kGravity);
      CHECK(std::abs(tgo_polynomial(*mine, r, v, r_f, v_f, kGravity)) / scale < 1e-6);
    }
  }
  CHECK(found > 900);  // nearly all of these states admit a solution
}

TEST_CASE("no positive root reports nullopt") {
  // Zero gravity, at rest, away from the target: the polynomial is the
  // negative constant -18 |r_f - r|^2, so no positive root exists.
  const Vec3 r{0, 0, 100}, v{0, 0, 0}, r_f{0, 0, 50}, v_f{0, 0, 0};
  const auto t = optimal_tgo(r, v, r_f, v_f, Vec3{0, 0, 0});
  CHECK(!t.has_value());
}

TEST_CASE("zem/zev are exact for the analytic no-thrust prediction") {
  LanderState s;
  s.r = {100, 0, 1000};
  s.v = {-3, 2, -25};
  const GuidanceTarget target{{0, 0, 50}, {0, 0, 0}, 20.0};
  const ZemZev zz = zem_zev(s, target, kGravity);
  const double tg = target.t_go;
  const Vec3 drift = s.r + s.v * tg + kGravity * (0.5 * tg * tg);
  CHECK(zz.zem.x == doctest::Approx(target.r_f.x - drift.x));
  CHECK(zz.zem.z == doctest::Approx(target.r_f.z - drift.z));
  CHECK(zz.zev.z == doctest::Approx(0.0 - (s.v.z + kGravity.z * tg)));
}

TEST_CASE("commanded acceleration saturates preserving direction") {
  ZemZev zz;
  zz.zem = {1000, 0, 2000};
  zz.zev = {0, 0, 0};
  const GuidanceGains gains{6.0, 2.0};
  const double mass = 1200.0, t_max = 12000.0;
  const Vec3 a = commanded_accel(zz, gains, 5.0, mass, t_max);
  CHECK(a.norm() == doctest::Approx(t_max / mass));
  CHECK(a.x / a.z == doctest::Approx(0.5));  // direction of ZEM preserved

  // Unsaturated case matches the formula exactly
  zz.zem = {1, -2, 3};
  zz.zev = {0.5, 0.5, -1};
  const double tg = 20.0;
  const Vec3 b = commanded_accel(zz, gains, tg, mass, t_max);
  CHECK(b.x == doctest::Approx(6.0 / (tg * tg) * 1.0 - 2.0 / tg * 0.5));
  CHECK(b.y == doctest::Approx(6.0 / (tg * tg) * -2.0 - 2.0 / tg * 0.5));
  CHECK(b.z == doctest::Approx(6.0 / (tg * tg) * 3.0 + 2.0 / tg * 1.0));
}

TEST_CASE("closed loop with energy-optimal gains converges to the target") {
  // Pure-kinematics rollout (no thrust limit, no mass depletion): the
  // ZEM/ZEV law with K_R=6, K_V=2 must null both miss and velocity error.
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    Vec3 r{rng.uniform(-250, 250), rng.uniform(-250, 250), rng.uniform(900, 1000)};
    Vec3 v{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-35, -20)};
    const Vec3 r_f{0, 0, 50}, v_f{0, 0, 0};
    const auto t0 = optimal_tgo(r, v, r_f, v_f, kGravity);
    REQUIRE(t0.has_value());
    double t_go = *t0;
    const double dt = 0.01;
    while (t_go > dt) {
      LanderState s;
      s.r = r;
      s.v = v;
      const ZemZev zz = zem_zev(s, GuidanceTarget{r_f, v_f, t_go}, kGravity);
      const Vec3 a = Vec3{zz.zem * (6.0 / (t_go * t_go)) - zz.zev * (2.0 / t_go)} + kGravity;
      r = r + v * dt + a * (0.5 * dt * dt);
      v = v + a * dt;
      t_go -= dt;
    }
    CHECK((r - r_f).norm() < 0.1);
    CHECK((v - v_f).norm() < 0.05);
  }
}

#include "hda/safety.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hda {

void LanderGeometry::validate() const {
  if (pad_count < 3) throw std::invalid_argument("LanderGeometry: pad_count < 3");
  if (orientation_count < 1) throw std::invalid_argument("LanderGeometry: orientation_count < 1");
  if (base_diameter <= 0.0) throw std::invalid_argument("LanderGeometry: base_diameter <= 0");
}

void SafetyThresholds::validate() const {
  if (slope_max_deg <= 0.0 || roughness_max <= 0.0)
    throw std::invalid_argument("SafetyThresholds: thresholds must be positive");
}

int footprint_margin_px(const Dem& dem, const LanderGeometry& geom) {
  return static_cast<int>(std::ceil(geom.base_diameter / 2.0 / dem.resolution));
}

namespace {

struct Plane {
  double a = 0.0, b = 0.0, c = 0.0;  // z = a x + b y + c, local coords
};

double sample_checked(const Dem& dem, double x, double y) {
  const double fc = dem.col_of(x);
  const double fr = dem.row_of(y);
  if (fc < 0.0 || fc > dem.cols() - 1 || fr < 0.0 || fr > dem.rows() - 1)
    throw std::out_of_range("safety: footprint off grid");
  return dem.sample(x, y);
}

// Least-squares plane through the pad contact points for one orientation.
Plane pad_plane(const Dem& dem, int row, int col, double orientation, const LanderGeometry& geom) {
  const double cx = dem.world_x(col);
  const double cy = dem.world_y(row);
  const double radius = geom.base_diameter / 2.0;

  double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sz = 0, sxz = 0, syz = 0;
  const int n = geom.pad_count;
  for (int k = 0; k < n; ++k) {
    const double th = orientation + 2.0 * M_PI * k / n;
    const double px = radius * std::cos(th);
    const double py = radius * std::sin(th);
    const double pz = sample_checked(dem, cx + px, cy + py);
    sxx += px * px; sxy += px * py; syy += py * py;
    sx += px; sy += py; sz += pz;
    sxz += px * pz; syz += py * pz;
  }
  // Normal equations for [a b c]; 3x3 Cramer solve.
  const double m[3][3] = {{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, static_cast<double>(n)}};
  const double rhs[3] = {sxz, syz, sz};
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (std::abs(det) < 1e-12) return {};
  auto det3 = [&](int col_replaced) {
    double t[3][3];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) t[r][c] = (c == col_replaced) ? rhs[r] : m[r][c];
    return t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
           t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
           t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
  };
  return {det3(0) / det, det3(1) / det, det3(2) / det};
}

}  // namespace

double worst_case_slope(const Dem& dem, int row, int col, const LanderGeometry& geom) {
  double worst = 0.0;
  for (int i = 0; i < geom.orientation_count; ++i) {
    const double o = M_PI * i / geom.orientation_count;
    const Plane p = pad_plane(dem, row, col, o, geom);
    const double slope = std::atan(std::sqrt(p.a * p.a + p.b * p.b)) * 180.0 / M_PI;
    worst = std::max(worst, slope);
  }
  return worst;
}

double roughness(const Dem& dem, int row, int col, double orientation, const LanderGeometry& geom) {
  const Plane p = pad_plane(dem, row, col, orientation, geom);
  const double radius = geom.base_diameter / 2.0;
  const int reach = static_cast<int>(std::floor(radius / dem.resolution));
  if (row - reach < 0 || row + reach >= dem.rows() || col - reach < 0 || col + reach >= dem.cols())
    throw std::out_of_range("roughness: footprint off grid");

  double worst = 0.0;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const double lx = dc * dem.resolution;
      const double ly = dr * dem.resolution;
      if (lx * lx + ly * ly > radius * radius) continue;
      const double terrain = dem.heights(row + dr, col + dc);
      const double plane = p.a * lx + p.b * ly + p.c;
      worst = std::max(worst, std::abs(terrain - plane));
    }
  }
  return worst;
}

double roughness_to_probability(double r, const SafetyThresholds& thr) {
  if (r < 0.0) throw std::invalid_argument("roughness_to_probability: r < 0");
  const double lo = 0.5 * thr.roughness_max;
  const double hi = 1.5 * thr.roughness_max;
  if (r <= lo) return 1.0;
  if (r >= hi) return 0.0;
  return 1.0 - (r - lo) / thr.roughness_max;
}

SafetyMaps compute_safety_maps(const Dem& dem, const LanderGeometry& geom, const SafetyThresholds& thr) {
  geom.validate();
  thr.validate();
  SafetyMaps maps;
  maps.v_d = Grid<std::uint8_t>(dem.rows(), dem.cols(), 0);
  maps.v_p = Grid<double>(dem.rows(), dem.cols(), 0.0);

  const int margin = footprint_margin_px(dem, geom);
  for (int r = margin; r < dem.rows() - margin; ++r) {
    for (int c = margin; c < dem.cols() - margin; ++c) {
      const double slope = worst_case_slope(dem, r, c, geom);
      if (slope > thr.slope_max_deg) continue;  // stays (0, 0)
      double min_prob = 1.0;
      double max_rough = 0.0;
      for (int i = 0; i < geom.orientation_count; ++i) {
        const double o = M_PI * i / geom.orientation_count;
        const double rough = roughness(dem, r, c, o, geom);
        min_prob = std::min(min_prob, roughness_to_probability(rough, thr));
        max_rough = std::max(max_rough, rough);
      }
      maps.v_p(r, c) = min_prob;
      maps.v_d(r, c) = max_rough <= thr.roughness_max ? 1 : 0;
    }
  }
  return maps;
}

}  // namespace hda

#pragma once

// Naive re-implementation of the safety-map definitions used as an
// independent oracle: same math, different code path (Gaussian elimination,
// no shared helpers with the library implementation).

#include <algorithm>
#include <cmath>

#include "hda/safety.hpp"

namespace testutil {

struct NaivePlane {
  double a, b, c;
};

inline bool naive_pad_plane(const hda::Dem& dem, int row, int col, double orient,
                            const hda::LanderGeometry& geom, NaivePlane* out) {
  const double R = geom.base_diameter / 2.0;
  const double cx = dem.world_x(col), cy = dem.world_y(row);
  double A[3][4] = {};
  for (int k = 0; k < geom.pad_count; ++k) {
    const double th = orient + 2.0 * M_PI * k / geom.pad_count;
    const double px = R * std::cos(th), py = R * std::sin(th);
    const double fc = dem.col_of(cx + px), fr = dem.row_of(cy + py);
    if (fc < 0.0 || fc > dem.cols() - 1 || fr < 0.0 || fr > dem.rows() - 1) return false;
    const double pz = dem.sample(cx + px, cy + py);
    const double v[3] = {px, py, 1.0};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) A[i][j] += v[i] * v[j];
      A[i][3] += v[i] * pz;
    }
  }
  // Gaussian elimination with partial pivoting
  for (int i = 0; i < 3; ++i) {
    int piv = i;
    for (int r = i + 1; r < 3; ++r)
      if (std::abs(A[r][i]) > std::abs(A[piv][i])) piv = r;
    for (int j = 0; j < 4; ++j) std::swap(A[i][j], A[piv][j]);
    if (std::abs(A[i][i]) < 1e-12) {
      *out = {0.0, 0.0, 0.0};
      return true;
    }
    for (int r = 0; r < 3; ++r) {
      if (r == i) continue;
      const double f = A[r][i] / A[i][i];
      for (int j = 0; j < 4; ++j) A[r][j] -= f * A[i][j];
    }
  }
  *out = {A[0][3] / A[0][0], A[1][3] / A[1][1], A[2][3] / A[2][2]};
  return true;
}

inline hda::SafetyMaps naive_safety_maps(const hda::Dem& dem, const hda::LanderGeometry& geom,
                                         const hda::SafetyThresholds& thr) {
  hda::SafetyMaps maps;
  maps.v_d = hda::Grid<std::uint8_t>(dem.rows(), dem.cols(), 0);
  maps.v_p = hda::Grid<double>(dem.rows(), dem.cols(), 0.0);
  const double R = geom.base_diameter / 2.0;
  const int margin = static_cast<int>(std::ceil(R / dem.resolution));
  const int reach = static_cast<int>(std::floor(R / dem.resolution));

  for (int r = margin; r < dem.rows() - margin; ++r) {
    for (int c = margin; c < dem.cols() - margin; ++c) {
      double worst_slope = 0.0, worst_rough = 0.0, min_prob = 1.0;
      bool ok = true;
      for (int i = 0; i < geom.orientation_count && ok; ++i) {
        const double orient = M_PI * i / geom.orientation_count;
        NaivePlane p{};
        ok = naive_pad_plane(dem, r, c, orient, geom, &p);
        if (!ok) break;
        worst_slope = std::max(worst_slope, std::atan(std::hypot(p.a, p.b)) * 180.0 / M_PI);
        double rough = 0.0;
        for (int dr = -reach; dr <= reach; ++dr) {
          for (int dc = -reach; dc <= reach; ++dc) {
            const double lx = dc * dem.resolution, ly = dr * dem.resolution;
            if (lx * lx + ly * ly > R * R) continue;
            rough = std::max(rough,
                             std::abs(dem.heights(r + dr, c + dc) - (p.a * lx + p.b * ly + p.c)));
          }
        }
        worst_rough = std::max(worst_rough, rough);
        double prob;
        if (rough <= 0.5 * thr.roughness_max) {
          prob = 1.0;
        } else if (rough >= 1.5 * thr.roughness_max) {
          prob = 0.0;
        } else {
          prob = 1.0 - (rough - 0.5 * thr.roughness_max) / thr.roughness_max;
        }
        min_prob = std::min(min_prob, prob);
      }
      if (!ok || worst_slope > thr.slope_max_deg) continue;
      maps.v_p(r, c) = min_prob;
      maps.v_d(r, c) = worst_rough <= thr.roughness_max ? 1 : 0;
    }
  }
  return maps;
}

}  // namespace testutil

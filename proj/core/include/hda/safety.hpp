#pragma once

#include <cstdint>

#include "hda/grid.hpp"

namespace hda {

struct LanderGeometry {
  double base_diameter = 4.0;  // m, footpad circle
  int pad_count = 4;
  int orientation_count = 8;  // orientations {0, pi/n, ..., (n-1) pi/n}

  void validate() const;
};

struct SafetyThresholds {
  double slope_max_deg = 10.0;
  double roughness_max = 0.3;  // m

  void validate() const;
};

struct SafetyMaps {
  Grid<std::uint8_t> v_d;  // deterministic safety, {0,1}
  Grid<double> v_p;        // stochastic safety, [0,1]
};

// Max over footpad orientations of the tilt of the least-squares plane
// through the pads. Throws std::out_of_range when the footprint leaves the
// grid (callers mark such pixels unsafe).
double worst_case_slope(const Dem& dem, int row, int col, const LanderGeometry& geom);

// Worst belly-clearance violation: max |terrain - pad plane| over the
// footprint disc for one orientation.
double roughness(const Dem& dem, int row, int col, double orientation, const LanderGeometry& geom);

// Piecewise-linear ramp: 1 below 0.5*roughness_max, 0 above 1.5*roughness_max.
double roughness_to_probability(double r, const SafetyThresholds& thr);

// Per-pixel deterministic/stochastic safety of the whole DEM. Border pixels
// whose footprint leaves the grid are unsafe (0, 0).
SafetyMaps compute_safety_maps(const Dem& dem, const LanderGeometry& geom, const SafetyThresholds& thr);

// Pixels closer than this to the edge have an off-grid footprint.
int footprint_margin_px(const Dem& dem, const LanderGeometry& geom);

}  // namespace hda

#pragma once

#include <cstdint>

#include "hda/grid.hpp"

namespace hda {

struct TerrainParams {
  int rows = 1000;
  int cols = 1000;
  double resolution = 1.0;  // m/pixel

  double base_noise_amplitude = 3.0;  // m, std of the smoothed base surface
  double base_noise_sigma_px = 20.0;  // blur radius of the base surface

  double crater_density = 40.0;       // craters / km^2 over the diameter range
  double crater_diameter_min = 5.0;   // m; N(>D) ~ D^-2 between min and max
  double crater_diameter_max = 100.0;

  double boulder_k = 0.02;            // /m^2, cumulative N(>D) = k exp(-q D)
  double boulder_q = 2.0;             // /m
  double boulder_diameter_min = 0.3;  // m
  double boulder_diameter_max = 5.0;

  double max_relief = 50.0;  // m, height budget of the finished DEM
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

// Parabolic bowl (depth 0.2 D) with a raised-cosine rim (height 0.04 D)
// reaching 1.5 crater radii; added to the surface in place. Off-field
// footprints clip silently.
void stamp_crater(Dem& dem, double center_x, double center_y, double diameter);

// Hemispherical bump of peak height 0.5 D resting on the surrounding ground
// level; combines with existing terrain by max, so repeated stamps at one
// spot do not stack.
void stamp_boulder(Dem& dem, double center_x, double center_y, double diameter);

// Base surface + Poisson crater field + exponential boulder population.
// Deterministic for a fixed (params, seed); relief rescaled into the
// max_relief budget when exceeded.
Dem generate_terrain(const TerrainParams& params);

}  // namespace hda

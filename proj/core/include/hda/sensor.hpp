#pragma once

#include <cstdint>
#include <string>

#include "hda/grid.hpp"
#include "hda/vec3.hpp"

namespace hda {

struct SensorParams {
  double fov_deg = 11.4;            // LIDAR field of view
  int dem_size = 64;                // observation patch is dem_size x dem_size
  double noise_range_scale = 500.0; // sigma = (r / scale) * noise_sigma_slope
  double noise_sigma_slope = 0.05;
  double mask_elevation_min_deg = 70.0;  // pixels seen shallower than this are unsafe
  double interval_s = 5.0;               // observation cadence

  void validate() const;
};

struct ObservationFrame {
  Grid<double> o_p;     // dem_size x dem_size noisy safety patch, [0,1]
  double w_x = 0.0;     // FOV side lengths, m
  double w_y = 0.0;
  double center_x = 0.0;  // FOV center (the current target), world m
  double center_y = 0.0;
  Vec3 lander_position;   // at acquisition
  Vec3 lander_velocity;
  double lander_mass = 0.0;
  double timestamp = 0.0;
};

// Eq. for the square FOV side length: w = r_s * tan(fov).
double fov_width(double slant_range, double fov_deg);

struct SlantGeometry {
  double range;          // m
  double elevation_deg;  // angle of the pixel->lander ray above horizontal
};

// Throws std::domain_error when the lander is at or below the pixel.
SlantGeometry slant_geometry(const Vec3& pixel_pos, const Vec3& lander_pos);

// Cut the FOV square (centered on the target, axis aligned) out of the true
// stochastic safety map on a dem_size lattice: nearest-neighbor value plus
// range-proportional Gaussian noise, clipped to [0,1]. Pixels seen below the
// elevation mask and pixels outside the field are 0 (unsafe).
ObservationFrame generate_observation(const Grid<double>& v_p, const Dem& dem, const Vec3& lander_pos,
                                      double target_x, double target_y, const SensorParams& params,
                                      std::uint64_t rng_seed);

// HDAGRID payload plus a sidecar text header (acquisition state, FOV, time).
void write_observation(const std::string& path_prefix, const ObservationFrame& frame);

}  // namespace hda

#include "hda/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hda/rng.hpp"

namespace hda {

void SensorParams::validate() const {
  if (fov_deg <= 0.0 || fov_deg >= 90.0) throw std::invalid_argument("SensorParams: fov out of (0,90)");
  if (dem_size != 64) throw std::invalid_argument("SensorParams: dem_size must be 64");
  if (noise_range_scale <= 0.0) throw std::invalid_argument("SensorParams: noise_range_scale <= 0");
  if (interval_s <= 0.0) throw std::invalid_argument("SensorParams: interval <= 0");
}

double fov_width(double slant_range, double fov_deg) {
  if (slant_range < 0.0) throw std::invalid_argument("fov_width: negative range");
  return slant_range * std::tan(fov_deg * M_PI / 180.0);
}

SlantGeometry slant_geometry(const Vec3& pixel_pos, const Vec3& lander_pos) {
  const Vec3 d = lander_pos - pixel_pos;
  if (d.z <= 0.0) throw std::domain_error("slant_geometry: lander at or below pixel");
  const double range = d.norm();
  const double elevation = std::atan2(d.z, d.horizontal_norm()) * 180.0 / M_PI;
  return {range, elevation};
}

ObservationFrame generate_observation(const Grid<double>& v_p, const Dem& dem, const Vec3& lander_pos,
                                      double target_x, double target_y, const SensorParams& params,
                                      std::uint64_t rng_seed) {
  params.validate();
  Rng rng(rng_seed);

  const double target_z = dem.datum + dem.sample(target_x, target_y);
  const Vec3 target_pos{target_x, target_y, target_z};
  const double r_s = (lander_pos - target_pos).norm();
  const double w = fov_width(r_s, params.fov_deg);

  ObservationFrame frame;
  frame.o_p = Grid<double>(params.dem_size, params.dem_size, 0.0);
  frame.w_x = w;
  frame.w_y = w;
  frame.center_x = target_x;
  frame.center_y = target_y;
  frame.lander_position = lander_pos;

  const int n = params.dem_size;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double y_d = target_y - w / 2.0 + (i + 0.5) * w / n;
      const double x_d = target_x - w / 2.0 + (j + 0.5) * w / n;
      const double z_d = dem.datum + dem.sample(x_d, y_d);
      if (lander_pos.z <= z_d) continue;  // behind/below: unsafe
      const SlantGeometry geo = slant_geometry({x_d, y_d, z_d}, lander_pos);
      if (geo.elevation_deg < params.mask_elevation_min_deg) continue;  // stays 0

      const int col = static_cast<int>(std::lround(dem.col_of(x_d)));
      const int row = static_cast<int>(std::lround(dem.row_of(y_d)));
      if (!v_p.contains(row, col)) continue;  // outside the field: unsafe

      const double sigma = geo.range / params.noise_range_scale * params.noise_sigma_slope;
      const double noisy = v_p(row, col) + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
      frame.o_p(i, j) = std::clamp(noisy, 0.0, 1.0);
    }
  }
  return frame;
}

void write_observation(const std::string& path_prefix, const ObservationFrame& frame) {
  write_hdagrid(path_prefix + ".hdagrid", to_float_grid(frame.o_p),
                frame.w_x / frame.o_p.cols());
  std::ofstream os(path_prefix + ".txt");
  if (!os) throw std::runtime_error("write_observation: cannot open " + path_prefix + ".txt");
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "w_x %.9f\nw_y %.9f\ncenter %.9f %.9f\n"
                "lander_r %.9f %.9f %.9f\nlander_v %.9f %.9f %.9f\nlander_m %.9f\nt %.9f\n",
                frame.w_x, frame.w_y, frame.center_x, frame.center_y, frame.lander_position.x,
                frame.lander_position.y, frame.lander_position.z, frame.lander_velocity.x,
                frame.lander_velocity.y, frame.lander_velocity.z, frame.lander_mass, frame.timestamp);
  os << buf;
}

}  // namespace hda

#include "hda/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hda/rng.hpp"

namespace hda {

void TerrainParams::validate() const {
  if (rows <= 0 || cols <= 0 || resolution <= 0.0)
    throw std::invalid_argument("TerrainParams: bad grid shape");
  if (base_noise_amplitude < 0.0 || crater_density < 0.0 || boulder_k < 0.0 || boulder_q < 0.0)
    throw std::invalid_argument("TerrainParams: negative density/amplitude");
  if (crater_diameter_min >= crater_diameter_max)
    throw std::invalid_argument("TerrainParams: crater diameter range empty");
  if (boulder_diameter_min >= boulder_diameter_max)
    throw std::invalid_argument("TerrainParams: boulder diameter range empty");
  if (max_relief <= 0.0) throw std::invalid_argument("TerrainParams: max_relief <= 0");
}

void stamp_crater(Dem& dem, double center_x, double center_y, double diameter) {
  if (diameter <= 0.0) throw std::invalid_argument("stamp_crater: diameter <= 0");
  const double radius = diameter / 2.0;
  const double extent = 1.5 * radius;
  const double depth = 0.2 * diameter;
  const double rim = 0.04 * diameter;

  const double cc = dem.col_of(center_x);
  const double cr = dem.row_of(center_y);
  const double extent_px = extent / dem.resolution;
  const int r0 = std::max(0, static_cast<int>(std::floor(cr - extent_px)));
  const int r1 = std::min(dem.rows() - 1, static_cast<int>(std::ceil(cr + extent_px)));
  const int c0 = std::max(0, static_cast<int>(std::floor(cc - extent_px)));
  const int c1 = std::min(dem.cols() - 1, static_cast<int>(std::ceil(cc + extent_px)));

  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const double dx = dem.world_x(c) - center_x;
      const double dy = dem.world_y(r) - center_y;
      const double s = std::sqrt(dx * dx + dy * dy) / radius;
      if (s > 1.5) continue;
      double dh;
      if (s <= 1.0) {
        dh = -depth + (depth + rim) * s * s;
      } else {
        dh = rim * 0.5 * (1.0 + std::cos(M_PI * (s - 1.0) / 0.5));
      }
      dem.heights(r, c) += static_cast<float>(dh);
    }
  }
}

void stamp_boulder(Dem& dem, double center_x, double center_y, double diameter) {
  if (diameter <= 0.0) throw std::invalid_argument("stamp_boulder: diameter <= 0");
  const double radius = diameter / 2.0;
  const double cc = dem.col_of(center_x);
  const double cr = dem.row_of(center_y);
  const double reach_px = (radius + dem.resolution) / dem.resolution;
  const int r0 = std::max(0, static_cast<int>(std::floor(cr - reach_px)));
  const int r1 = std::min(dem.rows() - 1, static_cast<int>(std::ceil(cr + reach_px)));
  const int c0 = std::max(0, static_cast<int>(std::floor(cc - reach_px)));
  const int c1 = std::min(dem.cols() - 1, static_cast<int>(std::ceil(cc + reach_px)));
  if (r0 > r1 || c0 > c1) return;

  // Ground reference: the lowest pixel in a one-pixel-wide ring just outside
  // the footprint. The bump sits on this level so overlapping stamps combine
  // by max rather than summing.
  double ground = std::numeric_limits<double>::infinity();
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const double dx = dem.world_x(c) - center_x;
      const double dy = dem.world_y(r) - center_y;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d >= radius && d <= radius + dem.resolution) ground = std::min(ground, static_cast<double>(dem.heights(r, c)));
    }
  }
  if (!std::isfinite(ground)) {
    const int rc = static_cast<int>(std::lround(cr));
    const int cci = static_cast<int>(std::lround(cc));
    if (!dem.heights.contains(rc, cci)) return;
    ground = dem.heights(rc, cci);
  }

  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const double dx = dem.world_x(c) - center_x;
      const double dy = dem.world_y(r) - center_y;
      const double d2 = dx * dx + dy * dy;
      if (d2 >= radius * radius) continue;
      const double z = std::sqrt(radius * radius - d2);
      const auto candidate = static_cast<float>(ground + z);
      dem.heights(r, c) = std::max(dem.heights(r, c), candidate);
    }
  }
}

namespace {

int sample_poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  // Knuth's method; fine for the crater/boulder counts used here.
  const double limit = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.uniform();
  } while (p > limit);
  return k - 1;
}

// Inverse CDF of the N(>D) ~ D^-2 power law truncated to [dmin, dmax].
double sample_crater_diameter(Rng& rng, double dmin, double dmax) {
  const double a = 1.0 / (dmin * dmin);
  const double b = 1.0 / (dmax * dmax);
  const double u = rng.uniform();
  return 1.0 / std::sqrt(a - u * (a - b));
}

// Inverse CDF of the exponential cumulative model truncated to [dmin, dmax].
double sample_boulder_diameter(Rng& rng, double q, double dmin, double dmax) {
  const double a = std::exp(-q * dmin);
  const double b = std::exp(-q * dmax);
  const double u = rng.uniform();
  return -std::log(a - u * (a - b)) / q;
}

void separable_gaussian_blur(Grid<double>& g, double sigma_px) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_px)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i / sigma_px) * (i / sigma_px));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  // Wraparound boundaries keep the field statistics uniform; edge clamping
  // would concentrate kernel mass on border pixels and inflate their variance.
  const int rows = g.rows(), cols = g.cols();
  const auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
  Grid<double> tmp(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * g(r, wrap(c + i, cols));
      }
      tmp(r, c) = acc;
    }
  }
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * tmp(wrap(r + i, rows), c);
      }
      g(r, c) = acc;
    }
  }
}

}  // namespace

Dem generate_terrain(const TerrainParams& params) {
  params.validate();
  Rng rng(params.seed);

  Dem dem;
  dem.resolution = params.resolution;
  dem.heights = Grid<float>(params.rows, params.cols, 0.0f);

  // Base surface: smoothed white noise scaled to the requested std.
  if (params.base_noise_amplitude > 0.0) {
    Grid<double> base(params.rows, params.cols);
    for (double& v : base.data()) v = rng.normal();
    separable_gaussian_blur(base, params.base_noise_sigma_px);
    const size_t n = base.data().size();
    const double mean = std::accumulate(base.data().begin(), base.data().end(), 0.0) / n;
    double var = 0.0;
    for (double v : base.data()) var += (v - mean) * (v - mean);
    var /= n;
    const double scale = var > 0.0 ? params.base_noise_amplitude / std::sqrt(var) : 0.0;
    for (size_t i = 0; i < n; ++i)
      dem.heights.data()[i] = static_cast<float>((base.data()[i] - mean) * scale);
  }

  const double half_x = (params.cols - 1) / 2.0 * params.resolution;
  const double half_y = (params.rows - 1) / 2.0 * params.resolution;
  const double area_km2 = (params.rows * params.resolution) * (params.cols * params.resolution) / 1e6;

  const int n_craters = sample_poisson(rng, params.crater_density * area_km2);
  for (int i = 0; i < n_craters; ++i) {
    const double x = rng.uniform(-half_x, half_x);
    const double y = rng.uniform(-half_y, half_y);
    const double d = sample_crater_diameter(rng, params.crater_diameter_min, params.crater_diameter_max);
    stamp_crater(dem, x, y, d);
  }

  const double boulders_per_m2 =
      params.boulder_k * (std::exp(-params.boulder_q * params.boulder_diameter_min) -
                          std::exp(-params.boulder_q * params.boulder_diameter_max));
  const int n_boulders = sample_poisson(rng, boulders_per_m2 * area_km2 * 1e6);
  for (int i = 0; i < n_boulders; ++i) {
    const double x = rng.uniform(-half_x, half_x);
    const double y = rng.uniform(-half_y, half_y);
    const double d = sample_boulder_diameter(rng, params.boulder_q, params.boulder_diameter_min,
                                             params.boulder_diameter_max);
    stamp_boulder(dem, x, y, d);
  }

  // Height budget: rescale about the mean when the relief exceeds the limit.
  const double relief = dem.max_height() - dem.min_height();
  if (relief > params.max_relief) {
    const double mean =
        std::accumulate(dem.heights.data().begin(), dem.heights.data().end(), 0.0) / dem.heights.data().size();
    const double s = params.max_relief / relief;
    for (float& h : dem.heights.data()) h = static_cast<float>((h - mean) * s + mean);
  }
  return dem;
}

}  // namespace hda

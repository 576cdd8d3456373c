#include <cmath>

#include "doctest.h"
#include "hda/terrain.hpp"

using namespace hda;

namespace {
Dem flat_dem(int size, double resolution = 1.0) {
  Dem dem;
  dem.heights = Grid<float>(size, size, 0.0f);
  dem.resolution = resolution;
  return dem;
}

double grid_std(const Grid<float>& g) {
  double mean = 0.0;
  for (float v : g.data()) mean += v;
  mean /= g.data().size();
  double var = 0.0;
  for (float v : g.data()) var += (v - mean) * (v - mean);
  return std::sqrt(var / g.data().size());
}
}  // namespace

TEST_CASE("crater profile: bowl depth, rim height, extent") {
  Dem dem = flat_dem(101);
  const double D = 20.0;
  stamp_crater(dem, 0.0, 0.0, D);
  // Center of the bowl: depth 0.2 D below the prior ground
  CHECK(dem.sample(0.0, 0.0) == doctest::Approx(-0.2 * D).epsilon(1e-5));
  // Crest at the crater radius: rim height 0.04 D above ground
  CHECK(dem.sample(D / 2.0, 0.0) == doctest::Approx(0.04 * D).epsilon(1e-5));
  // Raised-cosine rim decays to zero at 1.5 R
  CHECK(std::abs(dem.sample(1.5 * D / 2.0, 0.0)) < 1e-5);
  // Untouched beyond the extent
  CHECK(dem.heights(50, 90) == 0.0f);
  // Monotone bowl interior along a radius
  CHECK(dem.sample(3.0, 0.0) > dem.sample(0.0, 0.0));
  CHECK_THROWS_AS(stamp_crater(dem, 0, 0, -1.0), std::invalid_argument);
}

TEST_CASE("crater stamping clips at the field border") {
  Dem dem = flat_dem(41);
  stamp_crater(dem, 20.0, 20.0, 30.0);  // mostly off-grid corner
  CHECK(dem.heights(0, 0) == 0.0f);     // far corner untouched
  CHECK(dem.sample(20.0, 20.0) < 0.0);  // bowl present where it overlaps
}

TEST_CASE("boulder is a hemisphere of height D/2 combined by max") {
  Dem dem = flat_dem(41);
  const double D = 4.0;
  stamp_boulder(dem, 0.0, 0.0, D);
  CHECK(dem.sample(0.0, 0.0) == doctest::Approx(0.5 * D).epsilon(1e-6));
  // On the lattice one pixel from center: z = sqrt(R^2 - 1)
  CHECK(dem.sample(1.0, 0.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));
  CHECK(dem.sample(4.0, 0.0) == doctest::Approx(0.0));

  // Re-stamping the identical boulder changes nothing (max rule, ground
  // referenced to the surrounding annulus)
  const Grid<float> before = dem.heights;
  stamp_boulder(dem, 0.0, 0.0, D);
  CHECK(dem.heights == before);
}

TEST_CASE("overlapping boulders do not stack additively") {
  Dem a = flat_dem(41);
  stamp_boulder(a, 0.0, 0.0, 4.0);
  const double single_peak = a.sample(0.0, 0.0);
  stamp_boulder(a, 0.5, 0.0, 4.0);
  // Peak can move/grow slightly via the annulus reference, but must stay far
  // below the 2x a pure sum would give
  CHECK(a.sample(0.25, 0.0) < 1.5 * single_peak);
}

TEST_CASE("generated terrain is deterministic per seed") {
  TerrainParams p;
  p.rows = 120;
  p.cols = 120;
  p.seed = 99;
  const Dem a = generate_terrain(p);
  const Dem b = generate_terrain(p);
  CHECK(a.heights == b.heights);
  p.seed = 100;
  const Dem c = generate_terrain(p);
  CHECK(a.heights != c.heights);
}

TEST_CASE("base surface std matches the configured amplitude") {
  TerrainParams p;
  p.rows = 400;
  p.cols = 400;
  p.crater_density = 0.0;
  p.boulder_k = 0.0;
  p.base_noise_amplitude = 3.0;
  p.seed = 5;
  const Dem dem = generate_terrain(p);
  CHECK(grid_std(dem.heights) == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("zero-amplitude, zero-population params give a flat field") {
  TerrainParams p;
  p.rows = 64;
  p.cols = 64;
  p.base_noise_amplitude = 0.0;
  p.crater_density = 0.0;
  p.boulder_k = 0.0;
  const Dem dem = generate_terrain(p);
  CHECK(dem.max_height() == 0.0);
  CHECK(dem.min_height() == 0.0);
}

TEST_CASE("relief never exceeds the configured budget") {
  TerrainParams p;
  p.rows = 256;
  p.cols = 256;
  p.max_relief = 10.0;  // tight budget forces the rescale path
  p.seed = 17;
  const Dem dem = generate_terrain(p);
  CHECK(dem.max_height() - dem.min_height() <= 10.0 + 1e-3);
}

TEST_CASE("crater population scales with density and area") {
  // With a fixed diameter range, compare hole volume across densities as a
  // proxy for the Poisson count scaling.
  TerrainParams p;
  p.rows = 500;
  p.cols = 500;
  p.base_noise_amplitude = 0.0;
  p.boulder_k = 0.0;
  p.seed = 3;
  p.crater_density = 0.0;
  CHECK(generate_terrain(p).min_height() == 0.0);
  p.crater_density = 40.0;
  const Dem cratered = generate_terrain(p);
  CHECK(cratered.min_height() < -1.0);  // 0.25 km^2 at 40/km^2: ~10 craters
}

TEST_CASE("parameter validation rejects bad ranges") {
  TerrainParams p;
  p.crater_diameter_min = 10.0;
  p.crater_diameter_max = 5.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = TerrainParams{};
  p.rows = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = TerrainParams{};
  p.max_relief = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

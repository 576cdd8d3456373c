#include <benchmark/benchmark.h>

#include "hda/guidance.hpp"
#include "hda/net.hpp"
#include "hda/safety.hpp"
#include "hda/terrain.hpp"

namespace {

hda::Dem make_dem(int size) {
  hda::TerrainParams p;
  p.rows = size;
  p.cols = size;
  p.seed = 7;
  return hda::generate_terrain(p);
}

void BM_GenerateTerrain(benchmark::State& state) {
  hda::TerrainParams p;
  p.rows = static_cast<int>(state.range(0));
  p.cols = p.rows;
  p.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hda::generate_terrain(p));
  }
}
BENCHMARK(BM_GenerateTerrain)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SafetyMaps(benchmark::State& state) {
  const hda::Dem dem = make_dem(static_cast<int>(state.range(0)));
  const hda::LanderGeometry geom;
  const hda::SafetyThresholds thr;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hda::compute_safety_maps(dem, geom, thr));
  }
}
BENCHMARK(BM_SafetyMaps)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_OptimalTgo(benchmark::State& state) {
  const hda::Vec3 r{120.0, -80.0, 950.0};
  const hda::Vec3 v{4.0, -3.0, -28.0};
  const hda::Vec3 r_f{0.0, 0.0, 50.0};
  const hda::Vec3 v_f{0.0, 0.0, 0.0};
  const hda::Vec3 g{0.0, 0.0, -1.62};
  for (auto _ : state) {
    benchmark::DoNotOptimize(hda::optimal_tgo(r, v, r_f, v_f, g));
  }
}
BENCHMARK(BM_OptimalTgo);

void BM_NetForward(benchmark::State& state) {
  hda::Rng rng(3);
  hda::DenseNet net({44, 256, 256, 5},
                    {hda::Activation::Relu, hda::Activation::Relu, hda::Activation::Sigmoid});
  net.init_random(rng);
  std::vector<double> in(44, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(in));
  }
}
BENCHMARK(BM_NetForward);

}  // namespace

BENCHMARK_MAIN();

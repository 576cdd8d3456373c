#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "hda/autoencoder.hpp"

using namespace hda;

namespace {

// Small synthetic "maps": blocky random patterns on a reduced lattice so a
// tiny model can learn them quickly.
std::vector<std::vector<double>> toy_dataset(int n, int map_size, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> data;
  for (int k = 0; k < n; ++k) {
    std::vector<double> row(static_cast<size_t>(map_size) * map_size);
    // Two random half-plane features: learnable structure, some variety
    const double cx = rng.uniform(0.2, 0.8) * map_size;
    const double cy = rng.uniform(0.2, 0.8) * map_size;
    for (int i = 0; i < map_size; ++i)
      for (int j = 0; j < map_size; ++j)
        row[static_cast<size_t>(i) * map_size + j] =
            (i < cy ? 0.8 : 0.2) * (j < cx ? 1.0 : 0.5);
    data.push_back(std::move(row));
  }
  return data;
}

AutoencoderConfig toy_config() {
  AutoencoderConfig cfg;
  cfg.map_size = 8;
  cfg.hidden = {32};
  cfg.latent_dim = 6;
  cfg.epochs = 40;
  cfg.batch_size = 8;
  cfg.seed = 4;
  return cfg;
}

}  // namespace

TEST_CASE("autoencoder shapes follow the config") {
  AutoencoderConfig cfg = toy_config();
  Rng rng(cfg.seed);
  const AutoencoderModel m = make_autoencoder(cfg, rng);
  CHECK(m.encoder.input_size() == 64);
  CHECK(m.encoder.output_size() == 6);
  CHECK(m.decoder.input_size() == 6);
  CHECK(m.decoder.output_size() == 64);
  // Reconstruction lives in [0,1] via the sigmoid head
  const std::vector<double> rec = m.decoder.forward(m.encoder.forward(std::vector<double>(64, 0.5)));
  for (double v : rec) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("training reduces reconstruction error and fills history") {
  const auto data = toy_dataset(120, 8, 11);
  AutoencoderHistory hist;
  const AutoencoderModel m = train_autoencoder(data, toy_config(), &hist);
  CHECK(m.trained);
  REQUIRE(hist.train_mse.size() == 40);
  REQUIRE(hist.holdout_mse.size() == 40);
  CHECK(hist.train_mse.back() < 0.25 * hist.train_mse.front());
  CHECK(hist.holdout_mse.back() < 0.05);
}

TEST_CASE("training is deterministic for a fixed config") {
  const auto data = toy_dataset(40, 8, 5);
  const AutoencoderModel a = train_autoencoder(data, toy_config());
  const AutoencoderModel b = train_autoencoder(data, toy_config());
  CHECK(a.encoder.params() == b.encoder.params());
  CHECK(a.decoder.params() == b.decoder.params());
}

TEST_CASE("model save/load round trip is bit exact") {
  const auto data = toy_dataset(30, 8, 9);
  AutoencoderConfig cfg = toy_config();
  cfg.epochs = 3;
  const AutoencoderModel m = train_autoencoder(data, cfg);
  const std::string path = (std::filesystem::temp_directory_path() / "hda_t_ae.ckpt").string();
  m.save_file(path);
  const AutoencoderModel back = AutoencoderModel::load_file(path);
  CHECK(back.trained);
  CHECK(back.encoder.params() == m.encoder.params());
  CHECK(back.decoder.params() == m.decoder.params());
}

TEST_CASE("encode flattens a grid and returns the latent") {
  const auto data = toy_dataset(30, 8, 9);
  AutoencoderConfig cfg = toy_config();
  cfg.epochs = 2;
  const AutoencoderModel m = train_autoencoder(data, cfg);
  Grid<double> map(8, 8, 0.5);
  const std::vector<double> z = encode(m, map);
  CHECK(z.size() == 6);
  const std::vector<double> flat = flatten(map);
  REQUIRE(flat.size() == 64);
  CHECK(z == m.encoder.forward(flat));
}

TEST_CASE("training rejects malformed datasets") {
  AutoencoderConfig cfg = toy_config();
  CHECK_THROWS(train_autoencoder({}, cfg));
  std::vector<std::vector<double>> bad{std::vector<double>(10, 0.0)};
  CHECK_THROWS(train_autoencoder(bad, cfg));
}

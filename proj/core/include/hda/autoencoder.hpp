#pragma once

#include <string>
#include <vector>

#include "hda/grid.hpp"
#include "hda/net.hpp"

namespace hda {

struct AutoencoderModel {
  DenseNet encoder;  // 4096 -> ... -> latent
  DenseNet decoder;  // latent -> ... -> 4096, sigmoid output
  bool trained = false;

  void save_file(const std::string& path) const;
  static AutoencoderModel load_file(const std::string& path);
};

struct AutoencoderConfig {
  std::vector<int> hidden = {512, 128};  // encoder hidden sizes; decoder mirrors
  int latent_dim = 32;
  int map_size = 64;
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double holdout_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct AutoencoderHistory {
  std::vector<double> train_mse;    // per epoch
  std::vector<double> holdout_mse;  // per epoch (empty when no holdout)
};

AutoencoderModel make_autoencoder(const AutoencoderConfig& cfg, Rng& rng);

// Minibatch Adam on mean squared reconstruction error. Dataset rows are
// flattened map_size^2 vectors in [0,1].
AutoencoderModel train_autoencoder(const std::vector<std::vector<double>>& dataset,
                                   const AutoencoderConfig& cfg,
                                   AutoencoderHistory* history = nullptr);

std::vector<double> encode(const AutoencoderModel& model, const Grid<double>& map);
std::vector<double> flatten(const Grid<double>& map);

}  // namespace hda

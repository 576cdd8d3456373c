#include "hda/autoencoder.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace hda {

void AutoencoderModel::save_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("AutoencoderModel::save_file: cannot open " + path);
  os << "HDAAE 1 " << (trained ? 1 : 0) << "\n";
  encoder.save(os);
  decoder.save(os);
}

AutoencoderModel AutoencoderModel::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("AutoencoderModel::load_file: cannot open " + path);
  std::string magic;
  int version = 0, trained = 0;
  is >> magic >> version >> trained;
  if (magic != "HDAAE" || version != 1) throw std::runtime_error("AutoencoderModel: bad header");
  AutoencoderModel model;
  model.encoder = DenseNet::load(is);
  model.decoder = DenseNet::load(is);
  model.trained = trained != 0;
  return model;
}

AutoencoderModel make_autoencoder(const AutoencoderConfig& cfg, Rng& rng) {
  const int dim = cfg.map_size * cfg.map_size;
  std::vector<int> enc_sizes = {dim};
  enc_sizes.insert(enc_sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  enc_sizes.push_back(cfg.latent_dim);
  std::vector<Activation> enc_acts(enc_sizes.size() - 1, Activation::Relu);
  enc_acts.back() = Activation::Identity;  // raw latent

  std::vector<int> dec_sizes = {cfg.latent_dim};
  dec_sizes.insert(dec_sizes.end(), cfg.hidden.rbegin(), cfg.hidden.rend());
  dec_sizes.push_back(dim);
  std::vector<Activation> dec_acts(dec_sizes.size() - 1, Activation::Relu);
  dec_acts.back() = Activation::Sigmoid;

  AutoencoderModel model;
  model.encoder = DenseNet(enc_sizes, enc_acts);
  model.decoder = DenseNet(dec_sizes, dec_acts);
  model.encoder.init_random(rng);
  model.decoder.init_random(rng);
  return model;
}

namespace {

double reconstruction_mse(const AutoencoderModel& model, const std::vector<std::vector<double>>& rows,
                          const std::vector<size_t>& idx) {
  if (idx.empty()) return 0.0;
  double total = 0.0;
  for (size_t i : idx) {
    const auto out = model.decoder.forward(model.encoder.forward(rows[i]));
    double mse = 0.0;
    for (size_t k = 0; k < out.size(); ++k) {
      const double d = out[k] - rows[i][k];
      mse += d * d;
    }
    total += mse / out.size();
  }
  return total / idx.size();
}

}  // namespace

AutoencoderModel train_autoencoder(const std::vector<std::vector<double>>& dataset,
                                   const AutoencoderConfig& cfg, AutoencoderHistory* history) {
  if (dataset.empty()) throw std::invalid_argument("train_autoencoder: empty dataset");
  const int dim = cfg.map_size * cfg.map_size;
  for (const auto& row : dataset)
    if (static_cast<int>(row.size()) != dim)
      throw std::invalid_argument("train_autoencoder: dataset row size mismatch");

  Rng rng(cfg.seed);
  AutoencoderModel model = make_autoencoder(cfg, rng);
  AdamOptimizer enc_opt(model.encoder.param_count(), cfg.learning_rate);
  AdamOptimizer dec_opt(model.decoder.param_count(), cfg.learning_rate);

  // Deterministic split: last holdout_fraction of a seeded shuffle.
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), size_t{0});
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  size_t n_holdout = static_cast<size_t>(order.size() * cfg.holdout_fraction);
  if (n_holdout >= order.size()) n_holdout = 0;
  std::vector<size_t> train_idx(order.begin(), order.end() - n_holdout);
  std::vector<size_t> holdout_idx(order.end() - n_holdout, order.end());

  std::vector<double> enc_grads(model.encoder.param_count());
  std::vector<double> dec_grads(model.decoder.param_count());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (size_t i = train_idx.size(); i > 1; --i)
      std::swap(train_idx[i - 1], train_idx[rng.uniform_index(i)]);

    double epoch_loss = 0.0;
    size_t batches = 0;
    for (size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
      const size_t end = std::min(start + cfg.batch_size, train_idx.size());
      std::fill(enc_grads.begin(), enc_grads.end(), 0.0);
      std::fill(dec_grads.begin(), dec_grads.end(), 0.0);
      double batch_loss = 0.0;
      const double batch_n = static_cast<double>(end - start);

      for (size_t k = start; k < end; ++k) {
        const auto& x = dataset[train_idx[k]];
        DenseNet::Cache enc_cache, dec_cache;
        const auto z = model.encoder.forward(x, &enc_cache);
        const auto xhat = model.decoder.forward(z, &dec_cache);

        std::vector<double> out_grad(xhat.size());
        double mse = 0.0;
        for (size_t j = 0; j < xhat.size(); ++j) {
          const double d = xhat[j] - x[j];
          mse += d * d;
          out_grad[j] = 2.0 * d / (xhat.size() * batch_n);
        }
        batch_loss += mse / xhat.size();

        const auto z_grad = model.decoder.backward(dec_cache, out_grad, dec_grads);
        model.encoder.backward(enc_cache, z_grad, enc_grads);
      }
      dec_opt.step(model.decoder.params(), dec_grads);
      enc_opt.step(model.encoder.params(), enc_grads);
      epoch_loss += batch_loss / batch_n;
      ++batches;
    }
    if (history) {
      history->train_mse.push_back(batches ? epoch_loss / batches : 0.0);
      if (!holdout_idx.empty())
        history->holdout_mse.push_back(reconstruction_mse(model, dataset, holdout_idx));
    }
  }
  model.trained = true;
  return model;
}

std::vector<double> flatten(const Grid<double>& map) {
  return map.data();
}

std::vector<double> encode(const AutoencoderModel& model, const Grid<double>& map) {
  return model.encoder.forward(flatten(map));
}

}  // namespace hda

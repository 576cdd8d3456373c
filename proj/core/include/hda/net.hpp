#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hda/rng.hpp"

namespace hda {

enum class Activation { Relu, Tanh, Sigmoid, Identity };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Fully connected network over a single flat parameter vector (weights
// row-major then biases, layer by layer). The flat layout keeps Adam, soft
// target updates, and serialization trivial.
class DenseNet {
 public:
  struct Cache {
    std::vector<std::vector<double>> inputs;   // activation entering each layer
    std::vector<std::vector<double>> preacts;  // affine outputs per layer
  };

  DenseNet() = default;
  DenseNet(std::vector<int> sizes, std::vector<Activation> acts);

  // He-style init scaled for the fan-in, biases zero.
  void init_random(Rng& rng);

  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<Activation>& activations() const { return acts_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::vector<double> forward(const std::vector<double>& input, Cache* cache = nullptr) const;

  // Reverse-mode gradients of the scalar loss whose d(loss)/d(output) is
  // supplied; parameter gradients accumulate into param_grads (same layout
  // as params). Returns d(loss)/d(input).
  std::vector<double> backward(const Cache& cache, const std::vector<double>& output_gradient,
                               std::vector<double>& param_grads) const;

  void save(std::ostream& os) const;
  static DenseNet load(std::istream& is);
  void save_file(const std::string& path) const;
  static DenseNet load_file(const std::string& path);

 private:
  std::vector<int> sizes_;
  std::vector<Activation> acts_;        // one per affine layer
  std::vector<double> params_;
  std::vector<size_t> w_offsets_;
  std::vector<size_t> b_offsets_;
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(size_t param_count = 0, double lr = 1e-3, double beta1 = 0.9,
                         double beta2 = 0.999, double eps = 1e-8);

  void step(std::vector<double>& params, const std::vector<double>& grads);

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  long step_count() const { return steps_; }

  void save(std::ostream& os) const;
  static AdamOptimizer load(std::istream& is);

 private:
  double lr_, beta1_, beta2_, eps_;
  long steps_ = 0;
  std::vector<double> m_, v_;
};

// theta_target <- tau * theta + (1 - tau) * theta_target
void soft_update(std::vector<double>& target_params, const std::vector<double>& params, double tau);

}  // namespace hda

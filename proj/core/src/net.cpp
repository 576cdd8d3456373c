#include "hda/net.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hda {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Identity: return "identity";
  }
  return "?";
}

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation: " + name);
}

namespace {

double apply_act(Activation a, double x) {
  switch (a) {
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Identity: return x;
  }
  return x;
}

double act_derivative(Activation a, double pre) {
  switch (a) {
    case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-pre));
      return s * (1.0 - s);
    }
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

}  // namespace

DenseNet::DenseNet(std::vector<int> sizes, std::vector<Activation> acts)
    : sizes_(std::move(sizes)), acts_(std::move(acts)) {
  if (sizes_.size() < 2) throw std::invalid_argument("DenseNet: need at least two layer sizes");
  if (acts_.size() != sizes_.size() - 1)
    throw std::invalid_argument("DenseNet: one activation per affine layer required");
  size_t total = 0;
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    w_offsets_.push_back(total);
    total += static_cast<size_t>(sizes_[l + 1]) * sizes_[l];
    b_offsets_.push_back(total);
    total += sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

void DenseNet::init_random(Rng& rng) {
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l];
    const double scale = std::sqrt(2.0 / fan_in);
    double* w = params_.data() + w_offsets_[l];
    const size_t nw = static_cast<size_t>(sizes_[l + 1]) * fan_in;
    for (size_t i = 0; i < nw; ++i) w[i] = rng.normal() * scale;
    double* b = params_.data() + b_offsets_[l];
    for (int i = 0; i < sizes_[l + 1]; ++i) b[i] = 0.0;
  }
}

std::vector<double> DenseNet::forward(const std::vector<double>& input, Cache* cache) const {
  if (static_cast<int>(input.size()) != sizes_.front())
    throw std::invalid_argument("DenseNet::forward: input size mismatch");
  if (cache) {
    cache->inputs.clear();
    cache->preacts.clear();
  }
  std::vector<double> a = input;
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const double* w = params_.data() + w_offsets_[l];
    const double* b = params_.data() + b_offsets_[l];
    std::vector<double> pre(out);
    for (int o = 0; o < out; ++o) {
      const double* wr = w + static_cast<size_t>(o) * in;
      double acc = b[o];
      for (int i = 0; i < in; ++i) acc += wr[i] * a[i];
      pre[o] = acc;
    }
    if (cache) cache->inputs.push_back(std::move(a));
    std::vector<double> post(out);
    for (int o = 0; o < out; ++o) post[o] = apply_act(acts_[l], pre[o]);
    if (cache) cache->preacts.push_back(std::move(pre));
    a = std::move(post);
  }
  return a;
}

std::vector<double> DenseNet::backward(const Cache& cache, const std::vector<double>& output_gradient,
                                       std::vector<double>& param_grads) const {
  if (cache.inputs.size() != sizes_.size() - 1)
    throw std::invalid_argument("DenseNet::backward: cache does not match network");
  if (param_grads.size() != params_.size())
    throw std::invalid_argument("DenseNet::backward: gradient buffer size mismatch");
  if (static_cast<int>(output_gradient.size()) != sizes_.back())
    throw std::invalid_argument("DenseNet::backward: output gradient size mismatch");

  std::vector<double> delta = output_gradient;
  for (size_t l = sizes_.size() - 1; l-- > 0;) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const double* w = params_.data() + w_offsets_[l];
    double* gw = param_grads.data() + w_offsets_[l];
    double* gb = param_grads.data() + b_offsets_[l];
    const auto& pre = cache.preacts[l];
    const auto& x = cache.inputs[l];

    for (int o = 0; o < out; ++o) delta[o] *= act_derivative(acts_[l], pre[o]);

    std::vector<double> prev_delta(in, 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      double* gwr = gw + static_cast<size_t>(o) * in;
      const double* wr = w + static_cast<size_t>(o) * in;
      for (int i = 0; i < in; ++i) {
        gwr[i] += d * x[i];
        prev_delta[i] += d * wr[i];
      }
    }
    delta = std::move(prev_delta);
  }
  return delta;
}

void DenseNet::save(std::ostream& os) const {
  os << "HDANET 1\n";
  os << "sizes";
  for (int s : sizes_) os << ' ' << s;
  os << "\nacts";
  for (Activation a : acts_) os << ' ' << activation_name(a);
  os << "\nparams " << params_.size() << "\n";
  char buf[128];
  for (double p : params_) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", p);
    os << buf;
  }
}

DenseNet DenseNet::load(std::istream& is) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "HDANET" || version != 1) throw std::runtime_error("DenseNet::load: bad header");
  std::string line, tag;
  is >> tag;
  if (tag != "sizes") throw std::runtime_error("DenseNet::load: expected sizes");
  std::getline(is, line);
  std::istringstream ss(line);
  std::vector<int> sizes;
  for (int v; ss >> v;) sizes.push_back(v);
  is >> tag;
  if (tag != "acts") throw std::runtime_error("DenseNet::load: expected acts");
  std::getline(is, line);
  std::istringstream sa(line);
  std::vector<Activation> acts;
  for (std::string name; sa >> name;) acts.push_back(activation_from_name(name));
  size_t count = 0;
  is >> tag >> count;
  if (tag != "params") throw std::runtime_error("DenseNet::load: expected params");
  DenseNet net(sizes, acts);
  if (count != net.params_.size()) throw std::runtime_error("DenseNet::load: parameter count mismatch");
  for (size_t i = 0; i < count; ++i) is >> net.params_[i];
  if (!is) throw std::runtime_error("DenseNet::load: truncated parameters");
  return net;
}

void DenseNet::save_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("DenseNet::save_file: cannot open " + path);
  save(os);
}

DenseNet DenseNet::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("DenseNet::load_file: cannot open " + path);
  return load(is);
}

AdamOptimizer::AdamOptimizer(size_t param_count, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(param_count, 0.0), v_(param_count, 0.0) {}

void AdamOptimizer::step(std::vector<double>& params, const std::vector<double>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::invalid_argument("AdamOptimizer::step: size mismatch");
  ++steps_;
  const double bc1 = 1.0 - std::pow(beta1_, steps_);
  const double bc2 = 1.0 - std::pow(beta2_, steps_);
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

void AdamOptimizer::save(std::ostream& os) const {
  os << "ADAM 1 " << m_.size() << ' ' << steps_ << ' ';
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g\n", lr_, beta1_, beta2_, eps_);
  os << buf;
  for (size_t i = 0; i < m_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", m_[i], v_[i]);
    os << buf;
  }
}

AdamOptimizer AdamOptimizer::load(std::istream& is) {
  std::string magic;
  int version = 0;
  size_t count = 0;
  long steps = 0;
  double lr, b1, b2, eps;
  is >> magic >> version >> count >> steps >> lr >> b1 >> b2 >> eps;
  if (magic != "ADAM" || version != 1) throw std::runtime_error("AdamOptimizer::load: bad header");
  AdamOptimizer opt(count, lr, b1, b2, eps);
  opt.steps_ = steps;
  for (size_t i = 0; i < count; ++i) is >> opt.m_[i] >> opt.v_[i];
  if (!is) throw std::runtime_error("AdamOptimizer::load: truncated");
  return opt;
}

void soft_update(std::vector<double>& target_params, const std::vector<double>& params, double tau) {
  if (target_params.size() != params.size())
    throw std::invalid_argument("soft_update: size mismatch");
  for (size_t i = 0; i < params.size(); ++i)
    target_params[i] = tau * params[i] + (1.0 - tau) * target_params[i];
}

}  // namespace hda

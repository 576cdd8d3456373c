#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "hda/net.hpp"

using namespace hda;

namespace {

// Central-difference gradient check of 0.5 * |f(x) - y|^2 w.r.t. parameters
// and inputs, at `probes` random parameter indices.
void check_gradients(DenseNet& net, Rng& rng, int probes) {
  std::vector<double> x(net.input_size());
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  std::vector<double> y(net.output_size());
  for (double& v : y) v = rng.uniform(-1.0, 1.0);

  const auto loss = [&]() {
    const std::vector<double> out = net.forward(x);
    double l = 0.0;
    for (size_t i = 0; i < out.size(); ++i) l += 0.5 * (out[i] - y[i]) * (out[i] - y[i]);
    return l;
  };

  DenseNet::Cache cache;
  const std::vector<double> out = net.forward(x, &cache);
  std::vector<double> dout(out.size());
  for (size_t i = 0; i < out.size(); ++i) dout[i] = out[i] - y[i];
  std::vector<double> pgrads(net.param_count(), 0.0);
  const std::vector<double> dx = net.backward(cache, dout, pgrads);

  const double h = 1e-6;
  for (int p = 0; p < probes; ++p) {
    const size_t idx = rng.uniform_index(net.param_count());
    const double saved = net.params()[idx];
    net.params()[idx] = saved + h;
    const double lp = loss();
    net.params()[idx] = saved - h;
    const double lm = loss();
    net.params()[idx] = saved;
    const double numeric = (lp - lm) / (2.0 * h);
    const double analytic = pgrads[idx];
    const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
    CHECK(std::abs(numeric - analytic) / denom < 1e-4);
  }
  // Input gradients too
  for (int p = 0; p < std::min<int>(probes, net.input_size()); ++p) {
    const size_t idx = rng.uniform_index(x.size());
    const double saved = x[idx];
    x[idx] = saved + h;
    const double lp = loss();
    x[idx] = saved - h;
    const double lm = loss();
    x[idx] = saved;
    const double numeric = (lp - lm) / (2.0 * h);
    const double denom = std::max({std::abs(numeric), std::abs(dx[idx]), 1e-8});
    CHECK(std::abs(numeric - dx[idx]) / denom < 1e-4);
  }
}

}  // namespace

TEST_CASE("forward pass of a hand-computed two-layer net") {
  // 2 -> 2 (relu) -> 1 (identity); weights set by hand
  DenseNet net({2, 2, 1}, {Activation::Relu, Activation::Identity});
  // Layout: layer-1 weights row-major (2x2), layer-1 biases (2),
  //         layer-2 weights (1x2), layer-2 bias (1)
  net.params() = {1.0, -2.0,   // h0 = 1*x0 - 2*x1
                  0.5, 0.25,   // h1 = 0.5*x0 + 0.25*x1
                  0.1, -0.1,   // biases
                  3.0, -1.0,   // out = 3*relu(h0+0.1) - relu(h1-0.1)
                  0.7};
  const std::vector<double> out = net.forward({2.0, 1.0});
  // pre1 = [2-2+0.1, 1+0.25-0.1] = [0.1, 1.15]; relu keeps both
  // out = 3*0.1 - 1*1.15 + 0.7 = -0.15
  REQUIRE(out.size() == 1);
  CHECK(out[0] == doctest::Approx(-0.15).epsilon(1e-12));

  // Negative pre-activation gates to zero through relu
  const std::vector<double> out2 = net.forward({-2.0, 1.0});
  // pre1 = [-4+0.1, -0.75-0.1] -> relu [0, 0]; out = 0.7
  CHECK(out2[0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("activation functions at reference points") {
  DenseNet net({1, 1}, {Activation::Tanh});
  net.params() = {1.0, 0.0};
  CHECK(net.forward({0.5})[0] == doctest::Approx(std::tanh(0.5)));
  DenseNet sig({1, 1}, {Activation::Sigmoid});
  sig.params() = {1.0, 0.0};
  CHECK(sig.forward({0.0})[0] == doctest::Approx(0.5));
  CHECK(activation_from_name(activation_name(Activation::Tanh)) == Activation::Tanh);
  CHECK_THROWS(activation_from_name("swish"));
}

TEST_CASE("finite-difference gradients across shapes and activations") {
  Rng rng(31);
  struct Shape {
    std::vector<int> sizes;
    std::vector<Activation> acts;
  };
  const Shape shapes[] = {
      {{3, 8, 2}, {Activation::Relu, Activation::Identity}},
      {{5, 16, 16, 4}, {Activation::Tanh, Activation::Relu, Activation::Sigmoid}},
      {{44, 32, 32, 5}, {Activation::Relu, Activation::Relu, Activation::Sigmoid}},
      {{49, 24, 1}, {Activation::Relu, Activation::Identity}},
      {{10, 12, 6, 12, 10}, {Activation::Relu, Activation::Identity, Activation::Relu,
                             Activation::Sigmoid}},
  };
  for (const Shape& s : shapes) {
    DenseNet net(s.sizes, s.acts);
    net.init_random(rng);
    check_gradients(net, rng, 100);
  }
}

TEST_CASE("param layout size matches sum of W and b blocks") {
  DenseNet net({4, 7, 3}, {Activation::Relu, Activation::Identity});
  CHECK(net.param_count() == 4 * 7 + 7 + 7 * 3 + 3);
  CHECK(net.input_size() == 4);
  CHECK(net.output_size() == 3);
}

TEST_CASE("he initialization is seeded and scale-plausible") {
  Rng a(7), b(7), c(8);
  DenseNet n1({64, 64}, {Activation::Relu});
  DenseNet n2({64, 64}, {Activation::Relu});
  DenseNet n3({64, 64}, {Activation::Relu});
  n1.init_random(a);
  n2.init_random(b);
  n3.init_random(c);
  CHECK(n1.params() == n2.params());
  CHECK(n1.params() != n3.params());
  double sumsq = 0.0;
  for (int i = 0; i < 64 * 64; ++i) sumsq += n1.params()[i] * n1.params()[i];
  const double sd = std::sqrt(sumsq / (64 * 64));
  CHECK(sd == doctest::Approx(std::sqrt(2.0 / 64)).epsilon(0.1));
  // biases zero
  for (int i = 64 * 64; i < 64 * 64 + 64; ++i) CHECK(n1.params()[i] == 0.0);
}

TEST_CASE("network save/load round trip is bit exact") {
  Rng rng(12);
  DenseNet net({6, 11, 3}, {Activation::Tanh, Activation::Sigmoid});
  net.init_random(rng);
  std::stringstream ss;
  net.save(ss);
  const DenseNet back = DenseNet::load(ss);
  CHECK(back.sizes() == net.sizes());
  CHECK(back.activations() == net.activations());
  REQUIRE(back.param_count() == net.param_count());
  for (size_t i = 0; i < net.param_count(); ++i) CHECK(back.params()[i] == net.params()[i]);

  const std::string path = (std::filesystem::temp_directory_path() / "hda_t_net.ckpt").string();
  net.save_file(path);
  const DenseNet fromfile = DenseNet::load_file(path);
  CHECK(fromfile.params() == net.params());
}

TEST_CASE("adam single step matches the hand-derived update") {
  // One parameter, g = 0.4: m = 0.04, v = 0.00016; bias-corrected
  // m^ = 0.4, v^ = 0.16; step = lr * m^ / (sqrt(v^) + eps) = lr * 1.0 - eps-ish
  AdamOptimizer opt(1, 0.001);
  std::vector<double> p{1.0};
  opt.step(p, {0.4});
  const double expect = 1.0 - 0.001 * 0.4 / (std::sqrt(0.16) + 1e-8);
  CHECK(p[0] == doctest::Approx(expect).epsilon(1e-12));
  CHECK(opt.step_count() == 1);
}

TEST_CASE("adam converges on a quadratic") {
  AdamOptimizer opt(2, 0.05);
  std::vector<double> p{4.0, -3.0};
  for (int i = 0; i < 2000; ++i) {
    opt.step(p, {2.0 * (p[0] - 1.0), 2.0 * (p[1] + 2.0)});
  }
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(p[1] == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("adam save/load resumes identically") {
  AdamOptimizer opt(3, 0.01);
  std::vector<double> p{1.0, 2.0, 3.0};
  opt.step(p, {0.1, -0.2, 0.3});
  std::stringstream ss;
  opt.save(ss);
  AdamOptimizer back = AdamOptimizer::load(ss);
  std::vector<double> q = p;
  opt.step(p, {0.05, 0.05, 0.05});
  back.step(q, {0.05, 0.05, 0.05});
  CHECK(p == q);
}

TEST_CASE("soft update blends parameters with tau") {
  std::vector<double> target{0.0, 10.0};
  soft_update(target, {1.0, 0.0}, 0.005);
  CHECK(target[0] == doctest::Approx(0.005));
  CHECK(target[1] == doctest::Approx(9.95));
  soft_update(target, {1.0, 0.0}, 1.0);
  CHECK(target[0] == 1.0);
  CHECK(target[1] == 0.0);
}

TEST_CASE("shape mismatches are rejected") {
  CHECK_THROWS(DenseNet({3, 4}, {Activation::Relu, Activation::Relu}));
  DenseNet net({3, 4}, {Activation::Relu});
  net.init_random(*std::make_unique<Rng>(1));
  CHECK_THROWS(net.forward({1.0, 2.0}));
}

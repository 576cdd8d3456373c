#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "hda/rng.hpp"

using namespace hda;

TEST_CASE("identical seeds give identical streams") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(124);
  CHECK(a.next_u64() != c.next_u64());
}

TEST_CASE("uniform stays in range and covers it") {
  Rng rng(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.001);
  CHECK(hi > 0.999);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
  }
}

TEST_CASE("uniform_index is unbiased across a non-power-of-two range") {
  Rng rng(11);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) {
    CHECK(c > 9500);  // expected 10000, generous band
    CHECK(c < 10500);
  }
}

TEST_CASE("normal deviates have the right first two moments") {
  Rng rng(5);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("truncated normal respects the clip") {
  Rng rng(9);
  for (int i = 0; i < 50000; ++i) {
    CHECK(std::abs(rng.normal_truncated(0.05, 3.0)) <= 0.15 + 1e-15);
  }
}

TEST_CASE("save/load resumes the exact stream including the spare deviate") {
  Rng rng(42);
  rng.normal();  // leaves a cached spare
  std::stringstream ss;
  rng.save(ss);
  Rng restored(0);
  restored.load(ss);
  for (int i = 0; i < 100; ++i) {
    CHECK(rng.normal() == restored.normal());
    CHECK(rng.next_u64() == restored.next_u64());
  }
}

TEST_CASE("spawned child streams differ from the parent") {
  Rng rng(1);
  Rng child = rng.spawn();
  Rng child2 = rng.spawn();
  CHECK(child.next_u64() != child2.next_u64());
}

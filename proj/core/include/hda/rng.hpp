#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>

namespace hda {

// Deterministic RNG with portable distributions. std::mt19937_64 output is
// specified bit-exactly by the standard; the distributions here are written
// out explicitly so streams are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller; caches the second deviate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Normal truncated to +-k sigma (resampling).
  double normal_truncated(double stddev, double k_sigma) {
    double v;
    do {
      v = normal() * stddev;
    } while (std::abs(v) > k_sigma * stddev);
    return v;
  }

  // Derive an independent child stream (for per-episode / per-terrain seeds).
  Rng spawn() { return Rng(engine_() ^ 0x9e3779b97f4a7c15ull); }

  void save(std::ostream& os) const {
    os << engine_ << ' ' << (has_spare_ ? 1 : 0) << ' ';
    os.write(reinterpret_cast<const char*>(&spare_), sizeof(spare_));
  }
  void load(std::istream& is) {
    int flag = 0;
    is >> engine_ >> flag;
    is.get();
    is.read(reinterpret_cast<char*>(&spare_), sizeof(spare_));
    has_spare_ = flag != 0;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hda

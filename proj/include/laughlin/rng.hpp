#pragma once

#include <cstdint>
#include <random>

#include "laughlin/geometry.hpp"

namespace laughlin {

// Deterministic random stream. The uniform/gaussian mappings are spelled out
// here instead of using std::*_distribution so that two runs with the same
// seed produce bit-identical samples regardless of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1], safe as a log() argument
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller, one value cached
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double t = 2.0 * M_PI * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  Vec2 gaussian_vec(double sigma) { return {sigma * gaussian(), sigma * gaussian()}; }

  // uniform point in the disk of given radius about the origin
  Vec2 disk_point(double radius) {
    const double r = radius * std::sqrt(uniform());
    const double t = 2.0 * M_PI * uniform();
    return {r * std::cos(t), r * std::sin(t)};
  }

  // Derives an independent stream seed (splitmix64 over the pair). Used to
  // give chains/restarts private streams from one experiment seed.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace laughlin

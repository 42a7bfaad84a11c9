#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>
#include <utility>

namespace medse {

// Deterministic generator used for every random decision in the project.
// splitmix64 core with explicit double construction, so sequences are
// identical across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0.
  int uniform_int(int n) {
    return int((unsigned __int128)next_u64() * (unsigned __int128)(uint64_t)n >> 64);
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586 * u2);
  }

  // Fisher-Yates.
  template <class It>
  void shuffle(It first, It last) {
    auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
      auto j = uniform_int(int(i) + 1);
      std::swap(first[i], first[j]);
    }
  }

  // Derives an independent stream id from a list of tags. Streams seeded
  // with different tag tuples never share state, which keeps the training
  // paths (dropout, batching, assignment, ...) order-independent.
  static uint64_t mix(std::initializer_list<uint64_t> tags) {
    uint64_t h = 0x243f6a8885a308d3ULL;
    for (uint64_t t : tags) {
      h ^= t + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
      h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
      h ^= h >> 31;
    }
    return h;
  }

 private:
  uint64_t state_;
};

}  // namespace medse

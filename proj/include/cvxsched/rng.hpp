#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cvxsched {

// splitmix64, used to derive decorrelated stream seeds from one base seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Thin wrapper over mt19937_64 with bounded draws that do not go through
// std::uniform_int_distribution, whose output is implementation-defined.
// Everything here is bit-reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform integer in [0, n), n >= 1. Lemire's multiply-shift with a
  // rejection step for exact uniformity.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next();
      const auto wide = static_cast<unsigned __int128>(r) * n;
      if (static_cast<std::uint64_t>(wide) >= threshold)
        return static_cast<std::uint64_t>(wide >> 64);
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -std::log(u) / rate;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[bounded(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cvxsched

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace hsim {

// Random stream with platform-independent distributions. The standard
// <random> distributions are implementation-defined, so only the raw
// mt19937_64 engine is used and every transform is done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independent stream from a master seed and a stream name.
  static Rng substream(std::uint64_t master, std::string_view name);
  static Rng substream(std::uint64_t master, std::string_view name,
                       std::uint64_t index);

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  // Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return uniform() < p; }

  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

// Samples ranks 0..n-1 with probability proportional to 1/(rank+1)^s.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent);

  std::size_t sample(Rng& rng) const;
  double pmf(std::size_t rank) const;
  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
  std::vector<double> pmf_;
};

// Draws an index with probability proportional to weights[i].
std::size_t sample_weighted(const std::vector<double>& weights, Rng& rng);

}  // namespace hsim

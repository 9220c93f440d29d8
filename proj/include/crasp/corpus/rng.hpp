#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace crasp::corpus {

std::uint64_t splitmix64(std::uint64_t x);
// Independent stream seed for record `index` of a dataset seeded with `seed`.
std::uint64_t record_seed(std::uint64_t seed, std::uint64_t index);

// mt19937_64 with portable integer and real draws (the std distributions are
// implementation-defined, so they are not used here).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }
  // Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return unit() < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[below(k)]);
  }
  // k distinct values from [lo, hi] in random order.
  std::vector<std::uint64_t> distinct(std::uint64_t lo, std::uint64_t hi, std::size_t k);

 private:
  std::mt19937_64 eng_;
};

}  // namespace crasp::corpus

#include "crasp/corpus/rng.hpp"

#include <stdexcept>
#include <unordered_set>

namespace crasp::corpus {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t record_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    auto x = next();
    if (x < limit) return x % n;
  }
}

std::vector<std::uint64_t> Rng::distinct(std::uint64_t lo, std::uint64_t hi, std::size_t k) {
  if (hi < lo || hi - lo + 1 < k) throw std::invalid_argument("Rng::distinct: range too small");
  std::vector<std::uint64_t> out;
  std::unordered_set<std::uint64_t> seen;
  while (out.size() < k) {
    auto v = between(lo, hi);
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

}  // namespace crasp::corpus

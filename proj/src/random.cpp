#include "lpsens/random.hpp"

#include <numeric>

namespace lpsens {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomSource RandomSource::split(std::uint64_t child) const {
  return RandomSource(seed_, splitmix64(stream_ ^ splitmix64(child + 0x632be59bd9b4e019ULL)));
}

Engine RandomSource::engine() const {
  const std::uint64_t a = splitmix64(seed_);
  const std::uint64_t b = splitmix64(stream_ + 0x2545f4914f6cdd1dULL);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Engine(seq);
}

double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double rademacher(Engine& eng) {
  return (eng() >> 63) ? 1.0 : -1.0;
}

std::size_t uniform_index(Engine& eng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(eng);
}

std::vector<std::size_t> random_permutation(Engine& eng, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = uniform_index(eng, i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace lpsens

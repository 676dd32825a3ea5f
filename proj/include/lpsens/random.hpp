#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace lpsens {

using Engine = std::mt19937_64;

// Deterministic, splittable source of randomness identified by (seed, stream).
// Every randomized stage draws from its own child stream so that adding draws
// to one stage never shifts the draws of another.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  RandomSource split(std::uint64_t child) const;

  // A fresh engine positioned at the start of this stream.
  Engine engine() const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

// Stage identifiers used with RandomSource::split.
namespace stage {
inline constexpr std::uint64_t kEmbedding = 1;
inline constexpr std::uint64_t kPartition = 2;
inline constexpr std::uint64_t kSigns = 3;
inline constexpr std::uint64_t kSampling = 4;
inline constexpr std::uint64_t kSketch = 5;
inline constexpr std::uint64_t kRecursion = 6;
inline constexpr std::uint64_t kAuxEmbedding = 7;
}  // namespace stage

double uniform01(Engine& eng);

// +1 or -1 with equal probability.
double rademacher(Engine& eng);

std::size_t uniform_index(Engine& eng, std::size_t n);

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> random_permutation(Engine& eng, std::size_t n);

}  // namespace lpsens

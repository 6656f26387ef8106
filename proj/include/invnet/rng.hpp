#pragma once

#include <cstdint>
#include <random>

namespace invnet {

// Named sub-streams of a run seed. Each consumer derives its own engine so
// that, e.g., changing the batch size never perturbs the dataset draw.
enum class Stream : std::uint64_t {
  kInit = 1,
  kTrainInputs = 2,
  kEvalInputs = 3,
  kShuffle = 4,
  kNoise = 5,
  kOracle = 6,
  kProbe = 7,
};

// SplitMix64 finalizer; a bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t counter = 0) noexcept {
  return mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream))) + counter);
}

// mt19937_64 output is specified by the standard; the distributions in
// <random> are not, so the conversions below are done by hand to keep every
// draw bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream, std::uint64_t counter = 0)
      : engine_(derive_seed(seed, stream, counter)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound) by rejection, bound > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller (cosine branch only).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace invnet

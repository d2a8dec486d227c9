#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace popweave {

/// All random streams are 64-bit Mersenne twisters. The helpers below avoid
/// the standard distributions so that outputs are identical across standard
/// library implementations.
using Rng = std::mt19937_64;

/// Mixes a base seed with a stream id (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(derive_seed(seed, stream));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

/// Inverse-CDF draw from unnormalized non-negative weights. Returns the last
/// positive-weight index if rounding leaves the threshold unreached.
template <typename Weights>
int sample_categorical(const Weights& weights, Rng& rng) {
  double total = 0.0;
  for (auto w : weights) total += w;
  double threshold = uniform_unit(rng) * total;
  double running = 0.0;
  int last_positive = -1;
  int index = 0;
  for (auto w : weights) {
    if (w > 0.0) {
      running += w;
      last_positive = index;
      if (threshold < running) return index;
    }
    ++index;
  }
  return last_positive;
}

/// Worker cap: POPWEAVE_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

}  // namespace popweave

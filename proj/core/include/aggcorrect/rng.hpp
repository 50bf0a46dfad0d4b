// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "aggcorrect/model.hpp"

namespace aggcorrect {

/// SplitMix64 finalizer; the building block for deriving substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a substream seed from a root seed and a path of words (stream
/// tags, chunk indices, replication indices). Every piece of randomness in
/// the library flows from one root seed through this function, which is what
/// makes runs reproducible independently of worker count.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path) noexcept;

/** One random stream with the sampling primitives the library needs.
 *
 * Distributions are generated from raw engine output by fixed algorithms
 * (polar method for normals, Marsaglia-Tsang with the shape<1 boost for
 * gammas) rather than std::*_distribution, so draw sequences are identical
 * across standard libraries. The gamma sampler is exact for all shapes > 0;
 * Jeffreys hyperparameters exercise shape 1/2.
 */
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform01();
  /// Uniform on (0, 1); safe to pass to log().
  double uniform_open01();
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Gamma(shape, 1). Throws NonPositiveConcentration for shape <= 0.
  double gamma(double shape);
  /// Dirichlet draw: normalized independent gammas. Output sums to 1.
  Vector dirichlet(const Vector& concentrations);
  /// Index in [0, probs.size()) with the given probabilities (sum to 1).
  int categorical(const Vector& probs);
  /// Uniform integer in [0, bound).
  std::uint64_t uniform_below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace aggcorrect

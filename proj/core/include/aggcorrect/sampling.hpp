// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aggcorrect/constraints.hpp"
#include "aggcorrect/inference.hpp"
#include "aggcorrect/rng.hpp"

namespace aggcorrect {

struct SamplerConfig {
  /// Number of accepted draws to produce (the resolution parameter R).
  std::uint64_t resolution = 10'000;
  /// Hard cap on attempts before failing with ConstraintStarvation.
  std::uint64_t max_total_attempts = 10'000 * 10'000ULL;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  static SamplerConfig with_attempts_factor(std::uint64_t resolution,
                                            std::uint64_t factor,
                                            std::uint64_t seed,
                                            unsigned workers);
  void validate() const;
};

/// One parameter draw: a contingency matrix and its base-rate vector. The
/// beta component is retained even though aggregate correction uses only P;
/// the posterior factorizes, so ignoring beta realizes the marginalization.
struct ParameterDraw {
  ContingencyMatrix p;
  Vector beta;
};

struct PosteriorDraws {
  std::vector<ParameterDraw> draws;
  std::uint64_t accepted = 0;
  std::uint64_t attempted = 0;
  double acceptance_rate = 0.0;
};

/// Dirichlet draw with validated concentrations.
Vector sample_dirichlet(const Vector& concentrations, RngStream& rng);

/// One draw from the product posterior: row g from Dir(alpha'_g) for
/// g = 0..K-1, then beta from Dir(gamma'), all mutually independent.
ParameterDraw sample_posterior_product(const PosteriorSpec& spec,
                                       RngStream& rng);

/** Constrained rejection sampling: posterior draws are accepted when they lie
 * in Theta_K(v-hat), until exactly R acceptances.
 *
 * Without a region, draws are accepted unless the singularity guard rejects
 * them (rejections still count as attempts).
 *
 * Determinism contract: the attempt stream is split into fixed-size chunks
 * whose RNG streams derive from (seed, chunk index); accepted draws merge in
 * chunk order. The result is bit-identical for any worker count.
 *
 * Throws ConstraintStarvation when max_total_attempts is exhausted first;
 * the message carries the observed acceptance rate for diagnosing
 * prior-data conflict.
 */
PosteriorDraws rejection_sample(const PosteriorSpec& spec,
                                const std::optional<ConstraintRegion>& region,
                                const SamplerConfig& cfg);

}  // namespace aggcorrect

// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aggcorrect/sampling.hpp"

namespace aggcorrect {

/// Per-class location/spread summary of a sample of corrected aggregates.
struct SummaryRow {
  double mean;
  double sd;
  double q2_5;
  double q25;
  double q50;
  double q75;
  double q97_5;
};

/** Posterior distribution of the corrected aggregate vector: one Q(draw) *
 * u-hat sample per accepted draw, at resolution R.
 */
struct CorrectedAggregateDistribution {
  std::vector<Vector> samples;
  std::uint64_t accepted = 0;
  std::uint64_t attempted = 0;
  double acceptance_rate = 0.0;

  int k() const {
    return samples.empty() ? 0 : static_cast<int>(samples.front().size());
  }
};

/// Naive estimator u-hat: per-class sums over predicted classes.
AggregateVector naive_estimate(std::span<const TargetRecord> records, int k);

/// Plug-in point estimate of P from confusion counts: rows n_gh / n_g.
/// Throws EmptyConfusionRow when some n_g = 0.
ContingencyMatrix plugin_contingency(const ConfusionCounts& counts);

/// The baseline method: Q u-hat with a plug-in P. Output may contain
/// negative components; they are returned, not clamped.
AggregateVector baseline_estimate(const ContingencyMatrix& p_hat,
                                  const AggregateVector& u_hat);

/// Three-step Bayesian estimate: rejection-sample the posterior (optionally
/// constrained to Theta_K) and map each accepted draw to Q(draw) * u-hat.
CorrectedAggregateDistribution bayes_estimate(
    const PosteriorSpec& spec, const AggregateVector& u_hat,
    const std::optional<ConstraintRegion>& region, const SamplerConfig& cfg);

/// Per-class mean, standard deviation and {2.5, 25, 50, 75, 97.5}% quantiles
/// (linear interpolation between order statistics).
std::vector<SummaryRow> summarize(const CorrectedAggregateDistribution& dist);

/// Everything one correction run reports, with the metadata required to
/// reproduce it.
struct EstimatorReport {
  std::vector<std::string> class_labels;
  std::string prior_name;
  bool constraints_enabled = true;
  std::uint64_t resolution = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t test_set_size = 0;
  std::uint64_t record_count = 0;
  Matrix confusion;

  AggregateVector naive;
  Vector v_hat;

  std::optional<AggregateVector> baseline;
  bool baseline_negative = false;
  std::string baseline_error;

  CorrectedAggregateDistribution bayes;
  std::vector<SummaryRow> bayes_summary;
};

}  // namespace aggcorrect

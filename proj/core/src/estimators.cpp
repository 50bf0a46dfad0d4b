// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aggcorrect {

namespace {

// Linear interpolation between order statistics of pre-sorted data.
double quantile_sorted(const std::vector<double>& sorted, double prob) {
  const std::size_t n = sorted.size();
  if (n == 1) {
    return sorted.front();
  }
  const double h = prob * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) {
    return sorted.back();
  }
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

AggregateVector naive_estimate(std::span<const TargetRecord> records, int k) {
  return aggregate_by_predicted(records, k).first;
}

ContingencyMatrix plugin_contingency(const ConfusionCounts& counts) {
  const int k = counts.k();
  Matrix rows(k, k);
  for (int g = 0; g < k; ++g) {
    const double n_g = counts.row_total(g);
    if (n_g <= 0.0) {
      std::ostringstream msg;
      msg << "confusion row " << g << " has no observations";
      fail(ErrorKind::EmptyConfusionRow, msg.str());
    }
    for (int h = 0; h < k; ++h) {
      rows(g, h) = counts.cell(g, h) / n_g;
    }
  }
  return ContingencyMatrix::validated(std::move(rows));
}

AggregateVector baseline_estimate(const ContingencyMatrix& p_hat,
                                  const AggregateVector& u_hat) {
  if (u_hat.k() != p_hat.k()) {
    fail(ErrorKind::DimensionMismatch, "aggregate vector size must match K");
  }
  const CorrectionMatrix q = invert_transpose(p_hat);
  return AggregateVector{q.q * u_hat.sums};
}

CorrectedAggregateDistribution bayes_estimate(
    const PosteriorSpec& spec, const AggregateVector& u_hat,
    const std::optional<ConstraintRegion>& region, const SamplerConfig& cfg) {
  if (u_hat.k() != spec.k()) {
    fail(ErrorKind::DimensionMismatch, "aggregate vector size must match K");
  }
  PosteriorDraws draws = rejection_sample(spec, region, cfg);
  CorrectedAggregateDistribution dist;
  dist.samples.reserve(draws.draws.size());
  for (const ParameterDraw& draw : draws.draws) {
    // Accepted draws passed the (possibly unconstrained) singularity guard,
    // so inversion cannot fail here.
    const CorrectionMatrix q = invert_transpose(draw.p);
    dist.samples.push_back(q.q * u_hat.sums);
  }
  dist.accepted = draws.accepted;
  dist.attempted = draws.attempted;
  dist.acceptance_rate = draws.acceptance_rate;
  return dist;
}

std::vector<SummaryRow> summarize(const CorrectedAggregateDistribution& dist) {
  if (dist.samples.empty()) {
    fail(ErrorKind::EmptySamples, "cannot summarize an empty sample set");
  }
  const int k = dist.k();
  const std::size_t n = dist.samples.size();
  std::vector<SummaryRow> rows;
  rows.reserve(k);
  std::vector<double> component(n);
  for (int h = 0; h < k; ++h) {
    for (std::size_t i = 0; i < n; ++i) {
      component[i] = dist.samples[i](h);
    }
    double mean = 0.0;
    for (const double x : component) {
      mean += x;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const double x : component) {
      ss += (x - mean) * (x - mean);
    }
    const double sd =
        n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    std::sort(component.begin(), component.end());
    rows.push_back(SummaryRow{mean, sd, quantile_sorted(component, 0.025),
                              quantile_sorted(component, 0.25),
                              quantile_sorted(component, 0.50),
                              quantile_sorted(component, 0.75),
                              quantile_sorted(component, 0.975)});
  }
  return rows;
}

}  // namespace aggcorrect

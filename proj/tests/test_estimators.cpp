// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/estimators.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"

using namespace aggcorrect;

namespace {

ConfusionCounts counts2x2(double a, double b, double c, double d) {
  Matrix cells(2, 2);
  cells << a, b, c, d;
  return ConfusionCounts::validated(cells);
}

AggregateVector u_10_90() {
  Vector u(2);
  u << 10.0, 90.0;
  return AggregateVector{u};
}

ConstraintRegion region_10_90() {
  Vector v(2);
  v << 10.0, 90.0;
  return ConstraintRegion(CountsVector::validated(v));
}

// Observed error rates exactly (0.2, 0.4) on a test set of 10.
PosteriorSpec scenario_posterior() {
  return posterior_update(prior_jeffreys(2), counts2x2(4, 1, 2, 3));
}

}  // namespace

TEST_CASE("plug-in contingency normalizes confusion rows") {
  const ContingencyMatrix p = plugin_contingency(counts2x2(4, 1, 2, 3));
  CHECK(p(0, 0) == 0.8);
  CHECK(p(0, 1) == 0.2);
  CHECK(p(1, 0) == 0.4);
  CHECK(p(1, 1) == 0.6);
}

TEST_CASE("plug-in contingency rejects empty rows") {
  try {
    plugin_contingency(counts2x2(4, 1, 0, 0));
    FAIL("expected EmptyConfusionRow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyConfusionRow);
  }
}

TEST_CASE("baseline estimate reproduces the impermissible correction") {
  const AggregateVector corrected =
      baseline_estimate(ContingencyMatrix::binary(0.2, 0.4), u_10_90());
  CHECK(corrected.sums(0) == -75.0);
  CHECK(corrected.sums(1) == 175.0);
}

TEST_CASE("baseline with the identity plug-in is the naive estimate") {
  const AggregateVector corrected =
      baseline_estimate(ContingencyMatrix::identity(2), u_10_90());
  CHECK(corrected.sums(0) == 10.0);
  CHECK(corrected.sums(1) == 90.0);
}

TEST_CASE("baseline inverts an exact expectation") {
  const ContingencyMatrix p = ContingencyMatrix::binary(0.1, 0.03);
  Vector u(2);
  u << 2500.0, 7500.0;
  const AggregateVector u_hat =
      expected_naive_aggregate(p, AggregateVector{u});
  const AggregateVector recovered = baseline_estimate(p, u_hat);
  CHECK(recovered.sums(0) == doctest::Approx(2500.0).epsilon(1e-9));
  CHECK(recovered.sums(1) == doctest::Approx(7500.0).epsilon(1e-9));
}

TEST_CASE("baseline propagates singularity") {
  CHECK_THROWS_AS(
      baseline_estimate(ContingencyMatrix::binary(0.5, 0.5), u_10_90()),
      Error);
}

TEST_CASE("constrained bayes keeps counts non-negative and matches the "
          "quadrature mean") {
  SamplerConfig cfg;
  cfg.resolution = 20'000;
  cfg.max_total_attempts = 200'000'000;
  cfg.seed = 7;
  cfg.workers = 2;
  const CorrectedAggregateDistribution dist =
      bayes_estimate(scenario_posterior(), u_10_90(), region_10_90(), cfg);

  REQUIRE(dist.samples.size() == 20'000);
  double class0_min = 1e300;
  std::vector<double> class0(dist.samples.size());
  for (std::size_t i = 0; i < dist.samples.size(); ++i) {
    class0[i] = dist.samples[i](0);
    class0_min = std::min(class0_min, class0[i]);
  }
  CHECK(class0_min >= 0.0);

  // Independent deterministic quadrature over Theta_2 puts the posterior
  // mean of the class-0 corrected count at 4.9116.
  const auto stats = testsupport::stats_of(class0);
  CHECK(std::abs(stats.mean - 4.9116) <= 0.25);
  CHECK(stats.skewness > 0.0);
}

TEST_CASE("unconstrained bayes produces negative corrected counts") {
  SamplerConfig cfg;
  cfg.resolution = 20'000;
  cfg.seed = 7;
  const CorrectedAggregateDistribution dist =
      bayes_estimate(scenario_posterior(), u_10_90(), std::nullopt, cfg);
  int negatives = 0;
  for (const Vector& sample : dist.samples) {
    if (sample(0) < 0.0) {
      ++negatives;
    }
  }
  CHECK(negatives > 0);
}

TEST_CASE("a posterior concentrated at the identity degenerates to u_hat") {
  SamplerConfig cfg;
  cfg.resolution = 5000;
  cfg.seed = 11;
  for (const double scale : {1e4, 1e6}) {
    const PosteriorSpec spec =
        posterior_update(prior_jeffreys(2), counts2x2(scale, 0, 0, scale));
    const CorrectedAggregateDistribution dist =
        bayes_estimate(spec, u_10_90(), region_10_90(), cfg);
    const auto summary = summarize(dist);
    CHECK(std::abs(summary[0].mean - 10.0) <= 50.0 / std::sqrt(scale));
    CHECK(summary[0].sd <= 100.0 / std::sqrt(scale));
  }
}

TEST_CASE("scaling u_hat scales every sample exactly") {
  SamplerConfig cfg;
  cfg.resolution = 2000;
  cfg.seed = 13;
  const PosteriorSpec spec = scenario_posterior();
  const std::optional<ConstraintRegion> region(region_10_90());

  const auto base = bayes_estimate(spec, u_10_90(), region, cfg);
  Vector scaled_u = 4.0 * u_10_90().sums;  // power of two: exact in floats
  const auto scaled =
      bayes_estimate(spec, AggregateVector{scaled_u}, region, cfg);
  REQUIRE(base.samples.size() == scaled.samples.size());
  for (std::size_t i = 0; i < base.samples.size(); ++i) {
    CHECK(scaled.samples[i] == 4.0 * base.samples[i]);
  }

  const AggregateVector baseline_base =
      baseline_estimate(ContingencyMatrix::binary(0.2, 0.4), u_10_90());
  const AggregateVector baseline_scaled = baseline_estimate(
      ContingencyMatrix::binary(0.2, 0.4), AggregateVector{scaled_u});
  CHECK(baseline_scaled.sums == 4.0 * baseline_base.sums);
}

TEST_CASE("naive_estimate delegates to the aggregation") {
  const std::vector<TargetRecord> records = {{0, 2.0}, {1, 3.0}, {0, -1.0}};
  const AggregateVector naive = naive_estimate(records, 2);
  CHECK(naive.sums(0) == 1.0);
  CHECK(naive.sums(1) == 3.0);
}

TEST_CASE("summarize of constant samples has zero spread") {
  CorrectedAggregateDistribution dist;
  Vector sample(2);
  sample << 3.0, 5.0;
  for (int i = 0; i < 100; ++i) {
    dist.samples.push_back(sample);
  }
  const auto summary = summarize(dist);
  CHECK(summary[0].mean == 3.0);
  CHECK(summary[0].sd == 0.0);
  CHECK(summary[0].q2_5 == 3.0);
  CHECK(summary[0].q97_5 == 3.0);
  CHECK(summary[1].q50 == 5.0);
}

TEST_CASE("summarize of {1, 2, 3} per class") {
  CorrectedAggregateDistribution dist;
  for (const double x : {1.0, 2.0, 3.0}) {
    Vector sample(1);
    sample << x;
    dist.samples.push_back(sample);
  }
  const auto summary = summarize(dist);
  CHECK(summary[0].mean == 2.0);
  CHECK(summary[0].q50 == 2.0);
}

TEST_CASE("summarize rejects empty sample sets") {
  CorrectedAggregateDistribution dist;
  CHECK_THROWS_AS(summarize(dist), Error);
}

TEST_CASE("summary quantiles match an independent recomputation") {
  SamplerConfig cfg;
  cfg.resolution = 100'000;
  cfg.seed = 77;
  cfg.workers = 2;
  const CorrectedAggregateDistribution dist = bayes_estimate(
      scenario_posterior(), u_10_90(), region_10_90(), cfg);
  const auto summary = summarize(dist);

  std::vector<double> class0(dist.samples.size());
  for (std::size_t i = 0; i < dist.samples.size(); ++i) {
    class0[i] = dist.samples[i](0);
  }
  CHECK(summary[0].q2_5 ==
        doctest::Approx(testsupport::naive_quantile(class0, 0.025))
            .epsilon(1e-9));
  CHECK(summary[0].q25 ==
        doctest::Approx(testsupport::naive_quantile(class0, 0.25))
            .epsilon(1e-9));
  CHECK(summary[0].q50 ==
        doctest::Approx(testsupport::naive_quantile(class0, 0.5))
            .epsilon(1e-9));
  CHECK(summary[0].q75 ==
        doctest::Approx(testsupport::naive_quantile(class0, 0.75))
            .epsilon(1e-9));
  CHECK(summary[0].q97_5 ==
        doctest::Approx(testsupport::naive_quantile(class0, 0.975))
            .epsilon(1e-9));

  const auto stats = testsupport::stats_of(class0);
  CHECK(summary[0].mean == doctest::Approx(stats.mean).epsilon(1e-12));
  CHECK(summary[0].sd == doctest::Approx(stats.sd).epsilon(1e-9));
}

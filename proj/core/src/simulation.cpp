// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>
#include <utility>

namespace aggcorrect {

namespace {

constexpr std::uint64_t kTagPopulationY = 0x706f702d79000001ULL;
constexpr std::uint64_t kTagPopulationPred = 0x706f702d70000002ULL;
constexpr std::uint64_t kTagTestSet = 0x746573742d000003ULL;
constexpr std::uint64_t kTagSampler = 0x73616d702d000004ULL;

// Integer class counts matching beta * N, largest-remainder rounding.
std::vector<std::int64_t> apportion_counts(const Vector& beta,
                                           std::int64_t n) {
  const int k = static_cast<int>(beta.size());
  std::vector<std::int64_t> counts(k);
  std::vector<std::pair<double, int>> remainders(k);
  std::int64_t assigned = 0;
  for (int g = 0; g < k; ++g) {
    const double exact = beta(g) * static_cast<double>(n);
    counts[g] = static_cast<std::int64_t>(std::floor(exact));
    assigned += counts[g];
    remainders[g] = {exact - std::floor(exact), g};
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  for (std::int64_t i = 0; i < n - assigned; ++i) {
    ++counts[remainders[static_cast<std::size_t>(i) % remainders.size()]
                 .second];
  }
  return counts;
}

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::None: return "none";
    case Method::Baseline: return "baseline";
    case Method::BayesUniform: return "bayes-uniform";
    case Method::BayesJeffreys: return "bayes-jeffreys";
    case Method::BayesUniformConstrained: return "bayes-uniform-constrained";
    case Method::BayesJeffreysConstrained:
      return "bayes-jeffreys-constrained";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  for (const Method m :
       {Method::None, Method::Baseline, Method::BayesUniform,
        Method::BayesJeffreys, Method::BayesUniformConstrained,
        Method::BayesJeffreysConstrained}) {
    if (to_string(m) == name) {
      return m;
    }
  }
  fail(ErrorKind::InvalidConfig, "unknown method '" + name + "'");
}

PopulationSpec::PopulationSpec(std::int64_t n, Vector beta, YModel y_model,
                               ContingencyMatrix p, std::uint64_t seed)
    : n_(n),
      beta_(std::move(beta)),
      y_model_(std::move(y_model)),
      p_(std::move(p)),
      seed_(seed) {
  if (n_ < 1) {
    fail(ErrorKind::InvalidArgument, "population size must be >= 1");
  }
  if (beta_.size() != p_.k()) {
    fail(ErrorKind::DimensionMismatch, "base rates must have K entries");
  }
  if (!(beta_.array() >= 0.0).all() ||
      std::abs(beta_.sum() - 1.0) > kRowSumTolerance) {
    fail(ErrorKind::InvalidArgument, "base rates must lie on the simplex");
  }
  if (y_model_.kind == YModel::Kind::Empirical &&
      y_model_.empirical_values.empty()) {
    fail(ErrorKind::InvalidConfig, "empirical y model has no values");
  }
}

std::vector<int> simulate_predictions(std::span<const int> true_classes,
                                      const ContingencyMatrix& p,
                                      RngStream& rng) {
  const int k = p.k();
  std::vector<int> predicted(true_classes.size());
  for (std::size_t i = 0; i < true_classes.size(); ++i) {
    const int s = true_classes[i];
    if (s < 0 || s >= k) {
      fail(ErrorKind::IndexOutOfRange, "true class outside [0, K)");
    }
    predicted[i] = rng.categorical(p.matrix().row(s).transpose());
  }
  return predicted;
}

Population build_population(const PopulationSpec& spec) {
  const int k = spec.k();
  const auto counts = apportion_counts(spec.beta(), spec.n());
  Population pop;
  pop.true_classes.reserve(static_cast<std::size_t>(spec.n()));
  for (int g = 0; g < k; ++g) {
    pop.true_classes.insert(pop.true_classes.end(),
                            static_cast<std::size_t>(counts[g]), g);
  }

  pop.y.resize(static_cast<std::size_t>(spec.n()));
  RngStream rng(derive_seed(spec.seed(), {kTagPopulationY}));
  switch (spec.y_model().kind) {
    case YModel::Kind::Constant:
      std::fill(pop.y.begin(), pop.y.end(), 1.0);
      break;
    case YModel::Kind::Lognormal:
      for (double& y : pop.y) {
        y = std::exp(spec.y_model().mu + spec.y_model().sigma * rng.normal());
      }
      break;
    case YModel::Kind::Empirical: {
      const auto& values = spec.y_model().empirical_values;
      for (double& y : pop.y) {
        y = values[rng.uniform_below(values.size())];
      }
      break;
    }
  }

  pop.true_aggregate = Vector::Zero(k);
  pop.true_counts = Vector::Zero(k);
  for (std::size_t i = 0; i < pop.true_classes.size(); ++i) {
    pop.true_aggregate(pop.true_classes[i]) += pop.y[i];
    pop.true_counts(pop.true_classes[i]) += 1.0;
  }
  return pop;
}

Matrix base_rate_covariance(const ContingencyMatrix& p, const Vector& beta,
                            std::int64_t n) {
  if (beta.size() != p.k()) {
    fail(ErrorKind::DimensionMismatch, "base rates must have K entries");
  }
  if (n < 1) {
    fail(ErrorKind::InvalidArgument, "population size must be >= 1");
  }
  const Matrix pt = p.matrix().transpose();
  const Matrix cov =
      (Vector(pt * beta).asDiagonal().toDenseMatrix() -
       pt * beta.asDiagonal() * p.matrix()) /
      static_cast<double>(n);
  return cov;
}

namespace {

struct ReplicationEstimates {
  // estimate[method_index][test_size_index]; NaN marks an excluded run.
  std::vector<std::vector<double>> estimate;
};

ReplicationEstimates run_replication(const ExperimentSpec& spec,
                                     const Population& pop, int replication) {
  const auto& population = spec.population;
  const int k = population.k();
  const auto nan = std::numeric_limits<double>::quiet_NaN();

  ReplicationEstimates result;
  result.estimate.assign(spec.methods.size(),
                         std::vector<double>(spec.test_sizes.size(), nan));

  // Population predictions depend on the replication only, not on the test
  // size, which keeps the "None" method exactly constant across n.
  RngStream pop_rng(derive_seed(
      population.seed(),
      {kTagPopulationPred, static_cast<std::uint64_t>(replication)}));
  const std::vector<int> predicted =
      simulate_predictions(pop.true_classes, population.p(), pop_rng);

  Vector u_hat = Vector::Zero(k);
  Vector v_hat = Vector::Zero(k);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    u_hat(predicted[i]) += pop.y[i];
    v_hat(predicted[i]) += 1.0;
  }
  const AggregateVector u_hat_agg{u_hat};
  const ConstraintRegion region(CountsVector::validated(v_hat));

  for (std::size_t ni = 0; ni < spec.test_sizes.size(); ++ni) {
    const int n_test = spec.test_sizes[ni];
    RngStream test_rng(derive_seed(population.seed(),
                                   {kTagTestSet,
                                    static_cast<std::uint64_t>(n_test),
                                    static_cast<std::uint64_t>(replication)}));
    std::vector<LabeledPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n_test));
    for (int j = 0; j < n_test; ++j) {
      const int g = test_rng.categorical(population.beta());
      const int h =
          test_rng.categorical(population.p().matrix().row(g).transpose());
      pairs.push_back(LabeledPair{g, h});
    }
    const ConfusionCounts counts = confusion_from_pairs(pairs, k);

    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      const Method method = spec.methods[mi];
      try {
        double estimate = nan;
        switch (method) {
          case Method::None:
            estimate = u_hat(spec.target_class);
            break;
          case Method::Baseline: {
            const auto corrected =
                baseline_estimate(plugin_contingency(counts), u_hat_agg);
            estimate = corrected.sums(spec.target_class);
            break;
          }
          default: {
            const bool jeffreys = method == Method::BayesJeffreys ||
                                  method == Method::BayesJeffreysConstrained;
            const bool constrained =
                method == Method::BayesUniformConstrained ||
                method == Method::BayesJeffreysConstrained;
            const PosteriorSpec posterior = posterior_update(
                jeffreys ? prior_jeffreys(k) : prior_uniform(k), counts);
            SamplerConfig cfg = SamplerConfig::with_attempts_factor(
                spec.resolution, spec.max_attempts_factor,
                derive_seed(population.seed(),
                            {kTagSampler, static_cast<std::uint64_t>(mi),
                             static_cast<std::uint64_t>(n_test),
                             static_cast<std::uint64_t>(replication)}),
                1);
            const auto dist = bayes_estimate(
                posterior, u_hat_agg,
                constrained ? std::optional<ConstraintRegion>(region)
                            : std::nullopt,
                cfg);
            double sum = 0.0;
            for (const Vector& sample : dist.samples) {
              sum += sample(spec.target_class);
            }
            estimate = sum / static_cast<double>(dist.samples.size());
            break;
          }
        }
        result.estimate[mi][ni] = estimate;
      } catch (const Error&) {
        // Starved samplers and degenerate plug-ins are excluded from the
        // scores; run_experiment reports the exclusion counts.
      }
    }
  }
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.replications < 1) {
    fail(ErrorKind::InvalidConfig, "replications must be >= 1");
  }
  if (spec.test_sizes.empty() || spec.methods.empty()) {
    fail(ErrorKind::InvalidConfig,
         "experiment needs at least one test size and one method");
  }
  for (const int n_test : spec.test_sizes) {
    if (n_test < 1 || n_test > spec.population.n()) {
      fail(ErrorKind::InvalidConfig,
           "test sizes must lie in [1, population size]");
    }
  }
  if (spec.target_class < 0 || spec.target_class >= spec.population.k()) {
    fail(ErrorKind::InvalidConfig, "target class outside [0, K)");
  }

  const Population pop = build_population(spec.population);
  const double truth = pop.true_aggregate(spec.target_class);

  std::vector<ReplicationEstimates> replications(
      static_cast<std::size_t>(spec.replications));
  const unsigned threads = std::max(1u, spec.workers);
  if (threads <= 1) {
    for (int r = 0; r < spec.replications; ++r) {
      replications[static_cast<std::size_t>(r)] =
          run_replication(spec, pop, r);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        try {
          for (int r = next.fetch_add(1); r < spec.replications;
               r = next.fetch_add(1)) {
            replications[static_cast<std::size_t>(r)] =
                run_replication(spec, pop, r);
          }
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) {
      th.join();
    }
    if (first_error) {
      std::rethrow_exception(first_error);
    }
  }

  ExperimentResult result;
  result.true_aggregate = truth;
  result.target_class = spec.target_class;
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    for (std::size_t ni = 0; ni < spec.test_sizes.size(); ++ni) {
      std::vector<double> estimates;
      estimates.reserve(replications.size());
      int excluded = 0;
      for (const auto& rep : replications) {
        const double e = rep.estimate[mi][ni];
        if (std::isnan(e)) {
          ++excluded;
        } else {
          estimates.push_back(e);
        }
      }
      MethodScore score;
      score.method = spec.methods[mi];
      score.test_size = spec.test_sizes[ni];
      score.excluded = excluded;
      score.replications_used = static_cast<int>(estimates.size());
      if (!estimates.empty()) {
        const double mean = mean_of(estimates);
        double variance = 0.0;
        double mse = 0.0;
        for (const double e : estimates) {
          variance += (e - mean) * (e - mean);
          mse += (e - truth) * (e - truth);
        }
        // Population (1/B) normalization keeps mse == bias^2 + variance
        // exactly on the same replicate set.
        variance /= static_cast<double>(estimates.size());
        mse /= static_cast<double>(estimates.size());
        score.bias = mean - truth;
        score.variance = variance;
        score.mse = mse;
      }
      result.scores.push_back(score);
    }
  }
  return result;
}

EstimatorReport peculiar_example(std::uint64_t resolution, std::uint64_t seed,
                                 unsigned workers) {
  // Predicted counts (10, 90) over N = 100 with y = 1: u-hat = v-hat.
  Vector v_hat(2);
  v_hat << 10.0, 90.0;
  const AggregateVector u_hat{v_hat};

  // Test set of 10 with observed error rates exactly (p, q) = (0.2, 0.4):
  // 5 true positives predicted (4, 1), 5 true negatives predicted (2, 3).
  Matrix cells(2, 2);
  cells << 4.0, 1.0, 2.0, 3.0;
  const ConfusionCounts counts = ConfusionCounts::validated(cells);
  const ContingencyMatrix p_hat = plugin_contingency(counts);

  EstimatorReport report;
  report.class_labels = {"webshop", "other"};
  report.prior_name = "jeffreys";
  report.constraints_enabled = true;
  report.resolution = resolution;
  report.seed = seed;
  report.workers = workers;
  report.test_set_size = static_cast<std::uint64_t>(counts.total());
  report.record_count = 100;
  report.confusion = counts.cells();
  report.naive = u_hat;
  report.v_hat = v_hat;

  report.baseline = baseline_estimate(p_hat, u_hat);
  report.baseline_negative = (report.baseline->sums.array() < 0.0).any();

  const PosteriorSpec posterior = posterior_update(prior_jeffreys(2), counts);
  const ConstraintRegion region(CountsVector::validated(v_hat));
  SamplerConfig cfg = SamplerConfig::with_attempts_factor(resolution, 10'000,
                                                          seed, workers);
  report.bayes = bayes_estimate(posterior, u_hat, region, cfg);
  report.bayes_summary = summarize(report.bayes);
  return report;
}

}  // namespace aggcorrect

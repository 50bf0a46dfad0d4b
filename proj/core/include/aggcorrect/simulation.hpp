// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aggcorrect/estimators.hpp"

namespace aggcorrect {

/// Estimation methods compared by the bootstrap experiment.
enum class Method {
  None,
  Baseline,
  BayesUniform,
  BayesJeffreys,
  BayesUniformConstrained,
  BayesJeffreysConstrained,
};

std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// Distribution of the y variable attached to population objects.
struct YModel {
  enum class Kind { Constant, Lognormal, Empirical };
  Kind kind = Kind::Constant;
  double mu = 11.0;
  double sigma = 2.0;
  std::vector<double> empirical_values;
};

/** A synthetic population for the classification error model: N objects with
 * fixed true classes (matching the base rates) and fixed y values; only the
 * predictions are stochastic.
 */
class PopulationSpec {
 public:
  PopulationSpec(std::int64_t n, Vector beta, YModel y_model,
                 ContingencyMatrix p, std::uint64_t seed);

  std::int64_t n() const { return n_; }
  const Vector& beta() const { return beta_; }
  const YModel& y_model() const { return y_model_; }
  const ContingencyMatrix& p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  int k() const { return p_.k(); }

 private:
  std::int64_t n_;
  Vector beta_;
  YModel y_model_;
  ContingencyMatrix p_;
  std::uint64_t seed_;
};

struct ExperimentSpec {
  PopulationSpec population;
  std::vector<int> test_sizes;
  std::vector<Method> methods;
  int replications = 1;
  std::uint64_t resolution = 10'000;
  std::uint64_t max_attempts_factor = 10'000;
  unsigned workers = 1;
  /// Class whose aggregate is scored (0 = the positive class).
  int target_class = 0;
};

struct MethodScore {
  Method method;
  int test_size;
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  int replications_used = 0;
  int excluded = 0;
};

struct ExperimentResult {
  std::vector<MethodScore> scores;
  double true_aggregate = 0.0;
  int target_class = 0;
};

/// Draws predictions: s-hat_i ~ categorical(row s_i of P), independently.
std::vector<int> simulate_predictions(std::span<const int> true_classes,
                                      const ContingencyMatrix& p,
                                      RngStream& rng);

/// Materialized population: true classes (block-assigned to match the base
/// rates by largest remainder) and y values drawn once from the y model.
struct Population {
  std::vector<int> true_classes;
  std::vector<double> y;
  Vector true_aggregate;  // u
  Vector true_counts;     // v
};

Population build_population(const PopulationSpec& spec);

/// Var(beta-hat | s) = (1/N) (diag(P^T beta) - P^T diag(beta) P).
/// Symmetric; rows and columns sum to zero.
Matrix base_rate_covariance(const ContingencyMatrix& p, const Vector& beta,
                            std::int64_t n);

/** Bootstrap comparison of the estimation methods: per replication redraw
 * the population predictions and a fresh test set, run every method, then
 * score bias / variance / MSE of the target-class aggregate across
 * replications.
 *
 * Population predictions depend only on (seed, replication), so the "None"
 * scores are exactly identical across test sizes. Replications failing with
 * ConstraintStarvation (or a degenerate plug-in) are excluded from that
 * method's score and counted.
 */
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// The built-in small-test-set scenario: v-hat = (10, 90), confusion counts
/// [[4, 2], [1, 2]], error rates (0.2, 0.4), Jeffreys prior, constraints on.
EstimatorReport peculiar_example(std::uint64_t resolution = 100'000,
                                 std::uint64_t seed = 42,
                                 unsigned workers = 1);

}  // namespace aggcorrect

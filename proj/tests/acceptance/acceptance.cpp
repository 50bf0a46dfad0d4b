// Apache License, Version 2.0, refer to LICENSE.txt
//
// Acceptance suite: one check per shipped guarantee, each printing a single
// PASS/FAIL line. Run all with no arguments or a single criterion by number.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "aggcorrect/constraints.hpp"
#include "aggcorrect/estimators.hpp"
#include "aggcorrect/inference.hpp"
#include "aggcorrect/io.hpp"
#include "aggcorrect/report.hpp"
#include "aggcorrect/sampling.hpp"
#include "aggcorrect/simulation.hpp"
#include "support/oracles.hpp"

#ifndef AGGCORRECT_CONFIG_DIR
#define AGGCORRECT_CONFIG_DIR "configs"
#endif

using namespace aggcorrect;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// 1. Expected naive aggregate of the base-rate scenario, exactly.
Outcome criterion_1() {
  const ContingencyMatrix p = ContingencyMatrix::binary(0.01, 0.005);
  const AggregateVector u{vec2(10'000.0, 90'000.0)};
  const auto start = std::chrono::steady_clock::now();
  const AggregateVector expected = expected_naive_aggregate(p, u);
  const double elapsed = seconds_since(start);

  const bool exact =
      expected.sums(0) == 10'350.0 && expected.sums(1) == 89'650.0;
  std::ostringstream detail;
  detail << "E[u_hat] = (" << expected.sums(0) << ", " << expected.sums(1)
         << "), relative bias +" << (expected.sums(0) - 10'000.0) / 10'000.0
         << ", " << elapsed * 1e6 << " us";
  return {exact && elapsed < 1e-3, detail.str()};
}

// 2. Baseline correction of the small-test-set scenario, exactly.
Outcome criterion_2() {
  const ContingencyMatrix p_hat = ContingencyMatrix::binary(0.2, 0.4);
  const AggregateVector u_hat{vec2(10.0, 90.0)};
  const auto start = std::chrono::steady_clock::now();
  const AggregateVector corrected = baseline_estimate(p_hat, u_hat);
  const double elapsed = seconds_since(start);

  const bool exact = corrected.sums(0) == -75.0 && corrected.sums(1) == 175.0;
  std::ostringstream detail;
  detail << "baseline = (" << corrected.sums(0) << ", " << corrected.sums(1)
         << "), " << elapsed * 1e6 << " us";
  return {exact && elapsed < 1e-3, detail.str()};
}

// 3. Constrained Bayes on the built-in scenario at R = 1e5.
Outcome criterion_3() {
  const auto start = std::chrono::steady_clock::now();
  const EstimatorReport report = peculiar_example(100'000, 42, 2);
  const double elapsed = seconds_since(start);

  std::vector<double> class0;
  class0.reserve(report.bayes.samples.size());
  int negatives = 0;
  for (const Vector& sample : report.bayes.samples) {
    class0.push_back(sample(0));
    negatives += (sample(0) < 0.0);
  }
  const auto stats = testsupport::stats_of(class0);

  const bool mean_ok = stats.mean >= 4.0 && stats.mean <= 6.0;
  const bool skew_ok = stats.skewness > 0.0;
  const bool no_negatives = negatives == 0;
  const bool fast = elapsed < 5.0;
  std::ostringstream detail;
  detail << "posterior mean = " << stats.mean << " (target [4, 6]), skewness "
         << stats.skewness << ", negatives " << negatives << ", " << elapsed
         << " s";
  return {mean_ok && skew_ok && no_negatives && fast, detail.str()};
}

// 4. Jeffreys prior: proportional to exp(fim_log_det / 2) and, for K = 2,
// equal to the closed-form (p, q) density.
Outcome criterion_4() {
  const auto start = std::chrono::steady_clock::now();
  double worst_spread = 0.0;
  RngStream rng(99);
  for (const int k : {2, 3}) {
    const DirichletProduct prior = prior_jeffreys(k);
    double reference = 0.0;
    for (int i = 0; i < 20; ++i) {
      Matrix rows(k, k);
      for (int g = 0; g < k; ++g) {
        rows.row(g) = rng.dirichlet(Vector::Constant(k, 2.0)).transpose();
      }
      const ContingencyMatrix p = ContingencyMatrix::validated(rows);
      const Vector beta = rng.dirichlet(Vector::Constant(k, 2.0));
      const double log_ratio =
          log_density(prior, p, beta) - 0.5 * fim_log_det(p, beta);
      if (i == 0) {
        reference = log_ratio;
      }
      worst_spread = std::max(worst_spread, std::abs(log_ratio - reference));
    }
  }

  double worst_marginal = 0.0;
  const DirichletProduct prior2 = prior_jeffreys(2);
  for (int i = 0; i < 20; ++i) {
    const double p = 0.02 + 0.96 * rng.uniform01();
    const double q = 0.02 + 0.96 * rng.uniform01();
    const double density =
        std::exp(log_density_rows(prior2, ContingencyMatrix::binary(p, q)));
    const double closed_form =
        1.0 / (M_PI * M_PI * std::sqrt(p * (1 - p) * q * (1 - q)));
    worst_marginal =
        std::max(worst_marginal, std::abs(density - closed_form) / closed_form);
  }
  const double elapsed = seconds_since(start);

  std::ostringstream detail;
  detail << "log-ratio spread " << worst_spread << ", binary marginal rel err "
         << worst_marginal << ", " << elapsed << " s";
  return {worst_spread <= 1e-8 && worst_marginal <= 1e-8 && elapsed < 1.0,
          detail.str()};
}

// 5. Monte Carlo Fisher information vs the closed-form log determinant.
Outcome criterion_5() {
  const auto start = std::chrono::steady_clock::now();
  const double p = 0.3;
  const double q = 0.1;
  const double beta1 = 0.1;
  const ContingencyMatrix matrix = ContingencyMatrix::binary(p, q);
  const Vector beta = vec2(beta1, 1.0 - beta1);

  const int observations = 1'000'000;
  RngStream rng(515);
  std::vector<Eigen::Vector3d> scores;
  scores.reserve(observations);
  for (int i = 0; i < observations; ++i) {
    const int g = rng.categorical(beta);
    const int h = rng.categorical(matrix.matrix().row(g).transpose());
    Eigen::Vector3d score = Eigen::Vector3d::Zero();
    if (g == 0) {
      score(0) = (h == 1) ? 1.0 / p : -1.0 / (1.0 - p);
      score(2) = 1.0 / beta1;
    } else {
      score(1) = (h == 0) ? 1.0 / q : -1.0 / (1.0 - q);
      score(2) = -1.0 / (1.0 - beta1);
    }
    scores.push_back(score);
  }
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& s : scores) {
    mean += s;
  }
  mean /= static_cast<double>(observations);
  Eigen::Matrix3d fim = Eigen::Matrix3d::Zero();
  for (const auto& s : scores) {
    const Eigen::Vector3d centered = s - mean;
    fim += centered * centered.transpose();
  }
  fim /= static_cast<double>(observations);

  const double mc_log_det = std::log(fim.determinant());
  const double analytic = fim_log_det(matrix, beta);
  const double rel = std::abs(mc_log_det - analytic) / std::abs(analytic);
  const double elapsed = seconds_since(start);

  std::ostringstream detail;
  detail << "log det: MC " << mc_log_det << " vs analytic " << analytic
         << ", rel diff " << rel << ", " << elapsed << " s";
  return {rel <= 0.05 && elapsed < 30.0, detail.str()};
}

// Shared helper for criterion 6: empirical covariance of the predicted base
// rates with a per-entry Monte Carlo standard error.
bool covariance_matches(const ContingencyMatrix& p, const Vector& counts,
                        std::uint64_t seed, std::string* detail) {
  const int k = p.k();
  const auto n = static_cast<std::int64_t>(counts.sum());
  std::vector<int> truth;
  for (int g = 0; g < k; ++g) {
    truth.insert(truth.end(), static_cast<std::size_t>(counts(g)), g);
  }
  const Vector beta = counts / static_cast<double>(n);
  const Matrix analytic = base_rate_covariance(p, beta, n);

  const int replications = 100'000;
  RngStream rng(seed);
  Matrix rates(replications, k);
  std::vector<int> tally(static_cast<std::size_t>(k));
  for (int r = 0; r < replications; ++r) {
    std::fill(tally.begin(), tally.end(), 0);
    for (const int s : truth) {
      ++tally[static_cast<std::size_t>(
          rng.categorical(p.matrix().row(s).transpose()))];
    }
    for (int h = 0; h < k; ++h) {
      rates(r, h) = static_cast<double>(tally[static_cast<std::size_t>(h)]) /
                    static_cast<double>(n);
    }
  }
  const Eigen::RowVectorXd means = rates.colwise().mean();

  double worst_sigma = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      double cov = 0.0;
      double second = 0.0;
      for (int r = 0; r < replications; ++r) {
        const double product =
            (rates(r, a) - means(a)) * (rates(r, b) - means(b));
        cov += product;
        second += product * product;
      }
      cov /= replications - 1;
      second /= replications;
      const double se =
          std::sqrt(std::max(second - cov * cov, 0.0) / replications);
      const double sigma = se > 0.0 ? std::abs(cov - analytic(a, b)) / se
                                    : std::abs(cov - analytic(a, b));
      worst_sigma = std::max(worst_sigma, sigma);
    }
  }
  std::ostringstream out;
  out << "K=" << k << " worst deviation " << worst_sigma << " se";
  *detail += (detail->empty() ? "" : "; ") + out.str();
  return worst_sigma <= 3.0;
}

// 6. The base-rate covariance formula against simulation.
Outcome criterion_6() {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  const bool binary_ok = covariance_matches(
      ContingencyMatrix::binary(0.3, 0.1), vec2(100.0, 900.0), 66, &detail);

  // One K = 3 instance drawn once from a fixed stream.
  RngStream rng(67);
  Matrix rows(3, 3);
  for (int g = 0; g < 3; ++g) {
    rows.row(g) = rng.dirichlet(Vector::Constant(3, 4.0)).transpose();
  }
  Vector counts(3);
  counts << 120.0, 180.0, 300.0;
  const bool ternary_ok = covariance_matches(
      ContingencyMatrix::validated(rows), counts, 68, &detail);

  const double elapsed = seconds_since(start);
  std::ostringstream out;
  out << detail << ", " << elapsed << " s";
  return {binary_ok && ternary_ok && elapsed < 60.0, out.str()};
}

// 7. Constraint equivalences: closed form and convex hull vs the general
// predicate.
Outcome criterion_7() {
  const auto start = std::chrono::steady_clock::now();
  RngStream rng(11);
  int binary_disagreements = 0;
  int binary_tested = 0;
  while (binary_tested < 10'000) {
    const double p = rng.uniform01();
    const double q = rng.uniform01();
    if (std::abs(p + q - 1.0) < 1e-6) {
      continue;
    }
    const double beta1 = rng.uniform01();
    const ConstraintRegion region(CountsVector::validated(
        vec2(beta1 * 1000.0, (1.0 - beta1) * 1000.0)));
    const ContingencyMatrix matrix = ContingencyMatrix::binary(p, q);
    ++binary_tested;
    if (contains(region, matrix) !=
        contains_binary_closed_form(region, p, q)) {
      ++binary_disagreements;
    }
  }

  int hull_disagreements = 0;
  int hull_tested = 0;
  while (hull_tested < 1000) {
    Matrix rows(3, 3);
    for (int g = 0; g < 3; ++g) {
      rows.row(g) = rng.dirichlet(Vector::Constant(3, 1.0)).transpose();
    }
    const ContingencyMatrix p = ContingencyMatrix::validated(rows);
    const auto inverted = try_invert_transpose(p);
    if (!inverted || inverted->condition_number >= 1e8) {
      continue;
    }
    Vector v = rng.dirichlet(Vector::Constant(3, 1.0)) * 500.0;
    const ConstraintRegion region(CountsVector::validated(v));
    ++hull_tested;
    if (contains(region, p) != convex_hull_membership(region, p)) {
      ++hull_disagreements;
    }
  }
  const double elapsed = seconds_since(start);

  std::ostringstream detail;
  detail << binary_disagreements << "/" << binary_tested
         << " binary disagreements, " << hull_disagreements << "/"
         << hull_tested << " hull disagreements, " << elapsed << " s";
  return {binary_disagreements == 0 && hull_disagreements == 0 &&
              elapsed < 30.0,
          detail.str()};
}

// 8. Posterior-mean convergence across growing test sets.
Outcome criterion_8() {
  const auto start = std::chrono::steady_clock::now();
  const ContingencyMatrix truth = ContingencyMatrix::binary(0.3, 0.1);
  const Vector beta = vec2(0.1, 0.9);

  std::vector<double> medians;
  for (const int n : {50, 500, 2000}) {
    std::vector<double> errors;
    for (int rep = 0; rep < 200; ++rep) {
      RngStream rng(derive_seed(808, {static_cast<std::uint64_t>(n),
                                      static_cast<std::uint64_t>(rep)}));
      Matrix cells = Matrix::Zero(2, 2);
      for (int j = 0; j < n; ++j) {
        const int g = rng.categorical(beta);
        const int h = rng.categorical(truth.matrix().row(g).transpose());
        cells(g, h) += 1.0;
      }
      const PosteriorSpec spec = posterior_update(
          prior_jeffreys(2), ConfusionCounts::validated(cells));
      errors.push_back(std::abs(posterior_mean(spec).first.binary_p() - 0.3));
    }
    std::nth_element(errors.begin(), errors.begin() + 100, errors.end());
    medians.push_back(errors[100]);
  }
  const double elapsed = seconds_since(start);

  std::ostringstream detail;
  detail << "median |error| = " << medians[0] << " -> " << medians[1] << " -> "
         << medians[2] << ", " << elapsed << " s";
  return {medians[1] < medians[0] && medians[2] < medians[1] &&
              elapsed < 300.0,
          detail.str()};
}

double score_of(const ExperimentResult& result, Method method, int n,
                double MethodScore::* field) {
  for (const MethodScore& score : result.scores) {
    if (score.method == method && score.test_size == n) {
      return score.*field;
    }
  }
  throw std::runtime_error("missing score");
}

// 9. Bootstrap comparison on the synthetic surrogate population, for both
// the counting aggregate and the heavy-tailed one.
Outcome criterion_9() {
  const auto start = std::chrono::steady_clock::now();
  bool all_ok = true;
  std::string detail;
  for (const std::string config_name :
       {"table1_surrogate.toml", "table1_surrogate_turnover.toml"}) {
    const auto doc = ConfigDocument::parse_file(
        std::string(AGGCORRECT_CONFIG_DIR) + "/" + config_name);
    const ExperimentSpec spec = experiment_from_config(doc);
    const ExperimentResult result = run_experiment(spec);

    const std::vector<Method> corrected = {
        Method::Baseline, Method::BayesUniform, Method::BayesJeffreys,
        Method::BayesUniformConstrained, Method::BayesJeffreysConstrained};

    // (a) the uncorrected bias dominates every corrected bias at n = 2000.
    const double none_bias =
        std::abs(score_of(result, Method::None, 2000, &MethodScore::bias));
    double worst_corrected_bias = 0.0;
    for (const Method m : corrected) {
      worst_corrected_bias =
          std::max(worst_corrected_bias,
                   std::abs(score_of(result, m, 2000, &MethodScore::bias)));
    }
    const bool bias_ok = none_bias >= 10.0 * worst_corrected_bias;

    // (b) at n = 2000 all corrected methods have comparable MSE.
    double mse_min = 1e300;
    double mse_max = 0.0;
    for (const Method m : corrected) {
      const double mse = score_of(result, m, 2000, &MethodScore::mse);
      mse_min = std::min(mse_min, mse);
      mse_max = std::max(mse_max, mse);
    }
    const bool mse_close = mse_max <= 1.15 * mse_min;

    // (c) at n = 50 the constraints reduce MSE for both priors.
    const bool constrained_better =
        score_of(result, Method::BayesUniformConstrained, 50,
                 &MethodScore::mse) <
            score_of(result, Method::BayesUniform, 50, &MethodScore::mse) &&
        score_of(result, Method::BayesJeffreysConstrained, 50,
                 &MethodScore::mse) <
            score_of(result, Method::BayesJeffreys, 50, &MethodScore::mse);

    // (d) the uncorrected method scores identically across test sizes.
    const bool none_constant =
        score_of(result, Method::None, 50, &MethodScore::bias) ==
            score_of(result, Method::None, 2000, &MethodScore::bias) &&
        score_of(result, Method::None, 50, &MethodScore::mse) ==
            score_of(result, Method::None, 2000, &MethodScore::mse);

    all_ok =
        all_ok && bias_ok && mse_close && constrained_better && none_constant;
    std::ostringstream out;
    out << (detail.empty() ? "" : "; ") << config_name << ": bias ratio "
        << none_bias / std::max(worst_corrected_bias, 1e-300) << " (>=10 "
        << (bias_ok ? "ok" : "FAIL") << "), corrected MSE spread "
        << mse_max / mse_min << " (<=1.15 " << (mse_close ? "ok" : "FAIL")
        << "), constrained MSE lower at n=50 "
        << (constrained_better ? "ok" : "FAIL") << ", none constant "
        << (none_constant ? "ok" : "FAIL");
    detail += out.str();
  }
  const double elapsed = seconds_since(start);
  std::ostringstream out;
  out << detail << ", " << elapsed << " s";
  return {all_ok && elapsed < 900.0, out.str()};
}

// 10. Accepted draws are distributed as the truncated posterior.
Outcome criterion_10() {
  const auto start = std::chrono::steady_clock::now();
  Matrix cells(2, 2);
  cells << 4.0, 1.0, 2.0, 3.0;
  const PosteriorSpec spec =
      posterior_update(prior_jeffreys(2), ConfusionCounts::validated(cells));
  const ConstraintRegion region(CountsVector::validated(vec2(10.0, 90.0)));

  SamplerConfig cfg;
  cfg.resolution = 100'000;
  cfg.max_total_attempts = 1'000'000'000;
  cfg.seed = 1001;
  cfg.workers = 2;
  const PosteriorDraws constrained = rejection_sample(spec, region, cfg);
  cfg.seed = 1002;
  const PosteriorDraws unconstrained = rejection_sample(spec, std::nullopt, cfg);

  const auto cell_of = [](const ParameterDraw& draw) {
    const int i = std::min(9, static_cast<int>(draw.p(0, 1) * 10.0));
    const int j = std::min(9, static_cast<int>(draw.p(1, 0) * 10.0));
    return i * 10 + j;
  };
  std::vector<double> constrained_counts(100, 0.0);
  std::vector<double> restricted_counts(100, 0.0);
  for (const auto& draw : constrained.draws) {
    constrained_counts[cell_of(draw)] += 1.0;
  }
  for (const auto& draw : unconstrained.draws) {
    if (contains(region, draw.p)) {
      restricted_counts[cell_of(draw)] += 1.0;
    }
  }
  std::vector<double> observed_a;
  std::vector<double> observed_b;
  for (int cell = 0; cell < 100; ++cell) {
    const double p_mid = (cell / 10 + 0.5) / 10.0;
    const double q_mid = (cell % 10 + 0.5) / 10.0;
    if (contains_binary_closed_form(region, p_mid, q_mid)) {
      observed_a.push_back(constrained_counts[cell]);
      observed_b.push_back(restricted_counts[cell]);
    }
  }
  const double p_value =
      testsupport::two_sample_chi2_pvalue(observed_a, observed_b);
  const double elapsed = seconds_since(start);

  std::ostringstream detail;
  detail << "chi-square p = " << p_value << " over " << observed_a.size()
         << " region cells, " << elapsed << " s";
  return {p_value > 0.001 && elapsed < 30.0, detail.str()};
}

// 11. Byte-identical reports from identical runs, modulo the timestamp.
Outcome criterion_11() {
  const auto start = std::chrono::steady_clock::now();
  testsupport::TempDir dir;
  std::string pairs =
      "true,predicted\n"
      "webshop,webshop\nwebshop,webshop\nwebshop,webshop\nwebshop,webshop\n"
      "webshop,other\nother,webshop\nother,webshop\nother,other\n"
      "other,other\nother,other\n";
  std::ostringstream records;
  records << "predicted,y\n";
  for (int i = 0; i < 10; ++i) {
    records << "webshop,1\n";
  }
  for (int i = 0; i < 90; ++i) {
    records << "other,1\n";
  }
  const std::string pairs_path = dir.write("pairs.csv", pairs);
  const std::string records_path = dir.write("records.csv", records.str());
  const std::string classes_path = dir.write("classes.txt", "webshop\nother\n");

  const auto strip_timestamp = [](const std::string& text) {
    std::string out;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
      if (line.find("generated_at") == std::string::npos) {
        out += line;
        out += '\n';
      }
    }
    return out;
  };

  std::string first;
  std::string second;
  std::string mode;
  const char* binary = std::getenv("AGGCORRECT_BIN");
  if (binary != nullptr) {
    mode = "via CLI";
    for (int run = 0; run < 2; ++run) {
      const auto report =
          dir.path() / ("report" + std::to_string(run) + ".json");
      const std::string command =
          std::string(binary) + " correct --pairs " + pairs_path +
          " --records " + records_path + " --classes " + classes_path +
          " --prior jeffreys --resolution 20000 --seed 4242 --workers 2" +
          " --out " + report.string() + " > /dev/null 2>&1";
      if (std::system(command.c_str()) != 0) {
        return {false, "CLI run failed"};
      }
      (run == 0 ? first : second) =
          strip_timestamp(testsupport::read_file(report.string()));
    }
  } else {
    mode = "via library";
    RunConfig config;
    config.pairs_path = pairs_path;
    config.records_path = records_path;
    config.classes_path = classes_path;
    config.resolution = 20'000;
    config.seed = 4242;
    config.workers = 2;
    first = strip_timestamp(report_to_json(run_correct(config), true));
    second = strip_timestamp(report_to_json(run_correct(config), true));
  }
  const double elapsed = seconds_since(start);

  const bool identical = !first.empty() && first == second;
  std::ostringstream detail;
  detail << mode << ", " << first.size() << " bytes compared, "
         << (identical ? "identical" : "DIFFER") << ", " << elapsed << " s";
  return {identical && elapsed < 5.0, detail.str()};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& all_criteria() {
  static const std::vector<Criterion> criteria = {
      {1, "base-rate example: exact naive expectation", criterion_1},
      {2, "small-test-set example: exact baseline correction", criterion_2},
      {3, "small-test-set example: constrained Bayes estimate", criterion_3},
      {4, "Jeffreys prior matches the Fisher information", criterion_4},
      {5, "Fisher information log-determinant vs Monte Carlo", criterion_5},
      {6, "base-rate covariance formula vs simulation", criterion_6},
      {7, "constraint-region equivalences", criterion_7},
      {8, "posterior-mean convergence in n", criterion_8},
      {9, "bootstrap method comparison on the surrogate", criterion_9},
      {10, "rejection sampler matches the truncated posterior", criterion_10},
      {11, "deterministic reports", criterion_11},
  };
  return criteria;
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  if (argc > 1) {
    selected = std::atoi(argv[1]);
    if (selected < 1 || selected > 11) {
      std::fprintf(stderr, "usage: %s [criterion 1..11]\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  for (const Criterion& criterion : all_criteria()) {
    if (selected != 0 && criterion.number != selected) {
      continue;
    }
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL",
                criterion.number, criterion.name, outcome.detail.c_str());
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aggcorrect/config.hpp"
#include "aggcorrect/simulation.hpp"

namespace aggcorrect {

/** Ordered class labels defining the label-to-index mapping shared by every
 * input file of a run. Mandatory so the pairs and records files cannot
 * silently disagree on class order.
 */
class ClassManifest {
 public:
  static ClassManifest from_labels(std::vector<std::string> labels);
  /// One label per line, in class order; blank lines ignored.
  static ClassManifest load(const std::string& path);

  int k() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Throws UnknownLabel.
  int index_of(const std::string& label) const;

 private:
  explicit ClassManifest(std::vector<std::string> labels)
      : labels_(std::move(labels)) {}
  std::vector<std::string> labels_;
};

/// CSV with header `true,predicted`; labels resolved through the manifest.
std::vector<LabeledPair> load_labeled_pairs(const std::string& path,
                                            const ClassManifest& manifest);

/// CSV with header `predicted,y`; y must parse as a finite real.
std::vector<TargetRecord> load_target_records(const std::string& path,
                                              const ClassManifest& manifest);

/// One y value per data row; CSV with header `y`.
std::vector<double> load_y_values(const std::string& path);

struct RunConfig {
  std::string pairs_path;
  std::string records_path;
  std::string classes_path;
  std::string prior = "jeffreys";  // uniform | jeffreys | custom:<file>
  std::uint64_t resolution = 10'000;
  std::uint64_t max_attempts_factor = 10'000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool constraints = true;
};

/// Resolves a --prior argument: "uniform", "jeffreys" or "custom:<file>"
/// where <file> is JSON {"alpha": [[...]], "gamma": [...]}.
DirichletProduct resolve_prior(const std::string& spec, int k);

/// The full correction pipeline: ingest, posterior, constrained sampling,
/// estimators. Serialization is left to the caller (see report.hpp).
EstimatorReport run_correct(const RunConfig& config);

/// Posterior parameter draws for external density plotting.
PosteriorDraws run_posterior(const RunConfig& config);

/// Builds an ExperimentSpec from a parsed experiment config document.
ExperimentSpec experiment_from_config(const ConfigDocument& doc);

}  // namespace aggcorrect

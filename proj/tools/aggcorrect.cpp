// Apache License, Version 2.0, refer to LICENSE.txt
//
// Command-line front end: `correct` runs the bias-correction pipeline on CSV
// inputs, `simulate` runs a bootstrap method comparison from a config file,
// `posterior` dumps parameter draws for external plotting.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "aggcorrect/io.hpp"
#include "aggcorrect/report.hpp"
#include "aggcorrect/version.hpp"

namespace {

// Exit code families: 2 = input data, 3 = singular matrix / starved sampler,
// 4 = configuration.
int exit_code_for(aggcorrect::ErrorKind kind) {
  using aggcorrect::ErrorKind;
  switch (kind) {
    case ErrorKind::SingularMatrix:
    case ErrorKind::ConstraintStarvation:
      return 3;
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidK:
      return 4;
    default:
      return 2;
  }
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    aggcorrect::fail(aggcorrect::ErrorKind::IoFailure,
                     "cannot write '" + path + "'");
  }
  out << contents;
}

struct CorrectOptions {
  aggcorrect::RunConfig run;
  std::string out_path;
  std::string samples_path;
};

int cmd_correct(const CorrectOptions& opts) {
  const aggcorrect::EstimatorReport report = aggcorrect::run_correct(opts.run);
  if (!opts.out_path.empty()) {
    write_file(opts.out_path, aggcorrect::report_to_json(report));
  }
  if (!opts.samples_path.empty()) {
    write_file(opts.samples_path,
               aggcorrect::samples_to_csv(report.bayes, report.class_labels));
  }
  std::cout << aggcorrect::report_to_text(report);
  return 0;
}

struct SimulateOptions {
  std::string config_path;
  std::string out_path;
  std::string json_path;
};

int cmd_simulate(const SimulateOptions& opts) {
  const auto doc = aggcorrect::ConfigDocument::parse_file(opts.config_path);
  const std::string scenario = doc.get_string("scenario", "bootstrap");
  if (scenario == "peculiar") {
    doc.restrict_keys({"scenario", "seed", "resolution", "workers"});
    const auto report = aggcorrect::peculiar_example(
        static_cast<std::uint64_t>(doc.get_int("resolution", 100'000)),
        static_cast<std::uint64_t>(doc.get_int("seed", 42)),
        static_cast<unsigned>(doc.get_int("workers", 1)));
    if (!opts.out_path.empty()) {
      write_file(opts.out_path, aggcorrect::report_to_json(report));
    }
    std::cout << aggcorrect::report_to_text(report);
    return 0;
  }
  if (scenario != "bootstrap") {
    aggcorrect::fail(aggcorrect::ErrorKind::InvalidConfig,
                     "scenario must be 'bootstrap' or 'peculiar'");
  }
  const auto spec = aggcorrect::experiment_from_config(doc);
  const auto result = aggcorrect::run_experiment(spec);
  const std::string csv = aggcorrect::scores_to_csv(result);
  if (!opts.out_path.empty()) {
    write_file(opts.out_path, csv);
  }
  if (!opts.json_path.empty()) {
    write_file(opts.json_path, aggcorrect::scores_to_json(result));
  }
  std::cout << csv;
  return 0;
}

struct PosteriorOptions {
  aggcorrect::RunConfig run;
  std::string out_path;
};

int cmd_posterior(const PosteriorOptions& opts) {
  const aggcorrect::PosteriorDraws draws = aggcorrect::run_posterior(opts.run);
  const std::string csv = aggcorrect::draws_to_csv(draws);
  if (opts.out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(opts.out_path, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bias correction for aggregates computed over predicted "
               "class labels"};
  app.set_version_flag("--version", aggcorrect::kVersion);
  app.require_subcommand(1);

  CorrectOptions correct_opts;
  CLI::App* correct = app.add_subcommand(
      "correct", "Correct per-class aggregates from CSV inputs");
  correct->add_option("--pairs", correct_opts.run.pairs_path,
                      "CSV of test-set pairs (header: true,predicted)")
      ->required();
  correct->add_option("--records", correct_opts.run.records_path,
                      "CSV of target records (header: predicted,y)")
      ->required();
  correct->add_option("--classes", correct_opts.run.classes_path,
                      "class manifest, one label per line")
      ->required();
  correct->add_option("--prior", correct_opts.run.prior,
                      "uniform | jeffreys | custom:<file>");
  correct->add_option("--resolution", correct_opts.run.resolution,
                      "accepted posterior draws R");
  correct->add_option("--seed", correct_opts.run.seed, "root RNG seed");
  correct->add_option("--max-attempts-factor",
                      correct_opts.run.max_attempts_factor,
                      "attempt cap as a multiple of R");
  correct->add_option("--workers", correct_opts.run.workers, "worker threads");
  correct->add_flag("--no-constraints",
                    [&correct_opts](std::int64_t) {
                      correct_opts.run.constraints = false;
                    },
                    "disable the non-negativity constraints");
  correct->add_option("--out", correct_opts.out_path, "report JSON path");
  correct->add_option("--samples", correct_opts.samples_path,
                      "corrected-aggregate samples CSV path");

  SimulateOptions simulate_opts;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Bootstrap comparison of correction methods");
  simulate->add_option("--config", simulate_opts.config_path,
                       "experiment config file")
      ->required();
  simulate->add_option("--out", simulate_opts.out_path, "scores CSV path");
  simulate->add_option("--json", simulate_opts.json_path, "scores JSON path");

  PosteriorOptions posterior_opts;
  CLI::App* posterior = app.add_subcommand(
      "posterior", "Dump posterior parameter draws as CSV");
  posterior->add_option("--pairs", posterior_opts.run.pairs_path,
                        "CSV of test-set pairs")
      ->required();
  posterior->add_option("--classes", posterior_opts.run.classes_path,
                        "class manifest")
      ->required();
  posterior->add_option("--records", posterior_opts.run.records_path,
                        "target records CSV (enables constraints)");
  posterior->add_option("--prior", posterior_opts.run.prior,
                        "uniform | jeffreys | custom:<file>");
  posterior->add_option("--resolution", posterior_opts.run.resolution,
                        "accepted posterior draws R");
  posterior->add_option("--seed", posterior_opts.run.seed, "root RNG seed");
  posterior->add_option("--max-attempts-factor",
                        posterior_opts.run.max_attempts_factor,
                        "attempt cap as a multiple of R");
  posterior->add_option("--workers", posterior_opts.run.workers,
                        "worker threads");
  posterior->add_flag("--no-constraints",
                      [&posterior_opts](std::int64_t) {
                        posterior_opts.run.constraints = false;
                      },
                      "disable the non-negativity constraints");
  posterior->add_option("--out", posterior_opts.out_path, "draws CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (correct->parsed()) {
      return cmd_correct(correct_opts);
    }
    if (simulate->parsed()) {
      return cmd_simulate(simulate_opts);
    }
    if (posterior->parsed()) {
      return cmd_posterior(posterior_opts);
    }
  } catch (const aggcorrect::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

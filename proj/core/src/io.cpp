// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace aggcorrect {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) {
    fields.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    fields.push_back("");
  }
  return fields;
}

std::ifstream open_or_fail(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::IoFailure, "cannot open '" + path + "'");
  }
  return in;
}

void expect_header(const std::string& path, std::istream& in,
                   const std::vector<std::string>& expected) {
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorKind::MalformedRow, path + ": missing header row");
  }
  const auto fields = split_csv_row(line);
  if (fields != expected) {
    std::ostringstream msg;
    msg << path << ": expected header '";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      msg << (i > 0 ? "," : "") << expected[i];
    }
    msg << "', got '" << line << "'";
    fail(ErrorKind::MalformedRow, msg.str());
  }
}

double parse_y(const std::string& token, const std::string& path, int row) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    std::ostringstream msg;
    msg << path << " row " << row << ": y value '" << token
        << "' is not numeric";
    fail(ErrorKind::NonNumericY, msg.str());
  }
  if (used != token.size()) {
    std::ostringstream msg;
    msg << path << " row " << row << ": y value '" << token
        << "' is not numeric";
    fail(ErrorKind::NonNumericY, msg.str());
  }
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << path << " row " << row << ": y value must be finite";
    fail(ErrorKind::NonFiniteY, msg.str());
  }
  return value;
}

}  // namespace

ClassManifest ClassManifest::from_labels(std::vector<std::string> labels) {
  if (labels.size() < 2) {
    fail(ErrorKind::InvalidK, "manifest needs at least 2 class labels");
  }
  std::set<std::string> seen;
  for (const auto& label : labels) {
    if (label.empty()) {
      fail(ErrorKind::InvalidConfig, "class labels must be non-empty");
    }
    if (!seen.insert(label).second) {
      fail(ErrorKind::InvalidConfig, "duplicate class label '" + label + "'");
    }
  }
  return ClassManifest(std::move(labels));
}

ClassManifest ClassManifest::load(const std::string& path) {
  std::ifstream in = open_or_fail(path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) {
      labels.push_back(line);
    }
  }
  return from_labels(std::move(labels));
}

int ClassManifest::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    fail(ErrorKind::UnknownLabel, "label '" + label + "' not in manifest");
  }
  return static_cast<int>(it - labels_.begin());
}

std::vector<LabeledPair> load_labeled_pairs(const std::string& path,
                                            const ClassManifest& manifest) {
  std::ifstream in = open_or_fail(path);
  expect_header(path, in, {"true", "predicted"});
  std::vector<LabeledPair> pairs;
  std::string line;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_csv_row(line);
    if (fields.size() != 2) {
      std::ostringstream msg;
      msg << path << " row " << row << ": expected 2 fields, got "
          << fields.size();
      fail(ErrorKind::MalformedRow, msg.str());
    }
    try {
      pairs.push_back(LabeledPair{manifest.index_of(fields[0]),
                                  manifest.index_of(fields[1])});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnknownLabel) {
        throw;
      }
      std::ostringstream msg;
      msg << path << " row " << row << ": " << e.what();
      fail(ErrorKind::UnknownLabel, msg.str());
    }
  }
  return pairs;
}

std::vector<TargetRecord> load_target_records(const std::string& path,
                                              const ClassManifest& manifest) {
  std::ifstream in = open_or_fail(path);
  expect_header(path, in, {"predicted", "y"});
  std::vector<TargetRecord> records;
  std::string line;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_csv_row(line);
    if (fields.size() != 2) {
      std::ostringstream msg;
      msg << path << " row " << row << ": expected 2 fields, got "
          << fields.size();
      fail(ErrorKind::MalformedRow, msg.str());
    }
    int predicted = 0;
    try {
      predicted = manifest.index_of(fields[0]);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << path << " row " << row << ": " << e.what();
      fail(ErrorKind::UnknownLabel, msg.str());
    }
    records.push_back(TargetRecord{predicted, parse_y(fields[1], path, row)});
  }
  return records;
}

std::vector<double> load_y_values(const std::string& path) {
  std::ifstream in = open_or_fail(path);
  expect_header(path, in, {"y"});
  std::vector<double> values;
  std::string line;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) {
      continue;
    }
    values.push_back(parse_y(trim(line), path, row));
  }
  return values;
}

DirichletProduct resolve_prior(const std::string& spec, int k) {
  if (spec == "uniform") {
    return prior_uniform(k);
  }
  if (spec == "jeffreys") {
    return prior_jeffreys(k);
  }
  const std::string custom_prefix = "custom:";
  if (spec.rfind(custom_prefix, 0) == 0) {
    const std::string path = spec.substr(custom_prefix.size());
    std::ifstream in = open_or_fail(path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::InvalidConfig,
           "prior file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.contains("alpha") || !doc.contains("gamma")) {
      fail(ErrorKind::InvalidConfig,
           "prior file '" + path + "' must contain 'alpha' and 'gamma'");
    }
    const auto& alpha_json = doc["alpha"];
    const auto& gamma_json = doc["gamma"];
    if (!alpha_json.is_array() ||
        alpha_json.size() != static_cast<std::size_t>(k) ||
        !gamma_json.is_array() ||
        gamma_json.size() != static_cast<std::size_t>(k)) {
      fail(ErrorKind::InvalidConfig,
           "prior file '" + path + "' dimensions must match K");
    }
    Matrix alpha(k, k);
    Vector gamma(k);
    for (int g = 0; g < k; ++g) {
      const auto& row = alpha_json[static_cast<std::size_t>(g)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(k)) {
        fail(ErrorKind::InvalidConfig,
             "prior file '" + path + "' alpha rows must have K entries");
      }
      for (int h = 0; h < k; ++h) {
        alpha(g, h) = row[static_cast<std::size_t>(h)].get<double>();
      }
      gamma(g) = gamma_json[static_cast<std::size_t>(g)].get<double>();
    }
    return DirichletProduct::validated(std::move(alpha), std::move(gamma));
  }
  fail(ErrorKind::InvalidConfig,
       "prior must be 'uniform', 'jeffreys' or 'custom:<file>'");
}

EstimatorReport run_correct(const RunConfig& config) {
  const ClassManifest manifest = ClassManifest::load(config.classes_path);
  const int k = manifest.k();
  const auto pairs = load_labeled_pairs(config.pairs_path, manifest);
  const auto records = load_target_records(config.records_path, manifest);

  const ConfusionCounts counts = confusion_from_pairs(pairs, k);
  auto [u_hat, v_hat] = aggregate_by_predicted(records, k);

  const DirichletProduct prior = resolve_prior(config.prior, k);
  const PosteriorSpec posterior = posterior_update(prior, counts);

  EstimatorReport report;
  report.class_labels = manifest.labels();
  report.prior_name = config.prior;
  report.constraints_enabled = config.constraints;
  report.resolution = config.resolution;
  report.seed = config.seed;
  report.workers = config.workers;
  report.test_set_size = static_cast<std::uint64_t>(counts.total());
  report.record_count = records.size();
  report.confusion = counts.cells();
  report.naive = u_hat;
  report.v_hat = v_hat.counts();

  try {
    report.baseline = baseline_estimate(plugin_contingency(counts), u_hat);
    report.baseline_negative = (report.baseline->sums.array() < 0.0).any();
  } catch (const Error& e) {
    report.baseline.reset();
    report.baseline_error = e.what();
  }

  std::optional<ConstraintRegion> region;
  if (config.constraints) {
    region.emplace(std::move(v_hat));
  }
  const SamplerConfig sampler = SamplerConfig::with_attempts_factor(
      config.resolution, config.max_attempts_factor, config.seed,
      config.workers);
  report.bayes = bayes_estimate(posterior, u_hat, region, sampler);
  report.bayes_summary = summarize(report.bayes);
  return report;
}

PosteriorDraws run_posterior(const RunConfig& config) {
  const ClassManifest manifest = ClassManifest::load(config.classes_path);
  const int k = manifest.k();
  const auto pairs = load_labeled_pairs(config.pairs_path, manifest);
  const ConfusionCounts counts = confusion_from_pairs(pairs, k);
  const DirichletProduct prior = resolve_prior(config.prior, k);
  const PosteriorSpec posterior = posterior_update(prior, counts);

  std::optional<ConstraintRegion> region;
  if (config.constraints && !config.records_path.empty()) {
    const auto records = load_target_records(config.records_path, manifest);
    auto [u_hat, v_hat] = aggregate_by_predicted(records, k);
    region.emplace(std::move(v_hat));
  }
  const SamplerConfig sampler = SamplerConfig::with_attempts_factor(
      config.resolution, config.max_attempts_factor, config.seed,
      config.workers);
  return rejection_sample(posterior, region, sampler);
}

ExperimentSpec experiment_from_config(const ConfigDocument& doc) {
  doc.restrict_keys({
      "scenario", "seed", "workers", "population_size", "base_rates",
      "contingency", "p", "q", "y_model", "y_lognormal_mu",
      "y_lognormal_sigma", "y_empirical_file", "test_sizes", "methods",
      "replications", "resolution", "max_attempts_factor", "target_class",
  });

  const auto base_rates = doc.require_double_array("base_rates");
  const int k = static_cast<int>(base_rates.size());
  Vector beta(k);
  for (int g = 0; g < k; ++g) {
    beta(g) = base_rates[static_cast<std::size_t>(g)];
  }

  Matrix rows(k, k);
  if (doc.has("p") || doc.has("q")) {
    if (k != 2) {
      fail(ErrorKind::InvalidConfig,
           "'p'/'q' shorthand requires exactly 2 classes");
    }
    const double p = doc.require_double("p");
    const double q = doc.require_double("q");
    rows << 1.0 - p, p, q, 1.0 - q;
  } else {
    const auto flat = doc.require_double_array("contingency");
    if (flat.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k)) {
      fail(ErrorKind::InvalidConfig,
           "'contingency' must hold K*K row-major entries");
    }
    for (int g = 0; g < k; ++g) {
      for (int h = 0; h < k; ++h) {
        rows(g, h) = flat[static_cast<std::size_t>(g * k + h)];
      }
    }
  }

  YModel y_model;
  const std::string y_kind = doc.get_string("y_model", "constant");
  if (y_kind == "constant") {
    y_model.kind = YModel::Kind::Constant;
  } else if (y_kind == "lognormal") {
    y_model.kind = YModel::Kind::Lognormal;
    y_model.mu = doc.get_double("y_lognormal_mu", 11.0);
    y_model.sigma = doc.get_double("y_lognormal_sigma", 2.0);
  } else if (y_kind == "empirical") {
    y_model.kind = YModel::Kind::Empirical;
    y_model.empirical_values =
        load_y_values(doc.require_string("y_empirical_file"));
  } else {
    fail(ErrorKind::InvalidConfig,
         "y_model must be constant, lognormal or empirical");
  }

  PopulationSpec population(
      doc.require_int("population_size"), std::move(beta), std::move(y_model),
      ContingencyMatrix::validated(std::move(rows)),
      static_cast<std::uint64_t>(doc.get_int("seed", 0)));

  ExperimentSpec spec{std::move(population), {}, {}, 1};
  for (const double n : doc.require_double_array("test_sizes")) {
    if (n != std::floor(n)) {
      fail(ErrorKind::InvalidConfig, "test_sizes must be integers");
    }
    spec.test_sizes.push_back(static_cast<int>(n));
  }
  for (const auto& name : doc.require_string_array("methods")) {
    spec.methods.push_back(method_from_string(name));
  }
  spec.replications = static_cast<int>(doc.require_int("replications"));
  spec.resolution =
      static_cast<std::uint64_t>(doc.get_int("resolution", 10'000));
  spec.max_attempts_factor =
      static_cast<std::uint64_t>(doc.get_int("max_attempts_factor", 10'000));
  spec.workers = static_cast<unsigned>(doc.get_int("workers", 1));
  spec.target_class = static_cast<int>(doc.get_int("target_class", 0));
  return spec;
}

}  // namespace aggcorrect

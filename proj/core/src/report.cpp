// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "aggcorrect/version.hpp"

namespace aggcorrect {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

ordered_json vector_to_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

ordered_json matrix_to_json(const Matrix& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index g = 0; g < m.rows(); ++g) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index h = 0; h < m.cols(); ++h) {
      row.push_back(m(g, h));
    }
    out.push_back(std::move(row));
  }
  return out;
}

// Shortest round-trip representation, for CSV output.
std::string format_double(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  double parsed = 0.0;
  std::sscanf(buffer, "%lf", &parsed);
  for (int precision = 1; precision < 17; ++precision) {
    char candidate[64];
    std::snprintf(candidate, sizeof(candidate), "%.*g", precision, x);
    std::sscanf(candidate, "%lf", &parsed);
    if (parsed == x) {
      return candidate;
    }
  }
  return buffer;
}

}  // namespace

std::string report_to_json(const EstimatorReport& report,
                           bool include_timestamp) {
  ordered_json doc;
  doc["version"] = kVersion;
  if (include_timestamp) {
    doc["generated_at"] = utc_timestamp();
  }
  doc["classes"] = report.class_labels;
  doc["prior"] = report.prior_name;
  doc["constraints"] = report.constraints_enabled;
  doc["resolution"] = report.resolution;
  doc["seed"] = report.seed;
  doc["workers"] = report.workers;
  doc["test_set_size"] = report.test_set_size;
  doc["record_count"] = report.record_count;
  doc["confusion"] = matrix_to_json(report.confusion);
  doc["predicted_counts"] = vector_to_json(report.v_hat);
  doc["naive"] = vector_to_json(report.naive.sums);

  ordered_json baseline;
  if (report.baseline.has_value()) {
    baseline["available"] = true;
    baseline["estimate"] = vector_to_json(report.baseline->sums);
    baseline["has_negative_components"] = report.baseline_negative;
  } else {
    baseline["available"] = false;
    baseline["error"] = report.baseline_error;
  }
  doc["baseline"] = std::move(baseline);

  ordered_json bayes;
  bayes["accepted"] = report.bayes.accepted;
  bayes["attempted"] = report.bayes.attempted;
  bayes["acceptance_rate"] = report.bayes.acceptance_rate;
  ordered_json summary = ordered_json::array();
  for (std::size_t h = 0; h < report.bayes_summary.size(); ++h) {
    const SummaryRow& row = report.bayes_summary[h];
    ordered_json entry;
    entry["class"] = report.class_labels[h];
    entry["mean"] = row.mean;
    entry["sd"] = row.sd;
    entry["q2.5"] = row.q2_5;
    entry["q25"] = row.q25;
    entry["median"] = row.q50;
    entry["q75"] = row.q75;
    entry["q97.5"] = row.q97_5;
    summary.push_back(std::move(entry));
  }
  bayes["summary"] = std::move(summary);
  doc["bayes"] = std::move(bayes);

  return doc.dump(2) + "\n";
}

std::string report_to_text(const EstimatorReport& report) {
  std::ostringstream out;
  out << "aggcorrect " << kVersion << " | prior=" << report.prior_name
      << " | constraints=" << (report.constraints_enabled ? "on" : "off")
      << " | R=" << report.resolution << " | seed=" << report.seed
      << " | acceptance=" << std::setprecision(4)
      << report.bayes.acceptance_rate << "\n";
  out << "test set n=" << report.test_set_size
      << ", records N=" << report.record_count << "\n\n";

  out << std::left << std::setw(16) << "class" << std::right << std::setw(14)
      << "naive" << std::setw(14) << "baseline" << std::setw(14)
      << "bayes mean" << std::setw(14) << "bayes sd" << std::setw(14)
      << "q2.5" << std::setw(14) << "q97.5" << "\n";
  for (std::size_t h = 0; h < report.class_labels.size(); ++h) {
    out << std::left << std::setw(16) << report.class_labels[h] << std::right
        << std::fixed << std::setprecision(3);
    out << std::setw(14) << report.naive.sums(static_cast<Eigen::Index>(h));
    if (report.baseline.has_value()) {
      out << std::setw(14)
          << report.baseline->sums(static_cast<Eigen::Index>(h));
    } else {
      out << std::setw(14) << "n/a";
    }
    const SummaryRow& row = report.bayes_summary[h];
    out << std::setw(14) << row.mean << std::setw(14) << row.sd
        << std::setw(14) << row.q2_5 << std::setw(14) << row.q97_5 << "\n";
    out.unsetf(std::ios::fixed);
  }
  if (report.baseline.has_value() && report.baseline_negative) {
    out << "\nwarning: baseline estimate has negative components\n";
  }
  if (!report.baseline.has_value()) {
    out << "\nwarning: baseline unavailable: " << report.baseline_error
        << "\n";
  }
  return out.str();
}

std::string samples_to_csv(const CorrectedAggregateDistribution& dist,
                           const std::vector<std::string>& labels) {
  std::ostringstream out;
  for (std::size_t h = 0; h < labels.size(); ++h) {
    out << (h > 0 ? "," : "") << labels[h];
  }
  out << "\n";
  for (const Vector& sample : dist.samples) {
    for (Eigen::Index h = 0; h < sample.size(); ++h) {
      out << (h > 0 ? "," : "") << format_double(sample(h));
    }
    out << "\n";
  }
  return out.str();
}

std::string draws_to_csv(const PosteriorDraws& draws) {
  std::ostringstream out;
  if (draws.draws.empty()) {
    return out.str();
  }
  const int k = draws.draws.front().p.k();
  bool first = true;
  for (int g = 0; g < k; ++g) {
    for (int h = 0; h < k; ++h) {
      out << (first ? "" : ",") << "p_" << g << "_" << h;
      first = false;
    }
  }
  for (int g = 0; g < k; ++g) {
    out << ",beta_" << g;
  }
  out << "\n";
  for (const ParameterDraw& draw : draws.draws) {
    first = true;
    for (int g = 0; g < k; ++g) {
      for (int h = 0; h < k; ++h) {
        out << (first ? "" : ",") << format_double(draw.p(g, h));
        first = false;
      }
    }
    for (int g = 0; g < k; ++g) {
      out << "," << format_double(draw.beta(g));
    }
    out << "\n";
  }
  return out.str();
}

std::string scores_to_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "method,n,bias,variance,mse,replications_used,excluded\n";
  for (const MethodScore& score : result.scores) {
    out << to_string(score.method) << "," << score.test_size << ","
        << format_double(score.bias) << "," << format_double(score.variance)
        << "," << format_double(score.mse) << "," << score.replications_used
        << "," << score.excluded << "\n";
  }
  return out.str();
}

std::string scores_to_json(const ExperimentResult& result,
                           bool include_timestamp) {
  ordered_json doc;
  doc["version"] = kVersion;
  if (include_timestamp) {
    doc["generated_at"] = utc_timestamp();
  }
  doc["target_class"] = result.target_class;
  doc["true_aggregate"] = result.true_aggregate;
  ordered_json scores = ordered_json::array();
  for (const MethodScore& score : result.scores) {
    ordered_json row;
    row["method"] = to_string(score.method);
    row["n"] = score.test_size;
    row["bias"] = score.bias;
    row["variance"] = score.variance;
    row["mse"] = score.mse;
    row["replications_used"] = score.replications_used;
    row["excluded"] = score.excluded;
    scores.push_back(std::move(row));
  }
  doc["scores"] = std::move(scores);
  return doc.dump(2) + "\n";
}

}  // namespace aggcorrect

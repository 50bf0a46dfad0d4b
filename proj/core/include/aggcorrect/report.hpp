// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <string>

#include "aggcorrect/estimators.hpp"
#include "aggcorrect/simulation.hpp"

namespace aggcorrect {

/// Machine-readable report. Key order is fixed, so identical runs serialize
/// byte-identically apart from the optional `generated_at` field.
std::string report_to_json(const EstimatorReport& report,
                           bool include_timestamp = true);

/// Aligned human-readable table.
std::string report_to_text(const EstimatorReport& report);

/// One row per draw, one column per class.
std::string samples_to_csv(const CorrectedAggregateDistribution& dist,
                           const std::vector<std::string>& labels);

/// Parameter draws: columns p_g_h (row-major) then beta_g.
std::string draws_to_csv(const PosteriorDraws& draws);

std::string scores_to_csv(const ExperimentResult& result);

std::string scores_to_json(const ExperimentResult& result,
                           bool include_timestamp = true);

}  // namespace aggcorrect

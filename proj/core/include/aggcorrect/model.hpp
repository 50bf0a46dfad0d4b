// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aggcorrect/error.hpp"

namespace aggcorrect {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerance on |row sum - 1| accepted by ContingencyMatrix validation.
inline constexpr double kRowSumTolerance = 1e-9;
/// |det(P^T)| below this is treated as singular.
inline constexpr double kDeterminantFloor = 1e-12;
/// 1-norm condition numbers above this are treated as singular.
inline constexpr double kConditionCeiling = 1e12;

/** Row-stochastic K x K matrix of classification error rates.
 *
 * Entry (g, h) is the probability that an object of true class g is
 * predicted as class h. Rows therefore sum to 1. In the binary shorthand,
 * class 0 is the positive class, p = (0,1) is the false negative rate and
 * q = (1,0) the false positive rate, so the matrix reads
 *
 *     [ 1-p   p ]
 *     [  q  1-q ]
 */
class ContingencyMatrix {
 public:
  /// Validates row sums (tolerance kRowSumTolerance) and entry ranges.
  static ContingencyMatrix validated(Matrix rows);

  /// Binary shorthand: p = false negative rate, q = false positive rate.
  static ContingencyMatrix binary(double p, double q);

  static ContingencyMatrix identity(int k);

  int k() const { return static_cast<int>(rows_.rows()); }
  const Matrix& matrix() const { return rows_; }
  double operator()(int g, int h) const { return rows_(g, h); }

  /// False negative rate in the binary shorthand. Throws NotBinary if k != 2.
  double binary_p() const;
  /// False positive rate in the binary shorthand. Throws NotBinary if k != 2.
  double binary_q() const;

 private:
  explicit ContingencyMatrix(Matrix rows) : rows_(std::move(rows)) {}
  Matrix rows_;
};

/// Q = (P^T)^{-1} together with the 1-norm condition number of P^T.
struct CorrectionMatrix {
  int k;
  Matrix q;
  double condition_number;
};

/** Per-class counts (v or v-hat) plus the population size N.
 *
 * Counts are stored as reals: validated instances hold non-negative counts
 * summing to N, while corrected counts Q * v-hat (which may be fractional or
 * negative) live in plain vectors.
 */
class CountsVector {
 public:
  /// Non-negative counts; n_total is taken as the sum of the entries.
  static CountsVector validated(Vector counts);

  int k() const { return static_cast<int>(counts_.size()); }
  const Vector& counts() const { return counts_; }
  double n_total() const { return n_total_; }
  /// Base-rate view beta-hat = counts / N. Requires N > 0.
  Vector base_rates() const;

 private:
  CountsVector(Vector counts, double n_total)
      : counts_(std::move(counts)), n_total_(n_total) {}
  Vector counts_;
  double n_total_;
};

/// Per-class sums of the y variable (u or u-hat). Entries may be negative.
struct AggregateVector {
  Vector sums;
  int k() const { return static_cast<int>(sums.size()); }
};

/// One test-set observation: (true class, predicted class).
struct LabeledPair {
  int true_class;
  int predicted_class;
};

/// One target-population record: predicted class and its y value.
struct TargetRecord {
  int predicted_class;
  double y;
};

/** K x K confusion counts n_gh from a labeled test set, with margins.
 *
 * n_gh counts pairs with true class g and predicted class h; n_g the row
 * totals and n the grand total. n = 0 is allowed and means prior-only
 * inference downstream.
 */
class ConfusionCounts {
 public:
  /// Cells must be non-negative integers (stored as doubles).
  static ConfusionCounts validated(Matrix cells);

  static ConfusionCounts zeros(int k);

  int k() const { return static_cast<int>(cells_.rows()); }
  const Matrix& cells() const { return cells_; }
  double cell(int g, int h) const { return cells_(g, h); }
  /// Row margin n_g.
  double row_total(int g) const { return row_totals_(g); }
  const Vector& row_totals() const { return row_totals_; }
  /// Grand total n.
  double total() const { return total_; }

 private:
  explicit ConfusionCounts(Matrix cells);
  Matrix cells_;
  Vector row_totals_;
  double total_;
};

/// Validates a raw matrix of error rates. Throws RowSumViolation or
/// NegativeEntry; requires K >= 2.
ContingencyMatrix validate_contingency(const Matrix& raw);

/// Q = (P^T)^{-1}. Throws SingularMatrix when |det P^T| < kDeterminantFloor
/// or the 1-norm condition number exceeds kConditionCeiling.
CorrectionMatrix invert_transpose(const ContingencyMatrix& p);

/// Non-throwing variant used by samplers: nullopt where invert_transpose
/// would throw SingularMatrix.
std::optional<CorrectionMatrix> try_invert_transpose(const ContingencyMatrix& p);

/// Tallies labeled pairs into confusion counts. Throws IndexOutOfRange.
ConfusionCounts confusion_from_pairs(std::span<const LabeledPair> pairs, int k);

/// Sums y (and counts records) per predicted class: u-hat and v-hat.
std::pair<AggregateVector, CountsVector> aggregate_by_predicted(
    std::span<const TargetRecord> records, int k);

/// E[u-hat] = P^T u, the expectation of the naive classification-based
/// aggregate under the error model.
AggregateVector expected_naive_aggregate(const ContingencyMatrix& p,
                                         const AggregateVector& u);

}  // namespace aggcorrect

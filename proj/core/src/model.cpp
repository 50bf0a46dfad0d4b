// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/model.hpp"

#include <cmath>
#include <sstream>

namespace aggcorrect {

namespace {

double one_norm(const Matrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

ContingencyMatrix ContingencyMatrix::validated(Matrix rows) {
  if (rows.rows() != rows.cols()) {
    fail(ErrorKind::DimensionMismatch, "contingency matrix must be square");
  }
  const int k = static_cast<int>(rows.rows());
  if (k < 2) {
    fail(ErrorKind::InvalidK, "class count must be at least 2");
  }
  for (int g = 0; g < k; ++g) {
    double sum = 0.0;
    for (int h = 0; h < k; ++h) {
      const double e = rows(g, h);
      if (!(e >= 0.0) || e > 1.0 || !std::isfinite(e)) {
        std::ostringstream msg;
        msg << "entry (" << g << ", " << h << ") = " << e
            << " outside [0, 1]";
        fail(ErrorKind::NegativeEntry, msg.str());
      }
      sum += e;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg << "row " << g << " sums to " << sum;
      fail(ErrorKind::RowSumViolation, msg.str());
    }
  }
  return ContingencyMatrix(std::move(rows));
}

ContingencyMatrix ContingencyMatrix::binary(double p, double q) {
  Matrix m(2, 2);
  m << 1.0 - p, p, q, 1.0 - q;
  return validated(std::move(m));
}

ContingencyMatrix ContingencyMatrix::identity(int k) {
  if (k < 2) {
    fail(ErrorKind::InvalidK, "class count must be at least 2");
  }
  return ContingencyMatrix(Matrix::Identity(k, k));
}

double ContingencyMatrix::binary_p() const {
  if (k() != 2) {
    fail(ErrorKind::NotBinary, "binary shorthand requires k = 2");
  }
  return rows_(0, 1);
}

double ContingencyMatrix::binary_q() const {
  if (k() != 2) {
    fail(ErrorKind::NotBinary, "binary shorthand requires k = 2");
  }
  return rows_(1, 0);
}

CountsVector CountsVector::validated(Vector counts) {
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (!std::isfinite(counts(i)) || counts(i) < 0.0) {
      fail(ErrorKind::NegativeEntry, "counts must be finite and non-negative");
    }
  }
  const double n_total = counts.sum();
  return CountsVector(std::move(counts), n_total);
}

Vector CountsVector::base_rates() const {
  if (n_total_ <= 0.0) {
    fail(ErrorKind::InvalidArgument, "base rates undefined for N = 0");
  }
  return counts_ / n_total_;
}

ConfusionCounts::ConfusionCounts(Matrix cells)
    : cells_(std::move(cells)),
      row_totals_(cells_.rowwise().sum()),
      total_(cells_.sum()) {}

ConfusionCounts ConfusionCounts::validated(Matrix cells) {
  if (cells.rows() != cells.cols()) {
    fail(ErrorKind::DimensionMismatch, "confusion counts must be square");
  }
  if (cells.rows() < 2) {
    fail(ErrorKind::InvalidK, "class count must be at least 2");
  }
  for (Eigen::Index g = 0; g < cells.rows(); ++g) {
    for (Eigen::Index h = 0; h < cells.cols(); ++h) {
      const double c = cells(g, h);
      if (!std::isfinite(c) || c < 0.0 || c != std::floor(c)) {
        fail(ErrorKind::NegativeEntry,
             "confusion cells must be non-negative integers");
      }
    }
  }
  return ConfusionCounts(std::move(cells));
}

ConfusionCounts ConfusionCounts::zeros(int k) {
  return validated(Matrix::Zero(k, k));
}

ContingencyMatrix validate_contingency(const Matrix& raw) {
  return ContingencyMatrix::validated(raw);
}

std::optional<CorrectionMatrix> try_invert_transpose(
    const ContingencyMatrix& p) {
  const Matrix pt = p.matrix().transpose();
  Eigen::PartialPivLU<Matrix> lu(pt);
  const double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) < kDeterminantFloor) {
    return std::nullopt;
  }
  Matrix q = lu.inverse();
  if (!q.allFinite()) {
    return std::nullopt;
  }
  const double cond = one_norm(pt) * one_norm(q);
  if (!(cond <= kConditionCeiling)) {
    return std::nullopt;
  }
  return CorrectionMatrix{p.k(), std::move(q), cond};
}

CorrectionMatrix invert_transpose(const ContingencyMatrix& p) {
  auto q = try_invert_transpose(p);
  if (!q) {
    fail(ErrorKind::SingularMatrix,
         "P^T is singular or too ill-conditioned to invert");
  }
  return std::move(*q);
}

ConfusionCounts confusion_from_pairs(std::span<const LabeledPair> pairs,
                                     int k) {
  if (k < 2) {
    fail(ErrorKind::InvalidK, "class count must be at least 2");
  }
  Matrix cells = Matrix::Zero(k, k);
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const auto& x = pairs[j];
    if (x.true_class < 0 || x.true_class >= k || x.predicted_class < 0 ||
        x.predicted_class >= k) {
      std::ostringstream msg;
      msg << "pair " << j << " has class index outside [0, " << k << ")";
      fail(ErrorKind::IndexOutOfRange, msg.str());
    }
    cells(x.true_class, x.predicted_class) += 1.0;
  }
  return ConfusionCounts::validated(std::move(cells));
}

std::pair<AggregateVector, CountsVector> aggregate_by_predicted(
    std::span<const TargetRecord> records, int k) {
  if (k < 2) {
    fail(ErrorKind::InvalidK, "class count must be at least 2");
  }
  Vector sums = Vector::Zero(k);
  Vector counts = Vector::Zero(k);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.predicted_class < 0 || r.predicted_class >= k) {
      std::ostringstream msg;
      msg << "record " << i << " has class index outside [0, " << k << ")";
      fail(ErrorKind::IndexOutOfRange, msg.str());
    }
    if (!std::isfinite(r.y)) {
      std::ostringstream msg;
      msg << "record " << i << " has non-finite y";
      fail(ErrorKind::NonFiniteY, msg.str());
    }
    sums(r.predicted_class) += r.y;
    counts(r.predicted_class) += 1.0;
  }
  return {AggregateVector{std::move(sums)},
          CountsVector::validated(std::move(counts))};
}

AggregateVector expected_naive_aggregate(const ContingencyMatrix& p,
                                         const AggregateVector& u) {
  if (u.k() != p.k()) {
    fail(ErrorKind::DimensionMismatch, "aggregate vector size must match K");
  }
  return AggregateVector{p.matrix().transpose() * u.sums};
}

}  // namespace aggcorrect

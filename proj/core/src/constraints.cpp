// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/constraints.hpp"

#include <cmath>
#include <vector>

namespace aggcorrect {

namespace {

constexpr double kFeasibilityTolerance = 1e-9;
constexpr double kPivotEpsilon = 1e-11;

// Phase-1 simplex: does lambda >= 0 with P^T lambda = target and
// sum lambda = 1 exist? Minimizes the total artificial-variable mass; the
// target is feasible iff the minimum is (numerically) zero. Bland's rule
// keeps the tiny tableau from cycling on degenerate vertices.
bool convex_combination_feasible(const Matrix& rows, const Vector& target) {
  const int k = static_cast<int>(rows.rows());
  const int m = k + 1;           // K equality rows plus the sum-to-one row
  const int n = k + m;           // lambda variables plus artificials
  Matrix t = Matrix::Zero(m, n + 1);
  for (int h = 0; h < k; ++h) {
    for (int g = 0; g < k; ++g) {
      t(h, g) = rows(g, h);
    }
    t(h, k + h) = 1.0;
    t(h, n) = target(h);
  }
  for (int g = 0; g < k; ++g) {
    t(m - 1, g) = 1.0;
  }
  t(m - 1, n - 1) = 1.0;
  t(m - 1, n) = 1.0;

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    basis[i] = k + i;
  }

  // Reduced-cost row for min sum(artificials); obj(n) tracks -objective.
  Eigen::RowVectorXd obj = -t.colwise().sum();
  for (int j = k; j < n; ++j) {
    obj(j) += 1.0;
  }

  const int max_iterations = 100 * (n + 1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    int entering = -1;
    for (int j = 0; j < n; ++j) {
      if (obj(j) < -kPivotEpsilon) {
        entering = j;
        break;
      }
    }
    if (entering < 0) {
      break;
    }
    int leaving = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t(i, entering) > kPivotEpsilon) {
        const double ratio = t(i, n) / t(i, entering);
        if (leaving < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
    }
    if (leaving < 0) {
      break;  // unbounded column; cannot improve feasibility
    }
    t.row(leaving) /= t(leaving, entering);
    for (int i = 0; i < m; ++i) {
      if (i != leaving && t(i, entering) != 0.0) {
        t.row(i) -= t(i, entering) * t.row(leaving);
      }
    }
    obj -= obj(entering) * t.row(leaving);
    basis[leaving] = entering;
  }
  return -obj(n) <= kFeasibilityTolerance;
}

}  // namespace

ConstraintRegion::ConstraintRegion(CountsVector v_hat, double tolerance)
    : v_hat_(std::move(v_hat)), tolerance_(tolerance) {
  if (v_hat_.n_total() <= 0.0) {
    fail(ErrorKind::InvalidArgument,
         "constraint region requires predicted counts with N > 0");
  }
  if (!(tolerance_ >= 0.0) || !std::isfinite(tolerance_)) {
    fail(ErrorKind::InvalidArgument, "tolerance must be finite and >= 0");
  }
}

bool contains(const ConstraintRegion& region, const ContingencyMatrix& p) {
  if (p.k() != region.k()) {
    fail(ErrorKind::DimensionMismatch, "region and matrix dimensions differ");
  }
  const auto correction = try_invert_transpose(p);
  if (!correction) {
    return false;
  }
  const Vector corrected = correction->q * region.v_hat().counts();
  const double slack = -region.tolerance() * region.v_hat().n_total();
  return (corrected.array() >= slack).all();
}

bool contains_binary_closed_form(const ConstraintRegion& region, double p,
                                 double q) {
  if (region.k() != 2) {
    fail(ErrorKind::NotBinary, "closed form requires k = 2");
  }
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "p and q must lie in [0, 1]");
  }
  const Vector beta_hat = region.v_hat().base_rates();
  return (p <= beta_hat(1) && q <= beta_hat(0)) ||
         (p >= beta_hat(1) && q >= beta_hat(0));
}

bool convex_hull_membership(const ConstraintRegion& region,
                            const ContingencyMatrix& p) {
  if (p.k() != region.k()) {
    fail(ErrorKind::DimensionMismatch, "region and matrix dimensions differ");
  }
  return convex_combination_feasible(p.matrix(), region.v_hat().base_rates());
}

}  // namespace aggcorrect

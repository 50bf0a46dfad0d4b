// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include "aggcorrect/model.hpp"

namespace aggcorrect {

/** The admissible region Theta_K(v-hat): contingency matrices whose implied
 * correction keeps all corrected counts non-negative, i.e. Q(P) v-hat >= 0.
 *
 * Conditions on the predicted counts v-hat. Membership is tested with slack
 * -tolerance * N so that draws exactly on the boundary (a corrected count of
 * zero) remain admissible.
 */
class ConstraintRegion {
 public:
  explicit ConstraintRegion(CountsVector v_hat, double tolerance = 1e-12);

  int k() const { return v_hat_.k(); }
  const CountsVector& v_hat() const { return v_hat_; }
  double tolerance() const { return tolerance_; }

 private:
  CountsVector v_hat_;
  double tolerance_;
};

/// True iff P^T is invertible and every component of Q v-hat is
/// >= -tolerance * N. Singular P cannot certify membership and yields false.
bool contains(const ConstraintRegion& region, const ContingencyMatrix& p);

/** Binary closed form of Theta_2 over the normalized base rates
 * beta-hat = v-hat / N:
 *
 *   (p <= beta-hat_2 and q <= beta-hat_1) or
 *   (p >= beta-hat_2 and q >= beta-hat_1).
 *
 * Throws NotBinary when k != 2.
 */
bool contains_binary_closed_form(const ConstraintRegion& region, double p,
                                 double q);

/// True iff beta-hat is a convex combination of the rows of P, decided by a
/// phase-1 simplex feasibility solve (coefficients >= 0 summing to 1, slack
/// 1e-9). Agrees with contains() whenever P^T is invertible.
bool convex_hull_membership(const ConstraintRegion& region,
                            const ContingencyMatrix& p);

}  // namespace aggcorrect

// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <utility>

#include "aggcorrect/model.hpp"

namespace aggcorrect {

/** Hyperparameters of the product-Dirichlet family over (P, beta).
 *
 * Row g of alpha holds the concentration parameters of the Dirichlet over
 * contingency row p_g; gamma holds those of the Dirichlet over the base
 * rates. All entries must be strictly positive (a proper prior is required
 * for rejection sampling).
 */
class DirichletProduct {
 public:
  static DirichletProduct validated(Matrix alpha, Vector gamma);

  int k() const { return static_cast<int>(gamma_.size()); }
  const Matrix& alpha() const { return alpha_; }
  const Vector& gamma() const { return gamma_; }

 private:
  DirichletProduct(Matrix alpha, Vector gamma)
      : alpha_(std::move(alpha)), gamma_(std::move(gamma)) {}
  Matrix alpha_;
  Vector gamma_;
};

/// Flat prior: alpha_gh = 1, gamma_g = 1.
DirichletProduct prior_uniform(int k);

/// Jeffreys prior for this likelihood: alpha_gh = 1/2, gamma_g = K/2.
DirichletProduct prior_jeffreys(int k);

/** Prior, observed confusion counts, and the conjugate posterior.
 *
 * The posterior stays in the product-Dirichlet family with
 * alpha'_gh = alpha_gh + n_gh and gamma'_g = gamma_g + n_g.
 */
class PosteriorSpec {
 public:
  PosteriorSpec(DirichletProduct prior, ConfusionCounts counts);

  int k() const { return posterior_.k(); }
  const DirichletProduct& prior() const { return prior_; }
  const ConfusionCounts& counts() const { return counts_; }
  const DirichletProduct& posterior() const { return posterior_; }

 private:
  DirichletProduct prior_;
  ConfusionCounts counts_;
  DirichletProduct posterior_;
};

PosteriorSpec posterior_update(DirichletProduct prior, ConfusionCounts counts);

/// Log of prod_gh (p_gh beta_g)^{n_gh}; -inf when an observed cell has
/// probability zero.
double log_likelihood(const ContingencyMatrix& p, const Vector& beta,
                      const ConfusionCounts& counts);

/// Analytic mean of the product-Dirichlet posterior: row means of P and the
/// base-rate mean. A point summary only; the corrected estimate uses draws.
std::pair<ContingencyMatrix, Vector> posterior_mean(const PosteriorSpec& spec);

/// Log determinant of the Fisher information of the classification error
/// model: -sum log p_gh + (K-2) sum log beta_g. Throws BoundaryParameter on
/// any zero entry.
double fim_log_det(const ContingencyMatrix& p, const Vector& beta);

/// Log density of the product-Dirichlet over the contingency rows only.
double log_density_rows(const DirichletProduct& d, const ContingencyMatrix& p);

/// Log density of the base-rate Dirichlet component.
double log_density_beta(const DirichletProduct& d, const Vector& beta);

/// Joint log density over (P, beta).
double log_density(const DirichletProduct& d, const ContingencyMatrix& p,
                   const Vector& beta);

}  // namespace aggcorrect

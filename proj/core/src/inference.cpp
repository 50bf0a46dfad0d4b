// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/inference.hpp"

#include <cmath>
#include <limits>

namespace aggcorrect {

namespace {

void check_beta(const Vector& beta, int k) {
  if (static_cast<int>(beta.size()) != k) {
    fail(ErrorKind::DimensionMismatch, "base-rate vector size must match K");
  }
}

// Log Dirichlet density with concentrations a at point x. Terms with
// a_i == 1 contribute nothing even at x_i == 0.
double dirichlet_log_density(const Vector& a, const Vector& x) {
  double log_norm = std::lgamma(a.sum());
  double log_kernel = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    log_norm -= std::lgamma(a(i));
    if (a(i) != 1.0) {
      log_kernel += (a(i) - 1.0) * std::log(x(i));
    }
  }
  return log_norm + log_kernel;
}

}  // namespace

DirichletProduct DirichletProduct::validated(Matrix alpha, Vector gamma) {
  if (alpha.rows() != alpha.cols() || alpha.rows() != gamma.size()) {
    fail(ErrorKind::DimensionMismatch,
         "alpha must be K x K with gamma of length K");
  }
  if (gamma.size() < 2) {
    fail(ErrorKind::InvalidK, "class count must be at least 2");
  }
  const bool alpha_ok = (alpha.array() > 0.0).all() && alpha.allFinite();
  const bool gamma_ok = (gamma.array() > 0.0).all() && gamma.allFinite();
  if (!alpha_ok || !gamma_ok) {
    fail(ErrorKind::NonPositiveConcentration,
         "all hyperparameters must be strictly positive");
  }
  return DirichletProduct(std::move(alpha), std::move(gamma));
}

DirichletProduct prior_uniform(int k) {
  if (k < 2) {
    fail(ErrorKind::InvalidK, "class count must be at least 2");
  }
  return DirichletProduct::validated(Matrix::Ones(k, k), Vector::Ones(k));
}

DirichletProduct prior_jeffreys(int k) {
  if (k < 2) {
    fail(ErrorKind::InvalidK, "class count must be at least 2");
  }
  return DirichletProduct::validated(Matrix::Constant(k, k, 0.5),
                                     Vector::Constant(k, k / 2.0));
}

namespace {

DirichletProduct conjugate_posterior(const DirichletProduct& prior,
                                     const ConfusionCounts& counts) {
  if (prior.k() != counts.k()) {
    fail(ErrorKind::DimensionMismatch, "prior and counts dimensions differ");
  }
  return DirichletProduct::validated(prior.alpha() + counts.cells(),
                                     prior.gamma() + counts.row_totals());
}

}  // namespace

PosteriorSpec::PosteriorSpec(DirichletProduct prior, ConfusionCounts counts)
    : prior_(std::move(prior)),
      counts_(std::move(counts)),
      posterior_(conjugate_posterior(prior_, counts_)) {}

PosteriorSpec posterior_update(DirichletProduct prior, ConfusionCounts counts) {
  return PosteriorSpec(std::move(prior), std::move(counts));
}

double log_likelihood(const ContingencyMatrix& p, const Vector& beta,
                      const ConfusionCounts& counts) {
  const int k = p.k();
  check_beta(beta, k);
  if (counts.k() != k) {
    fail(ErrorKind::DimensionMismatch, "counts dimension must match K");
  }
  double ll = 0.0;
  for (int g = 0; g < k; ++g) {
    for (int h = 0; h < k; ++h) {
      const double n = counts.cell(g, h);
      if (n == 0.0) {
        continue;
      }
      const double cell_prob = p(g, h) * beta(g);
      if (cell_prob <= 0.0) {
        return -std::numeric_limits<double>::infinity();
      }
      ll += n * (std::log(p(g, h)) + std::log(beta(g)));
    }
  }
  return ll;
}

std::pair<ContingencyMatrix, Vector> posterior_mean(const PosteriorSpec& spec) {
  const Matrix& a = spec.posterior().alpha();
  Matrix rows = a.array().colwise() / a.rowwise().sum().array();
  Vector beta = spec.posterior().gamma() / spec.posterior().gamma().sum();
  return {ContingencyMatrix::validated(std::move(rows)), std::move(beta)};
}

double fim_log_det(const ContingencyMatrix& p, const Vector& beta) {
  const int k = p.k();
  check_beta(beta, k);
  double log_det = 0.0;
  for (int g = 0; g < k; ++g) {
    for (int h = 0; h < k; ++h) {
      if (p(g, h) <= 0.0) {
        fail(ErrorKind::BoundaryParameter,
             "Fisher information requires all p_gh > 0");
      }
      log_det -= std::log(p(g, h));
    }
  }
  for (int g = 0; g < k; ++g) {
    if (beta(g) <= 0.0) {
      fail(ErrorKind::BoundaryParameter,
           "Fisher information requires all beta_g > 0");
    }
    log_det += (k - 2) * std::log(beta(g));
  }
  return log_det;
}

double log_density_rows(const DirichletProduct& d, const ContingencyMatrix& p) {
  if (d.k() != p.k()) {
    fail(ErrorKind::DimensionMismatch, "density dimensions differ");
  }
  double ld = 0.0;
  for (int g = 0; g < d.k(); ++g) {
    ld += dirichlet_log_density(d.alpha().row(g).transpose(),
                                p.matrix().row(g).transpose());
  }
  return ld;
}

double log_density_beta(const DirichletProduct& d, const Vector& beta) {
  check_beta(beta, d.k());
  return dirichlet_log_density(d.gamma(), beta);
}

double log_density(const DirichletProduct& d, const ContingencyMatrix& p,
                   const Vector& beta) {
  return log_density_rows(d, p) + log_density_beta(d, beta);
}

}  // namespace aggcorrect

#pragma once

#include <vector>

#include "graphssl/graph.hpp"
#include "graphssl/prior.hpp"

namespace graphssl {

/// Log-likelihood of the labeled nodes for a fixed dataset.
///
/// Regression: -sum (y_i - u_i)^2 / (2 delta^2). Classification: sum y_i log p_i + (1 - y_i) log(1 - p_i)
/// with p = link(u) clamped to [1e-12, 1 - 1e-12]. Additive constants are dropped.
class Likelihood {
 public:
  explicit Likelihood(const Dataset& dataset, Link link = Link::logistic);

  TaskKind task() const { return task_; }
  Link link() const { return link_; }
  double noise_std() const { return noise_std_; }
  Index size() const { return size_; }
  const std::vector<Index>& nodes() const { return nodes_; }
  const Vector& values() const { return values_; }
  Index label_count() const { return static_cast<Index>(nodes_.size()); }

  double operator()(const Vector& u) const;
  // Same, from the latent values at the labeled nodes only (in label order).
  double from_labeled(const Vector& u_labeled) const;
  // d/du, zero at unlabeled nodes.
  Vector gradient(const Vector& u) const;
  // Diagonal of the Hessian (the Hessian is diagonal); nonpositive.
  Vector hessian_diagonal(const Vector& u) const;

  Vector labeled_values(const Vector& u) const;

 private:
  // Per-label term and its first two derivatives in the latent value t.
  double term(double t, double y) const;
  double term_derivative(double t, double y) const;
  double term_second_derivative(double t, double y) const;

  TaskKind task_;
  Link link_;
  double noise_std_;
  Index size_;
  std::vector<Index> nodes_;
  Vector values_;
};

double log_likelihood(const Likelihood& likelihood, const Vector& u);

struct GaussianPosterior {
  Vector mean;
  Matrix covariance;
};

/// Conjugate regression posterior for the prior covariance C = c (tau I + L)^{-s}, formed
/// from a dense eigendecomposition of L (N <= 512). Independent of any Spectrum object.
GaussianPosterior exact_gaussian_posterior(const Laplacian& laplacian, double tau, double s,
                                           const Dataset& dataset, double covariance_scale = 1.0);

/// Same for the covariance the prior object represents (truncated or not). Dense, N <= 512.
GaussianPosterior exact_gaussian_posterior(const MaternPrior& prior, const Dataset& dataset);

/// Posterior mean only: m = C H^T (delta^2 I + H C H^T)^{-1} y, with C applied through the prior.
/// No size limit; cost is n applications of C.
Vector conjugate_posterior_mean(const MaternPrior& prior, const Dataset& dataset);

struct MapOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
  int max_halvings = 30;
  double armijo = 1e-4;
};

struct MapResult {
  Vector u;
  int iterations = 0;
  double gradient_norm = 0.0;       // max-norm of the u-space gradient at u
  std::vector<double> objective;    // log L(u) - 1/2 u^T C^{-1} u after each accepted step
};

/// Posterior mode in latent u-space. Regression: the conjugate mean. Classification: damped
/// Newton on log L(u) - 1/2 u^T C^{-1} u.
MapResult map_solve(const MaternPrior& prior, const Dataset& dataset, Link link = Link::logistic,
                    const MapOptions& options = {});
Vector map_estimate(const MaternPrior& prior, const Dataset& dataset, Link link = Link::logistic,
                    const MapOptions& options = {});

}  // namespace graphssl

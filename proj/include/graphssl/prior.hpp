#pragma once

#include <memory>
#include <span>
#include <variant>

#include "graphssl/graph.hpp"
#include "graphssl/spectral.hpp"

namespace graphssl {

/// Graph Matern Gaussian prior N(0, c (diag(tau) + L)^{-s}).
///
/// Stationary priors (scalar tau) are represented through a truncated eigen-expansion of L;
/// nonstationary priors (per-node tau) through a sparse factorization of diag(tau) + L.
/// The covariance scale c is 1 for the literal graph prior. Continuum studies use c = N,
/// which normalizes eigenvectors in L^2 of the empirical measure instead of R^N.
class MaternPrior {
 public:
  static MaternPrior stationary(std::shared_ptr<const Spectrum> spectrum, double tau, double s,
                                Index truncation, double covariance_scale = 1.0);
  static MaternPrior nonstationary(std::shared_ptr<const Laplacian> laplacian, Vector tau, double s,
                                   double covariance_scale = 1.0);

  bool is_stationary() const { return std::holds_alternative<double>(tau_); }
  Index size() const;
  double smoothness() const { return s_; }
  double covariance_scale() const { return covariance_scale_; }
  // Scalar tau; throws for nonstationary priors.
  double tau() const;
  const Vector& tau_vector() const;
  Index truncation() const { return truncation_; }
  const Spectrum& spectrum() const;
  const Laplacian& laplacian() const;

  // Standard deviations sqrt(c) (tau + lambda_i)^{-s/2} of the first `truncation` modes.
  Vector coefficient_scales() const;
  // sum_i c (tau + lambda_i)^{-s} psi_i(j)^2 over the retained modes.
  Vector marginal_variance() const;
  // u = sum_i sqrt(c) (tau + lambda_i)^{-s/2} xi_i psi_i.
  Vector field_from_coefficients(const Vector& xi) const;
  // Upper bound on sum_{i>k} (tau+lambda_i)^{-s} / sum_i (tau+lambda_i)^{-s} using lambda_i >= lambda_k.
  double truncation_tail_bound() const;
  // C x for the prior covariance C (truncated expansion or c (diag(tau) + L)^{-s}).
  Vector apply_covariance(const Vector& x) const;

  struct Factorization;  // sparse route for nonstationary sampling

 private:
  MaternPrior() = default;

  std::variant<double, Vector> tau_;
  double s_ = 0.0;
  double covariance_scale_ = 1.0;
  Index truncation_ = 0;
  std::shared_ptr<const Spectrum> spectrum_;
  std::shared_ptr<const Laplacian> laplacian_;
  std::shared_ptr<const Factorization> factorization_;
  friend Vector sample_prior_nonstationary(const MaternPrior& prior, Rng& rng);
  friend Vector sample_prior_nonstationary_from_noise(const MaternPrior& prior, const Vector& w);
  friend double prior_log_density(const MaternPrior& prior, const Vector& u);
};

/// Karhunen-Loeve draw for stationary priors; nonstationary priors are redirected.
Vector sample_prior(const MaternPrior& prior, Rng& rng);

/// Draw from N(0, c (diag(tau) + L)^{-s}): integer s through repeated sparse solves,
/// other s through a dense fractional power when N <= 512.
Vector sample_prior_nonstationary(const MaternPrior& prior, Rng& rng);
Vector sample_prior_nonstationary_from_noise(const MaternPrior& prior, const Vector& w);

/// Unnormalized log density -1/2 u^T (tau I + L)^s u / c (additive constant omitted).
double prior_log_density(const MaternPrior& prior, const Vector& u);

enum class Link { logistic, probit };

inline constexpr double kProbabilityFloor = 1e-12;

double link_value(double t, Link link);
// Elementwise link, clamped to [1e-12, 1 - 1e-12].
Vector classification_transform(const Vector& u, Link link);

}  // namespace graphssl

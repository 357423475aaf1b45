#include "graphssl/prior.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SparseCholesky>

#include "graphssl/error.hpp"

namespace graphssl {

struct MaternPrior::Factorization {
  // Integer s: A = diag(tau) + L factored once, A^{-1} applied repeatedly.
  Eigen::SimplicialLLT<SparseMatrix> llt;
  // Non-integer s at small N: dense A^{-s/2}.
  Matrix dense_root;
  bool integer_power = true;
  int power = 0;
};

namespace {

bool is_integer(double s) { return std::abs(s - std::round(s)) < 1e-12; }

void check_smoothness(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("smoothness s must be positive");
}

}  // namespace

MaternPrior MaternPrior::stationary(std::shared_ptr<const Spectrum> spectrum, double tau, double s,
                                    Index truncation, double covariance_scale) {
  if (!spectrum) throw InvalidArgument("stationary prior needs a spectrum");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive");
  check_smoothness(s);
  if (truncation < 1 || truncation > spectrum->count()) {
    throw InvalidArgument("truncation " + std::to_string(truncation) + " exceeds the " +
                          std::to_string(spectrum->count()) + " available modes");
  }
  if (!(covariance_scale > 0.0)) throw InvalidArgument("covariance scale must be positive");
  MaternPrior prior;
  prior.tau_ = tau;
  prior.s_ = s;
  prior.truncation_ = truncation;
  prior.covariance_scale_ = covariance_scale;
  prior.spectrum_ = std::move(spectrum);
  return prior;
}

MaternPrior MaternPrior::nonstationary(std::shared_ptr<const Laplacian> laplacian, Vector tau, double s,
                                       double covariance_scale) {
  if (!laplacian) throw InvalidArgument("nonstationary prior needs a Laplacian");
  const Index n = laplacian->size();
  if (tau.size() != n) throw InvalidArgument("tau vector length must equal N");
  if (!(tau.array() > 0.0).all() || !tau.allFinite()) throw InvalidArgument("all tau entries must be positive");
  check_smoothness(s);
  if (!(covariance_scale > 0.0)) throw InvalidArgument("covariance scale must be positive");

  auto factorization = std::make_shared<Factorization>();
  SparseMatrix a = laplacian->matrix();
  for (Index i = 0; i < n; ++i) a.coeffRef(i, i) += tau[i];
  if (is_integer(s)) {
    factorization->integer_power = true;
    factorization->power = static_cast<int>(std::lround(s));
    factorization->llt.compute(a);
    if (factorization->llt.info() != Eigen::Success) {
      throw NumericalError("diag(tau) + L is not positive definite");
    }
  } else {
    if (n > 512) {
      throw Unsupported("non-integer smoothness with a per-node tau is only supported for N <= 512");
    }
    factorization->integer_power = false;
    Eigen::SelfAdjointEigenSolver<Matrix> eig{Matrix(a)};
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
      throw NumericalError("diag(tau) + L is not positive definite");
    }
    factorization->dense_root = eig.eigenvectors() *
                                eig.eigenvalues().array().pow(-0.5 * s).matrix().asDiagonal() *
                                eig.eigenvectors().transpose();
  }

  MaternPrior prior;
  prior.tau_ = std::move(tau);
  prior.s_ = s;
  prior.truncation_ = n;
  prior.covariance_scale_ = covariance_scale;
  prior.laplacian_ = std::move(laplacian);
  prior.factorization_ = std::move(factorization);
  return prior;
}

Index MaternPrior::size() const { return is_stationary() ? spectrum_->size() : laplacian_->size(); }

double MaternPrior::tau() const {
  if (!is_stationary()) throw InvalidArgument("prior has a per-node tau");
  return std::get<double>(tau_);
}

const Vector& MaternPrior::tau_vector() const {
  if (is_stationary()) throw InvalidArgument("prior has a scalar tau");
  return std::get<Vector>(tau_);
}

const Spectrum& MaternPrior::spectrum() const {
  if (!spectrum_) throw InvalidArgument("nonstationary prior has no spectrum");
  return *spectrum_;
}

const Laplacian& MaternPrior::laplacian() const {
  if (!laplacian_) throw InvalidArgument("stationary prior holds a spectrum, not a Laplacian");
  return *laplacian_;
}

Vector MaternPrior::coefficient_scales() const {
  const double t = tau();
  const Vector lambda = spectrum_->eigenvalues().head(truncation_);
  return std::sqrt(covariance_scale_) * (t + lambda.array().max(0.0)).pow(-0.5 * s_).matrix();
}

Vector MaternPrior::marginal_variance() const {
  const Vector scales = coefficient_scales();
  const auto psi = spectrum_->eigenvectors().leftCols(truncation_);
  return psi.array().square().matrix() * scales.array().square().matrix();
}

Vector MaternPrior::field_from_coefficients(const Vector& xi) const {
  if (xi.size() != truncation_) {
    throw InvalidArgument("expected " + std::to_string(truncation_) + " coefficients");
  }
  return spectrum_->eigenvectors().leftCols(truncation_) * coefficient_scales().cwiseProduct(xi);
}

double MaternPrior::truncation_tail_bound() const {
  const Index n = size();
  if (truncation_ >= n) return 0.0;
  const double t = tau();
  const Vector lambda = spectrum_->eigenvalues().head(truncation_).array().max(0.0);
  const double retained = (t + lambda.array()).pow(-s_).sum();
  const double tail = static_cast<double>(n - truncation_) * std::pow(t + lambda[truncation_ - 1], -s_);
  return tail / retained;
}

Vector MaternPrior::apply_covariance(const Vector& x) const {
  if (x.size() != size()) throw InvalidArgument("vector length must equal N");
  if (is_stationary()) {
    const auto psi = spectrum_->eigenvectors().leftCols(truncation_);
    const Vector scales = coefficient_scales();
    return psi * (scales.array().square() * (psi.transpose() * x).array()).matrix();
  }
  const auto& f = *factorization_;
  Vector y = x;
  if (f.integer_power) {
    for (int i = 0; i < f.power; ++i) y = f.llt.solve(y);
  } else {
    y = f.dense_root * (f.dense_root * y);
  }
  return covariance_scale_ * y;
}

Vector sample_prior(const MaternPrior& prior, Rng& rng) {
  if (!prior.is_stationary()) return sample_prior_nonstationary(prior, rng);
  return prior.field_from_coefficients(standard_normal(prior.truncation(), rng));
}

Vector sample_prior_nonstationary_from_noise(const MaternPrior& prior, const Vector& w) {
  if (prior.is_stationary()) throw InvalidArgument("prior has a scalar tau; use sample_prior");
  const auto& f = *prior.factorization_;
  if (w.size() != prior.size()) throw InvalidArgument("noise length must equal N");
  Vector u;
  if (f.integer_power) {
    if (f.power % 2 == 1) {
      // v = P^{-1} U^{-1} w has covariance A^{-1}.
      Vector z = f.llt.matrixU().solve(w);
      u = f.llt.permutationPinv() * z;
    } else {
      u = w;
    }
    for (int i = 0; i < f.power / 2; ++i) u = f.llt.solve(u);
  } else {
    u = f.dense_root * w;
  }
  return std::sqrt(prior.covariance_scale()) * u;
}

Vector sample_prior_nonstationary(const MaternPrior& prior, Rng& rng) {
  return sample_prior_nonstationary_from_noise(prior, standard_normal(prior.size(), rng));
}

double prior_log_density(const MaternPrior& prior, const Vector& u) {
  if (u.size() != prior.size()) throw InvalidArgument("field length must equal N");
  if (prior.is_stationary()) {
    if (prior.truncation() < prior.size()) {
      throw InvalidArgument("log density of a truncated prior is degenerate; use truncation = N");
    }
    const Vector coeffs = prior.spectrum().eigenvectors().transpose() * u;
    const Vector lambda = prior.spectrum().eigenvalues().array().max(0.0);
    const double q = ((prior.tau() + lambda.array()).pow(prior.smoothness()) * coeffs.array().square()).sum();
    return -0.5 * q / prior.covariance_scale();
  }
  const auto& f = *prior.factorization_;
  if (!f.integer_power) throw InvalidArgument("log density with a per-node tau needs integer s");
  const SparseMatrix& l = prior.laplacian().matrix();
  const Vector& tau = prior.tau_vector();
  auto apply = [&](const Vector& x) -> Vector { return l * x + tau.cwiseProduct(x); };
  Vector x = u;
  for (int i = 0; i < f.power / 2; ++i) x = apply(x);
  const double q = (f.power % 2 == 1) ? x.dot(apply(x)) : x.squaredNorm();
  return -0.5 * q / prior.covariance_scale();
}

double link_value(double t, Link link) {
  double p = 0.0;
  switch (link) {
    case Link::logistic:
      p = t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
      break;
    case Link::probit:
      p = 0.5 * std::erfc(-t / std::numbers::sqrt2);
      break;
  }
  return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

Vector classification_transform(const Vector& u, Link link) {
  return u.unaryExpr([link](double t) { return link_value(t, link); });
}

}  // namespace graphssl

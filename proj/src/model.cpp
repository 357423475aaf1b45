#include "graphssl/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "graphssl/error.hpp"

namespace graphssl {

namespace {

double raw_link(double t, Link link) {
  if (link == Link::logistic) {
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  }
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

bool clamped(double p) { return p < kProbabilityFloor || p > 1.0 - kProbabilityFloor; }

void require_regression(const Dataset& dataset) {
  if (dataset.task() != TaskKind::regression) {
    throw Unsupported("the conjugate posterior exists only for regression (classification has no conjugacy)");
  }
}

// Woodbury form of the conjugate update; valid for singular C (truncated priors).
GaussianPosterior posterior_from_covariance(const Matrix& c, const Dataset& dataset) {
  const Index n = dataset.label_count();
  GaussianPosterior post;
  if (n == 0) {
    post.mean = Vector::Zero(c.rows());
    post.covariance = c;
    return post;
  }
  Matrix k(c.rows(), n);
  Matrix s(n, n);
  Vector y(n);
  const double d2 = dataset.noise_std() * dataset.noise_std();
  for (Index a = 0; a < n; ++a) {
    const Index i = dataset.labels()[a].node;
    k.col(a) = c.col(i);
    y[a] = dataset.labels()[a].value;
  }
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) s(a, b) = k(dataset.labels()[a].node, b);
  }
  s = 0.5 * (s + s.transpose()).eval();
  s.diagonal().array() += d2;
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) throw NumericalError("conjugate update matrix is not positive definite");
  post.mean = k * llt.solve(y);
  post.covariance = c - k * llt.solve(k.transpose());
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose()).eval();
  return post;
}

void require_dense_size(Index n) {
  if (n > 512) throw Unsupported("dense conjugate posterior is limited to N <= 512");
}

}  // namespace

Likelihood::Likelihood(const Dataset& dataset, Link link)
    : task_(dataset.task()), link_(link), noise_std_(dataset.noise_std()), size_(dataset.size()) {
  nodes_.reserve(dataset.labels().size());
  values_.resize(dataset.label_count());
  for (Index a = 0; a < dataset.label_count(); ++a) {
    nodes_.push_back(dataset.labels()[a].node);
    values_[a] = dataset.labels()[a].value;
  }
}

double Likelihood::term(double t, double y) const {
  if (task_ == TaskKind::regression) {
    const double r = y - t;
    return -r * r / (2.0 * noise_std_ * noise_std_);
  }
  // y log p + (1 - y) log(1 - p) = log link(+-t) for y in {0, 1}; the links are symmetric.
  const double sign = y > 0.5 ? 1.0 : -1.0;
  return std::log(link_value(sign * t, link_));
}

double Likelihood::term_derivative(double t, double y) const {
  if (task_ == TaskKind::regression) return (y - t) / (noise_std_ * noise_std_);
  const double sign = y > 0.5 ? 1.0 : -1.0;
  const double p = raw_link(sign * t, link_);
  if (clamped(p)) return 0.0;
  if (link_ == Link::logistic) return sign * (1.0 - p);
  const double density = std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
  return sign * density / p;
}

double Likelihood::term_second_derivative(double t, double y) const {
  if (task_ == TaskKind::regression) return -1.0 / (noise_std_ * noise_std_);
  const double sign = y > 0.5 ? 1.0 : -1.0;
  const double p = raw_link(sign * t, link_);
  if (clamped(p)) return 0.0;
  if (link_ == Link::logistic) return -p * (1.0 - p);
  const double ratio = std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi) / p;
  return -ratio * (sign * t + ratio);
}

double Likelihood::operator()(const Vector& u) const {
  if (u.size() != size_) throw InvalidArgument("field length must equal N");
  double total = 0.0;
  for (std::size_t a = 0; a < nodes_.size(); ++a) total += term(u[nodes_[a]], values_[static_cast<Index>(a)]);
  return total;
}

double Likelihood::from_labeled(const Vector& u_labeled) const {
  if (u_labeled.size() != label_count()) throw InvalidArgument("expected one value per label");
  double total = 0.0;
  for (Index a = 0; a < label_count(); ++a) total += term(u_labeled[a], values_[a]);
  return total;
}

Vector Likelihood::gradient(const Vector& u) const {
  if (u.size() != size_) throw InvalidArgument("field length must equal N");
  Vector g = Vector::Zero(size_);
  for (std::size_t a = 0; a < nodes_.size(); ++a) {
    g[nodes_[a]] = term_derivative(u[nodes_[a]], values_[static_cast<Index>(a)]);
  }
  return g;
}

Vector Likelihood::hessian_diagonal(const Vector& u) const {
  if (u.size() != size_) throw InvalidArgument("field length must equal N");
  Vector h = Vector::Zero(size_);
  for (std::size_t a = 0; a < nodes_.size(); ++a) {
    h[nodes_[a]] = term_second_derivative(u[nodes_[a]], values_[static_cast<Index>(a)]);
  }
  return h;
}

Vector Likelihood::labeled_values(const Vector& u) const {
  Vector out(label_count());
  for (Index a = 0; a < label_count(); ++a) out[a] = u[nodes_[static_cast<std::size_t>(a)]];
  return out;
}

double log_likelihood(const Likelihood& likelihood, const Vector& u) { return likelihood(u); }

GaussianPosterior exact_gaussian_posterior(const Laplacian& laplacian, double tau, double s,
                                           const Dataset& dataset, double covariance_scale) {
  require_regression(dataset);
  const Index n = laplacian.size();
  require_dense_size(n);
  if (dataset.size() != n) throw InvalidArgument("dataset size does not match the Laplacian");
  if (!(tau > 0.0) || !(s > 0.0) || !(covariance_scale > 0.0)) {
    throw InvalidArgument("tau, s and the covariance scale must be positive");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian.dense());
  if (eig.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
  const Vector weights = (tau + eig.eigenvalues().array().max(0.0)).pow(-s) * covariance_scale;
  const Matrix c = eig.eigenvectors() * weights.asDiagonal() * eig.eigenvectors().transpose();
  return posterior_from_covariance(c, dataset);
}

GaussianPosterior exact_gaussian_posterior(const MaternPrior& prior, const Dataset& dataset) {
  require_regression(dataset);
  const Index n = prior.size();
  require_dense_size(n);
  if (dataset.size() != n) throw InvalidArgument("dataset size does not match the prior");
  Matrix c(n, n);
  for (Index j = 0; j < n; ++j) c.col(j) = prior.apply_covariance(Vector::Unit(n, j));
  c = 0.5 * (c + c.transpose()).eval();
  return posterior_from_covariance(c, dataset);
}

Vector conjugate_posterior_mean(const MaternPrior& prior, const Dataset& dataset) {
  require_regression(dataset);
  const Index n = prior.size();
  if (dataset.size() != n) throw InvalidArgument("dataset size does not match the prior");
  const Index m = dataset.label_count();
  if (m == 0) return Vector::Zero(n);
  Matrix k(n, m);
  Vector y(m);
  for (Index a = 0; a < m; ++a) {
    k.col(a) = prior.apply_covariance(Vector::Unit(n, dataset.labels()[a].node));
    y[a] = dataset.labels()[a].value;
  }
  Matrix s(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) s(a, b) = k(dataset.labels()[a].node, b);
  }
  s = 0.5 * (s + s.transpose()).eval();
  s.diagonal().array() += dataset.noise_std() * dataset.noise_std();
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) throw NumericalError("conjugate update matrix is not positive definite");
  return k * llt.solve(y);
}

// Newton iterates started at u = 0 stay in the span of C H^T (representer form u = C H^T a), so
// the iteration is carried out on the n label coefficients a. The u-space gradient of the
// objective is H^T (dlogL - a), which gives the stopping rule.
MapResult map_solve(const MaternPrior& prior, const Dataset& dataset, Link link, const MapOptions& options) {
  const Index n = prior.size();
  if (dataset.size() != n) throw InvalidArgument("dataset size does not match the prior");
  MapResult result;
  if (dataset.task() == TaskKind::regression) {
    result.u = conjugate_posterior_mean(prior, dataset);
    result.iterations = 1;
    return result;
  }
  const Likelihood likelihood(dataset, link);
  const Index m = likelihood.label_count();
  if (m == 0) {
    result.u = Vector::Zero(n);
    return result;
  }

  Matrix k(n, m);
  for (Index a = 0; a < m; ++a) k.col(a) = prior.apply_covariance(Vector::Unit(n, likelihood.nodes()[a]));
  Matrix kh(m, m);
  for (Index a = 0; a < m; ++a) kh.row(a) = k.row(likelihood.nodes()[a]);
  kh = 0.5 * (kh + kh.transpose()).eval();

  auto derivatives = [&](const Vector& f, Vector& g, Vector& h) {
    Vector full = Vector::Zero(n);
    for (Index a = 0; a < m; ++a) full[likelihood.nodes()[a]] = f[a];
    g = likelihood.labeled_values(likelihood.gradient(full));
    h = likelihood.labeled_values(likelihood.hessian_diagonal(full));
  };
  auto objective = [&](const Vector& a) {
    const Vector f = kh * a;
    return likelihood.from_labeled(f) - 0.5 * a.dot(f);
  };

  Vector a = Vector::Zero(m);
  double current = objective(a);
  Vector g, h;
  int it = 0;
  for (;; ++it) {
    const Vector f = kh * a;
    derivatives(f, g, h);
    const Vector residual = g - a;
    result.gradient_norm = residual.lpNorm<Eigen::Infinity>();
    if (result.gradient_norm < options.gradient_tolerance) break;
    if (it >= options.max_iterations) {
      std::ostringstream msg;
      msg << "MAP Newton stopped after " << it << " iterations with gradient norm " << result.gradient_norm;
      warn(msg.str());
      break;
    }
    // Stable Newton update with B = I + S K S, S = sqrt(-h).
    const Vector sw = (-h).cwiseMax(0.0).cwiseSqrt();
    Matrix b = sw.asDiagonal() * kh * sw.asDiagonal();
    b.diagonal().array() += 1.0;
    Eigen::LLT<Matrix> llt(b);
    if (llt.info() != Eigen::Success) throw NumericalError("Newton system is not positive definite");
    const Vector rhs = (-h).cwiseProduct(f) + g;
    const Vector target = rhs - sw.cwiseProduct(llt.solve(sw.cwiseProduct(kh * rhs)));
    const Vector step = target - a;
    const double slope = (kh * residual).dot(step);

    double t = 1.0;
    bool accepted = false;
    const double rounding = 1e-14 * std::max(1.0, std::abs(current));
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      const Vector trial = a + t * step;
      const double value = objective(trial);
      if (value >= current + options.armijo * t * slope - rounding) {
        a = trial;
        current = value;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "MAP Newton line search failed after " << options.max_halvings << " halvings (gradient norm "
          << result.gradient_norm << ")";
      throw NumericalError(msg.str());
    }
    result.objective.push_back(current);
  }
  result.iterations = it;
  result.u = k * a;
  return result;
}

Vector map_estimate(const MaternPrior& prior, const Dataset& dataset, Link link, const MapOptions& options) {
  return map_solve(prior, dataset, link, options).u;
}

}  // namespace graphssl

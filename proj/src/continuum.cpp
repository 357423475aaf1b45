#include "graphssl/continuum.hpp"

#include <memory>
#include <numbers>
#include <numeric>

#include "graphssl/error.hpp"
#include "graphssl/model.hpp"
#include "graphssl/prior.hpp"
#include "graphssl/transport.hpp"

namespace graphssl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_uniform(const Vector& w) {
  const double target = 1.0 / static_cast<double>(w.size());
  return ((w.array() - target).abs() <= 1e-14 * target).all();
}

Matrix ground_cost(const TL2Point& a, const TL2Point& b) {
  Matrix c(a.support.size(), b.support.size());
  for (Index i = 0; i < c.rows(); ++i) {
    for (Index j = 0; j < c.cols(); ++j) {
      const double d = CircleManifold::distance(a.support[i], b.support[j]);
      const double f = a.values[i] - b.values[j];
      c(i, j) = d * d + f * f;
    }
  }
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Matrix orthonormal_basis(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

}  // namespace

CircleHarmonics::CircleHarmonics(Index count) {
  if (count < 1) throw InvalidArgument("need at least one circle eigenpair");
  eigenvalues_.resize(count);
  for (Index i = 0; i < count; ++i) {
    const double k = static_cast<double>(frequency(i));
    eigenvalues_[i] = k * k;
  }
}

double CircleHarmonics::operator()(Index i, double angle) const {
  if (i < 0 || i >= count()) throw InvalidArgument("circle eigenfunction index out of range");
  if (i == 0) return 1.0;
  const double k = static_cast<double>(frequency(i));
  return std::numbers::sqrt2 * (i % 2 == 1 ? std::cos(k * angle) : std::sin(k * angle));
}

Matrix CircleHarmonics::evaluate(const Vector& angles) const {
  Matrix out(angles.size(), count());
  for (Index r = 0; r < angles.size(); ++r) {
    for (Index i = 0; i < count(); ++i) out(r, i) = (*this)(i, angles[r]);
  }
  return out;
}

CircleHarmonics circle_eigenpairs(Index count) { return CircleHarmonics(count); }

double CircleManifold::distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

TL2Point TL2Point::uniform(Vector angles, Vector values) {
  TL2Point p;
  const Index m = angles.size();
  p.support = std::move(angles);
  p.weights = Vector::Constant(m, m > 0 ? 1.0 / static_cast<double>(m) : 0.0);
  p.values = std::move(values);
  p.validate();
  return p;
}

void TL2Point::validate() const {
  if (support.size() == 0) throw InvalidArgument("TL2 point has an empty support");
  if (weights.size() != support.size() || values.size() != support.size()) {
    throw InvalidArgument("TL2 support, weights and values must have equal lengths");
  }
  if (!support.allFinite() || (support.array() < 0.0).any() || (support.array() >= kTwoPi).any()) {
    throw InvalidArgument("circle support angles must lie in [0, 2 pi)");
  }
  if (!values.allFinite()) throw InvalidArgument("TL2 values must be finite");
  if (!weights.allFinite() || (weights.array() < 0.0).any()) {
    throw InvalidArgument("TL2 weights must be nonnegative");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw InvalidArgument("TL2 weights must sum to 1");
}

double tl2_distance(const TL2Point& a, const TL2Point& b, const CircleManifold&) {
  a.validate();
  b.validate();
  const Matrix cost = ground_cost(a, b);
  const Index ma = a.support.size();
  const Index mb = b.support.size();
  double total = 0.0;
  if (ma == mb && is_uniform(a.weights) && is_uniform(b.weights)) {
    total = solve_assignment(cost) / static_cast<double>(ma);
  } else if (is_uniform(a.weights) && is_uniform(b.weights)) {
    const long long g = std::gcd(static_cast<long long>(ma), static_cast<long long>(mb));
    const std::vector<long long> supply(static_cast<std::size_t>(ma), mb / g);
    const std::vector<long long> demand(static_cast<std::size_t>(mb), ma / g);
    total = solve_transport(supply, demand, cost) / static_cast<double>(ma * (mb / g));
  } else {
    total = solve_transport(a.weights, b.weights, cost);
  }
  return std::sqrt(std::max(total, 0.0));
}

Vector sample_circle_angles(Index n, Rng& rng) {
  if (n < 1) throw InvalidArgument("need at least one circle sample");
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  Vector out(n);
  for (Index i = 0; i < n; ++i) out[i] = angle(rng);
  return out;
}

Matrix circle_points(const Vector& angles) {
  Matrix xy(angles.size(), 2);
  xy.col(0) = angles.array().cos();
  xy.col(1) = angles.array().sin();
  return xy;
}

Graph circle_graph(const Vector& angles, double h) {
  return build_epsilon_graph(circle_points(angles), 1, h).scaled(kTwoPi);
}

double principal_angle(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw InvalidArgument("subspace bases must have the same row count");
  const Matrix qa = orthonormal_basis(a);
  const Matrix qb = orthonormal_basis(b);
  Eigen::JacobiSVD<Matrix> svd(qa.transpose() * qb);
  const double smallest = svd.singularValues().minCoeff();
  return std::acos(std::clamp(smallest, 0.0, 1.0));
}

SpectrumCheck graph_spectrum_vs_circle(Index n_points, Index k, double smoothness, std::uint64_t seed,
                                       const EigenOptions& options) {
  if (k < 1 || k > 10) throw InvalidArgument("spectrum check compares at most 10 modes");
  if (k > n_points) throw InvalidArgument("k exceeds the number of points");
  Rng rng(seed);
  const Vector angles = sample_circle_angles(n_points, rng);
  SpectrumCheck out;
  out.connectivity = default_connectivity(n_points, 1, smoothness);
  const Laplacian lap = laplacian(circle_graph(angles, out.connectivity));
  const Spectrum spectrum = eigendecompose(lap, k, options);
  const CircleHarmonics harmonics(k);
  out.eigenvalues = spectrum.eigenvalues();
  out.reference = harmonics.eigenvalues();
  out.relative_errors = spectral_convergence_report(
      spectrum, std::span<const double>(out.reference.data(), static_cast<std::size_t>(k)));
  const Matrix sampled = harmonics.evaluate(angles);
  for (Index f = 1; 2 * f < k; ++f) {
    out.subspace_angles.push_back(
        principal_angle(spectrum.eigenvectors().middleCols(2 * f - 1, 2), sampled.middleCols(2 * f - 1, 2)));
  }
  return out;
}

std::vector<DiscrepancyRow> coupled_prior_discrepancy(const std::vector<Index>& n_list,
                                                      const CoupledPriorConfig& config) {
  const Index b = config.modes;
  if (b < 1) throw InvalidArgument("truncation b must be at least 1");
  if (config.trials < 1) throw InvalidArgument("need at least one trial");
  if (config.grid < 1) throw InvalidArgument("continuum grid must be non-empty");
  if (!(config.tau > 0.0) || !(config.smoothness > 0.0)) throw InvalidArgument("tau and s must be positive");
  for (Index n : n_list) {
    if (n < b || n < 2) throw InvalidArgument("each N must be at least the truncation b");
  }

  const CircleHarmonics harmonics(b);
  const Vector continuum_scales = (config.tau + harmonics.eigenvalues().array()).pow(-0.5 * config.smoothness);
  Vector grid(config.grid);
  for (Index j = 0; j < config.grid; ++j) grid[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(config.grid);
  const Matrix grid_modes = harmonics.evaluate(grid);

  std::vector<DiscrepancyRow> rows;
  for (Index n : n_list) {
    std::vector<double> values;
    for (Index t = 0; t < config.trials; ++t) {
      const std::uint64_t trial_seed = derive_seed(config.seed, static_cast<std::uint64_t>(t));
      Rng noise_rng(derive_seed(trial_seed, 0));
      const Vector xi = standard_normal(b, noise_rng);
      Rng point_rng(derive_seed(trial_seed, 1 + static_cast<std::uint64_t>(n)));
      const Vector angles = sample_circle_angles(n, point_rng);

      const double h = default_connectivity(n, 1, config.smoothness);
      const Laplacian lap = laplacian(circle_graph(angles, h));
      const Spectrum spectrum = eigendecompose(lap, b);
      const Vector graph_scales = std::sqrt(static_cast<double>(n)) *
                                  (config.tau + spectrum.eigenvalues().array().max(0.0)).pow(-0.5 * config.smoothness);
      const Matrix node_modes = harmonics.evaluate(angles);

      Vector u_n = Vector::Zero(n);
      for (Index start = 0; start < b;) {
        const Index f = CircleHarmonics::frequency(start);
        const Index width = f == 0 ? 1 : std::min<Index>(2, b - start);
        const Matrix psi = spectrum.eigenvectors().middleCols(start, width);
        Eigen::JacobiSVD<Matrix> svd(psi.transpose() * node_modes.middleCols(start, width),
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Matrix q = svd.matrixU() * svd.matrixV().transpose();
        const Vector coeffs = q * xi.segment(start, width);
        u_n += psi * graph_scales.segment(start, width).cwiseProduct(coeffs);
        start += width;
      }
      const Vector u = grid_modes * continuum_scales.cwiseProduct(xi);
      const double d = tl2_distance(TL2Point::uniform(angles, u_n), TL2Point::uniform(grid, u));
      values.push_back(d * d);
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    DiscrepancyRow row;
    row.n_points = n;
    row.estimate = mean;
    row.standard_error =
        values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()))
                          : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ContractionRow> contraction_study(const std::vector<Index>& n_list, const ContractionConfig& config) {
  if (config.trials < 1) throw InvalidArgument("need at least one trial");
  if (!(config.noise_std >= 0.0)) throw InvalidArgument("noise standard deviation must be nonnegative");
  const double model_noise = config.noise_std > 0.0 ? config.noise_std : 1e-6;
  std::vector<ContractionRow> rows;
  for (Index n : n_list) {
    const Index n_points = config.points_for(n);
    if (n < 1 || n > n_points) throw InvalidArgument("label count must lie in [1, N]");
    ContractionRow row;
    row.labels = n;
    row.n_points = n_points;
    for (Index t = 0; t < config.trials; ++t) {
      Rng rng(derive_seed(derive_seed(config.seed, static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(t)));
      const Vector angles = sample_circle_angles(n_points, rng);
      std::vector<Index> order(static_cast<std::size_t>(n_points));
      std::iota(order.begin(), order.end(), Index{0});
      std::shuffle(order.begin(), order.end(), rng);
      std::normal_distribution<double> noise(0.0, 1.0);
      std::vector<Label> labels;
      for (Index a = 0; a < n; ++a) {
        const Index node = order[static_cast<std::size_t>(a)];
        labels.push_back({node, config.truth(angles[node]) + config.noise_std * noise(rng)});
      }
      const Dataset data = Dataset::regression(circle_points(angles), labels, model_noise);
      const double h = default_connectivity(n_points, 1, config.smoothness);
      auto lap = std::make_shared<const Laplacian>(laplacian(circle_graph(angles, h)));
      const double scale = static_cast<double>(n_points);
      Vector mean;
      if (n_points <= 512) {
        mean = exact_gaussian_posterior(*lap, config.tau, config.smoothness, data, scale).mean;
      } else {
        const MaternPrior prior =
            MaternPrior::nonstationary(lap, Vector::Constant(n_points, config.tau), config.smoothness, scale);
        mean = conjugate_posterior_mean(prior, data);
      }
      double sq = 0.0;
      for (const auto& label : labels) {
        const double e = mean[label.node] - config.truth(angles[label.node]);
        sq += e * e;
      }
      row.errors.push_back(std::sqrt(sq / static_cast<double>(n)));
    }
    row.median_error = median(row.errors);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace graphssl

#include "graphssl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "graphssl/error.hpp"

namespace graphssl {

namespace {

void require_finite(const Matrix& features) {
  if (!features.allFinite()) {
    for (Index i = 0; i < features.rows(); ++i) {
      if (!features.row(i).allFinite()) {
        throw InvalidArgument("feature row " + std::to_string(i) + " has a non-finite coordinate");
      }
    }
  }
}

void warn_if_disconnected(const Graph& g) {
  const Index components = g.component_count();
  if (components > 1) {
    warn("graph has " + std::to_string(components) +
         " connected components; prior correlations decouple across them");
  }
}

}  // namespace

Dataset::Dataset(Matrix features, std::vector<Label> labels, TaskKind task, double noise_std)
    : features_(std::move(features)), labels_(std::move(labels)), task_(task), noise_std_(noise_std) {
  if (features_.rows() == 0) throw InvalidArgument("dataset has no feature points");
  require_finite(features_);
  if (static_cast<Index>(labels_.size()) > features_.rows()) {
    throw InvalidArgument("more labels than feature points");
  }
  std::unordered_set<Index> seen;
  for (const auto& label : labels_) {
    if (label.node < 0 || label.node >= features_.rows()) {
      throw InvalidArgument("label index " + std::to_string(label.node) + " out of range [0, " +
                            std::to_string(features_.rows()) + ")");
    }
    if (!seen.insert(label.node).second) {
      throw InvalidArgument("duplicate label for node " + std::to_string(label.node));
    }
    if (!std::isfinite(label.value)) {
      throw InvalidArgument("non-finite label value at node " + std::to_string(label.node));
    }
    if (task_ == TaskKind::classification && label.value != 0.0 && label.value != 1.0) {
      throw InvalidArgument("classification label at node " + std::to_string(label.node) +
                            " must be 0 or 1");
    }
  }
  if (task_ == TaskKind::regression && !(noise_std_ > 0.0 && std::isfinite(noise_std_))) {
    throw InvalidArgument("regression noise standard deviation must be positive");
  }
}

Dataset Dataset::regression(Matrix features, std::vector<Label> labels, double noise_std) {
  return Dataset(std::move(features), std::move(labels), TaskKind::regression, noise_std);
}

Dataset Dataset::classification(Matrix features, std::vector<Label> labels) {
  return Dataset(std::move(features), std::move(labels), TaskKind::classification, 0.0);
}

Graph::Graph(SparseMatrix weights, GraphMeta meta) : weights_(std::move(weights)), meta_(std::move(meta)) {
  weights_.makeCompressed();
  if (weights_.rows() != weights_.cols()) throw InvalidArgument("weight matrix must be square");
  if (weights_.rows() < 1) throw InvalidArgument("graph must have at least one node");
  for (Index j = 0; j < weights_.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(weights_, j); it; ++it) {
      if (it.row() == it.col()) throw InvalidArgument("weight matrix must have a zero diagonal");
      if (!(it.value() > 0.0) || !std::isfinite(it.value())) {
        throw InvalidArgument("stored weights must be positive and finite");
      }
    }
  }
  SparseMatrix asym = weights_ - SparseMatrix(weights_.transpose());
  asym.prune(0.0);
  if (asym.nonZeros() != 0) throw InvalidArgument("weight matrix must be symmetric");
  if (weights_.nonZeros() == 0) throw InvalidArgument("graph has no edges");
}

Index Graph::component_count() const {
  const Index n = size();
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  Index components = 0;
  std::queue<Index> frontier;
  for (Index start = 0; start < n; ++start) {
    if (visited[start]) continue;
    ++components;
    visited[start] = 1;
    frontier.push(start);
    while (!frontier.empty()) {
      const Index j = frontier.front();
      frontier.pop();
      for (SparseMatrix::InnerIterator it(weights_, j); it; ++it) {
        if (!visited[it.row()]) {
          visited[it.row()] = 1;
          frontier.push(it.row());
        }
      }
    }
  }
  return components;
}

Graph Graph::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw InvalidArgument("scale factor must be positive");
  return Graph(weights_ * factor, meta_);
}

double unit_ball_volume(int m) {
  if (m < 1) throw InvalidArgument("dimension must be at least 1");
  return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

Graph build_epsilon_graph(const Matrix& features, int intrinsic_dim, double h) {
  const Index n = features.rows();
  if (n < 2) throw InvalidArgument("epsilon graph needs at least two points");
  if (intrinsic_dim < 1) throw InvalidArgument("intrinsic dimension must be at least 1");
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("connectivity h must be positive");
  require_finite(features);

  const double weight = 2.0 * (intrinsic_dim + 2) /
                        (static_cast<double>(n) * unit_ball_volume(intrinsic_dim) *
                         std::pow(h, intrinsic_dim + 2));
  const double h2 = h * h;

  // Sweep along the first coordinate; pairs further apart than h there cannot be neighbours.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return features(a, 0) < features(b, 0) || (features(a, 0) == features(b, 0) && a < b);
  });

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t a = 0; a < order.size(); ++a) {
    const Index i = order[a];
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const Index j = order[b];
      if (features(j, 0) - features(i, 0) >= h) break;
      if ((features.row(i) - features.row(j)).squaredNorm() < h2) {
        triplets.emplace_back(i, j, weight);
        triplets.emplace_back(j, i, weight);
      }
    }
  }
  if (triplets.empty()) {
    std::ostringstream msg;
    msg << "epsilon graph with h = " << h << " has no edges";
    throw InvalidArgument(msg.str());
  }
  SparseMatrix w(n, n);
  w.setFromTriplets(triplets.begin(), triplets.end());

  GraphMeta meta;
  meta.kind = GraphKind::epsilon;
  meta.intrinsic_dim = intrinsic_dim;
  meta.connectivity = h;
  meta.kernel = "indicator";
  Graph graph(std::move(w), meta);
  warn_if_disconnected(graph);
  return graph;
}

double default_connectivity(Index n_points, int intrinsic_dim, double smoothness) {
  if (n_points < 2) throw InvalidArgument("default connectivity needs N >= 2");
  if (intrinsic_dim < 1) throw InvalidArgument("intrinsic dimension must be at least 1");
  if (!(smoothness > 0.0)) throw InvalidArgument("smoothness s must be positive");
  const double n = static_cast<double>(n_points);
  const double c_m = intrinsic_dim == 2 ? 0.75 : 1.0 / intrinsic_dim;
  const double lower = std::pow(std::log(n), c_m) / std::pow(n, 1.0 / intrinsic_dim);
  const double h = std::sqrt(lower);
  const double upper = std::pow(n, -1.0 / (2.0 * smoothness));
  if (!(lower < h && h < upper)) {
    std::ostringstream msg;
    msg << "connectivity h = " << h << " outside the window (" << lower << ", " << upper
        << ") for N = " << n_points << ", m = " << intrinsic_dim << ", s = " << smoothness;
    warn(msg.str());
  }
  return h;
}

Graph build_knn_graph(const Matrix& features, int k, SquaredExponential kernel) {
  const Index n = features.rows();
  if (k < 1) throw InvalidArgument("k must be at least 1");
  if (k >= n) {
    throw InvalidArgument("k = " + std::to_string(k) + " must be smaller than N = " + std::to_string(n));
  }
  if (!(kernel.lengthscale > 0.0)) throw InvalidArgument("kernel lengthscale must be positive");
  require_finite(features);

  const double inv_l2 = 1.0 / (kernel.lengthscale * kernel.lengthscale);
  std::vector<std::pair<double, Index>> candidates(static_cast<std::size_t>(n - 1));
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * n * k));
  for (Index i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      candidates[c++] = {(features.row(i) - features.row(j)).squaredNorm(), j};
    }
    std::nth_element(candidates.begin(), candidates.begin() + (k - 1), candidates.end());
    for (int r = 0; r < k; ++r) {
      const auto [d2, j] = candidates[static_cast<std::size_t>(r)];
      const double w = std::exp(-d2 * inv_l2);
      triplets.emplace_back(i, j, w);
      triplets.emplace_back(j, i, w);
    }
  }
  // Union symmetrization: an edge found from both endpoints keeps a single weight.
  SparseMatrix w(n, n);
  w.setFromTriplets(triplets.begin(), triplets.end(), [](double a, double) { return a; });

  GraphMeta meta;
  meta.kind = GraphKind::knn;
  meta.neighbors = k;
  meta.kernel = "squared_exponential(" + std::to_string(kernel.lengthscale) + ")";
  Graph graph(std::move(w), meta);
  warn_if_disconnected(graph);
  return graph;
}

Laplacian::Laplacian(const SparseMatrix& weights) {
  if (weights.rows() != weights.cols()) throw InvalidArgument("weight matrix must be square");
  const Index n = weights.rows();
  degree_ = Vector::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(weights.nonZeros() + n));
  for (Index j = 0; j < weights.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(weights, j); it; ++it) {
      degree_[it.row()] += it.value();
      triplets.emplace_back(it.row(), it.col(), -it.value());
    }
  }
  for (Index i = 0; i < n; ++i) triplets.emplace_back(i, i, degree_[i]);
  matrix_.resize(n, n);
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();
}

double Laplacian::quadratic_form(const Vector& v) const {
  if (v.size() != size()) throw InvalidArgument("vector length does not match the Laplacian");
  return v.dot(matrix_ * v);
}

Laplacian laplacian(const Graph& graph) { return Laplacian(graph.weights()); }

double dirichlet_energy(const Graph& graph, const Vector& v) {
  if (v.size() != graph.size()) {
    throw InvalidArgument("vector length " + std::to_string(v.size()) + " does not match graph size " +
                          std::to_string(graph.size()));
  }
  if (!v.allFinite()) throw InvalidArgument("vector has non-finite entries");
  const SparseMatrix& w = graph.weights();
  double energy = 0.0;
  for (Index j = 0; j < w.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(w, j); it; ++it) {
      const double diff = v[it.row()] - v[it.col()];
      energy += it.value() * diff * diff;
    }
  }
  return 0.5 * energy;
}

}  // namespace graphssl

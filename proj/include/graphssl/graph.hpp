#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphssl/types.hpp"

namespace graphssl {

enum class TaskKind { regression, classification };

struct Label {
  Index node = 0;
  double value = 0.0;
};

/// Feature points (one row per point) together with the labeled subset.
///
/// Regression datasets carry the known noise standard deviation; classification
/// labels must be 0 or 1. Label nodes are distinct and index rows of `features`.
class Dataset {
 public:
  static Dataset regression(Matrix features, std::vector<Label> labels, double noise_std);
  static Dataset classification(Matrix features, std::vector<Label> labels);

  const Matrix& features() const { return features_; }
  Index size() const { return features_.rows(); }
  Index dimension() const { return features_.cols(); }
  const std::vector<Label>& labels() const { return labels_; }
  Index label_count() const { return static_cast<Index>(labels_.size()); }
  TaskKind task() const { return task_; }
  // Zero for classification datasets.
  double noise_std() const { return noise_std_; }

 private:
  Dataset(Matrix features, std::vector<Label> labels, TaskKind task, double noise_std);

  Matrix features_;
  std::vector<Label> labels_;
  TaskKind task_;
  double noise_std_;
};

enum class GraphKind { epsilon, knn };

struct GraphMeta {
  GraphKind kind = GraphKind::epsilon;
  int intrinsic_dim = 1;
  double connectivity = 0.0;  // h, epsilon graphs
  int neighbors = 0;          // k, knn graphs
  std::string kernel = "indicator";
};

/// Sparse symmetric similarity graph with zero diagonal and positive stored weights.
class Graph {
 public:
  Graph(SparseMatrix weights, GraphMeta meta);

  Index size() const { return weights_.rows(); }
  const SparseMatrix& weights() const { return weights_; }
  const GraphMeta& meta() const { return meta_; }
  Index edge_count() const { return weights_.nonZeros() / 2; }
  Index component_count() const;

  // Same topology with every weight multiplied by `factor` (> 0).
  Graph scaled(double factor) const;

 private:
  SparseMatrix weights_;
  GraphMeta meta_;
};

/// Volume of the unit ball in R^m.
double unit_ball_volume(int m);

/// Calibrated epsilon graph: W_ij = 2(m+2) / (N nu_m h^{m+2}) for i != j with |x_i - x_j| < h.
Graph build_epsilon_graph(const Matrix& features, int intrinsic_dim, double h);

/// h = ((log N)^{c_m} / N^{1/m})^{1/2}, c_m = 3/4 for m = 2 and 1/m otherwise.
/// Warns when h falls outside ((log N)^{c_m}/N^{1/m}, N^{-1/(2s)}).
double default_connectivity(Index n_points, int intrinsic_dim, double smoothness);

struct SquaredExponential {
  double lengthscale = 1.0;
};

/// Symmetrized (union) k-nearest-neighbour graph with weights exp(-|x_i - x_j|^2 / l^2).
Graph build_knn_graph(const Matrix& features, int k, SquaredExponential kernel = {});

/// Unnormalized graph Laplacian L = D - W.
class Laplacian {
 public:
  // Accepts any symmetric nonnegative weight matrix, including the empty graph.
  explicit Laplacian(const SparseMatrix& weights);

  Index size() const { return matrix_.rows(); }
  const SparseMatrix& matrix() const { return matrix_; }
  const Vector& degree() const { return degree_; }
  Matrix dense() const { return Matrix(matrix_); }
  double quadratic_form(const Vector& v) const;

 private:
  SparseMatrix matrix_;
  Vector degree_;
};

Laplacian laplacian(const Graph& graph);

/// (1/2) sum_ij W_ij (v_i - v_j)^2, computed edge by edge.
double dirichlet_energy(const Graph& graph, const Vector& v);

}  // namespace graphssl

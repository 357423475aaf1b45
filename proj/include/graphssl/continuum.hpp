#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "graphssl/graph.hpp"
#include "graphssl/spectral.hpp"

namespace graphssl {

/// Eigenpairs of -Laplacian on the unit circle, L^2-orthonormal for the uniform probability
/// measure: index 0 is the constant 1 (eigenvalue 0); indices 2k-1, 2k are sqrt(2) cos(k t),
/// sqrt(2) sin(k t) with eigenvalue k^2.
class CircleHarmonics {
 public:
  explicit CircleHarmonics(Index count);

  Index count() const { return eigenvalues_.size(); }
  const Vector& eigenvalues() const { return eigenvalues_; }
  // Frequency k of mode i.
  static Index frequency(Index i) { return (i + 1) / 2; }
  double operator()(Index i, double angle) const;
  // angles.size() x count matrix of eigenfunction values.
  Matrix evaluate(const Vector& angles) const;

 private:
  Vector eigenvalues_;
};

CircleHarmonics circle_eigenpairs(Index count);

/// Unit circle with its arc-length metric; angles are taken modulo 2 pi.
struct CircleManifold {
  static double distance(double a, double b);
};

/// A point of TL^2: a discrete probability measure on the circle with a function on its support.
struct TL2Point {
  Vector support;  // angles in [0, 2 pi)
  Vector weights;  // nonnegative, summing to 1
  Vector values;

  static TL2Point uniform(Vector angles, Vector values);
  void validate() const;
};

/// d_TL2 with ground cost d(x, y)^2 + |f(x) - g(y)|^2, solved exactly (assignment for equal-size
/// uniform measures, network simplex otherwise).
double tl2_distance(const TL2Point& a, const TL2Point& b, const CircleManifold& manifold = {});

Vector sample_circle_angles(Index n, Rng& rng);
// N x 2 embedding (cos, sin).
Matrix circle_points(const Vector& angles);

/// Calibrated epsilon graph on circle samples, with weights multiplied by the circle length 2 pi
/// so the Laplacian approximates -d^2/dt^2 (eigenvalues 0, 1, 1, 4, 4, ...).
Graph circle_graph(const Vector& angles, double h);

struct SpectrumCheck {
  double connectivity = 0.0;
  Vector eigenvalues;      // graph, first k
  Vector reference;        // circle, first k
  Vector relative_errors;  // spectral_convergence_report
  // Largest principal angle between the graph eigenspace of frequency f (columns 2f-1, 2f) and
  // span{cos f t, sin f t} at the nodes, for every complete pair inside the first k modes.
  std::vector<double> subspace_angles;
};

SpectrumCheck graph_spectrum_vs_circle(Index n_points, Index k, double smoothness, std::uint64_t seed,
                                       const EigenOptions& options = {});

/// Largest principal angle between the column spans of a and b (same row count).
double principal_angle(const Matrix& a, const Matrix& b);

struct CoupledPriorConfig {
  double tau = 1.0;
  double smoothness = 4.0;
  Index modes = 16;          // b
  Index trials = 50;
  Index grid = 2048;         // continuum reference grid
  std::uint64_t seed = 0;
};

struct DiscrepancyRow {
  Index n_points = 0;
  double estimate = 0.0;        // mean over trials of d_TL2(u_N, u)^2
  double standard_error = 0.0;
};

/// Monte Carlo estimate of E d_TL2(u_N, u)^2 with shared Gaussian coefficients. Graph modes are
/// normalized in L^2 of the empirical measure (covariance scale N), and inside each degenerate
/// circle eigenspace the graph eigenvectors are rotated onto the harmonics (orthogonal
/// Procrustes), which leaves the law of u_N unchanged. Trial t uses the same coefficients for
/// every N; the point cloud depends on (seed, t, N) only.
std::vector<DiscrepancyRow> coupled_prior_discrepancy(const std::vector<Index>& n_list,
                                                      const CoupledPriorConfig& config);

struct ContractionConfig {
  double tau = 1.0;
  double smoothness = 4.0;
  double noise_std = 0.1;
  Index trials = 5;
  std::uint64_t seed = 0;
  std::function<double(double)> truth = [](double t) { return std::sin(t); };
  // Number of graph nodes for n labels; default max(n^2, 200).
  std::function<Index(Index)> points_for = [](Index n) { return std::max<Index>(n * n, 200); };
};

struct ContractionRow {
  Index labels = 0;
  Index n_points = 0;
  double median_error = 0.0;
  std::vector<double> errors;  // one per trial
};

/// Empirical ||f_hat - f0||_n over the labeled nodes, f_hat the conjugate posterior mean with
/// covariance N (tau I + L)^{-s}. Noise-free labels (noise_std = 0) are fitted with a 1e-6
/// likelihood noise, the interpolation limit.
std::vector<ContractionRow> contraction_study(const std::vector<Index>& n_list, const ContractionConfig& config);

}  // namespace graphssl

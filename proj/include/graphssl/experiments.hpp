#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphssl/datasets.hpp"
#include "graphssl/sampler.hpp"

namespace graphssl {

/// Two-moons classification demo: k-NN graph, stationary Matern prior, pCN.
struct TwoMoonsExperimentConfig {
  Index n_points = 200;
  Index labels_per_class = 5;
  double noise = 0.05;
  int neighbors = 8;
  double lengthscale = 0.3;
  double tau = 0.05;
  double smoothness = 2.0;
  double covariance_scale = 1.0;
  Index truncation = 0;  // 0: default_truncation(N)
  Index neighborhood = 20;
  int chains = 1;
  ChainConfig chain = [] {
    ChainConfig c;
    c.iterations = 100000;
    return c;
  }();
  std::uint64_t seed = 0;
};

struct TwoMoonsExperimentResult {
  TwoMoons moons;
  std::vector<Label> labels;
  PosteriorSummary summary;
  std::optional<double> r_hat;
  ChainTrace trace;           // first chain
  Vector posterior_std;       // of the class probability link(u)
  double accuracy = 0.0;      // on unlabeled nodes
  double neighborhood_std = 0.0;  // mean posterior std over the labeled nodes' nearest neighbours
  double global_std = 0.0;
};

TwoMoonsExperimentResult run_two_moons_experiment(const TwoMoonsExperimentConfig& config);

/// Prior draws on N uniform circle samples for (tau_low, s_low), (tau_high, s_low),
/// (tau_high, s_high), and a per-node tau ramping from tau_low to tau_high with the angle.
struct GalleryConfig {
  Index n_points = 512;
  double tau_low = 1.0;
  double tau_high = 30.0;
  double s_low = 2.0;
  double s_high = 4.0;
  bool couple = false;  // one standard normal vector drives every cell
  std::uint64_t seed = 0;
};

struct GalleryCell {
  std::string name;
  double s = 0.0;
  Vector tau;  // per node (constant for stationary cells)
  Vector values;
  double energy = 0.0;  // dirichlet_energy on the circle graph
};

struct GalleryResult {
  Vector angles;
  Matrix points;
  double connectivity = 0.0;
  std::vector<GalleryCell> cells;
};

GalleryResult prior_gallery(const GalleryConfig& config);

/// Dirichlet energy over the edges with both endpoints selected by `mask`.
double windowed_dirichlet_energy(const Graph& graph, const Vector& v, const std::vector<char>& mask);

}  // namespace graphssl

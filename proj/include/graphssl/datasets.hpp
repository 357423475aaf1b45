#pragma once

#include <cstdint>
#include <vector>

#include "graphssl/graph.hpp"
#include "graphssl/prior.hpp"
#include "graphssl/sampler.hpp"

namespace graphssl {

struct TwoMoons {
  Matrix features;          // N x 2
  std::vector<int> classes; // 0: upper moon, 1: lower moon
  Vector angles;            // moon parameter t in [0, pi] of each point
};

/// N/2 points per class. Class 0 on the upper unit semicircle (cos t, sin t); class 1 on the
/// lower semicircle of radius 1 centered at (1, 0.5), i.e. (1 - cos t, 0.5 - sin t); t uniform
/// on [0, pi], isotropic Gaussian noise of standard deviation `noise` added.
TwoMoons gen_two_moons(Index n_points, double noise, std::uint64_t seed);

/// `per_class` distinct nodes of each class drawn uniformly, labeled with their class.
std::vector<Label> stratified_labels(const std::vector<int>& classes, Index per_class, Rng& rng);

/// Protocol of the acceptance-rate-vs-N study on two moons.
struct MoonsStudyConfig {
  Index labels_per_class = 5;
  double feature_noise = 0.0;
  double tau = 1.0;
  double smoothness = 2.0;
  Link link = Link::logistic;
};

/// Two-moons classification problem on N points: calibrated epsilon graph (m = 1, default
/// connectivity, weights times the total curve length 2 pi), stationary Matern prior with
/// default truncation and covariance scale N.
SamplingProblem two_moons_problem(Index n_points, std::uint64_t seed, const MoonsStudyConfig& config = {});

}  // namespace graphssl

#include "graphssl/datasets.hpp"

#include <algorithm>
#include <memory>
#include <numbers>
#include <numeric>

#include "graphssl/error.hpp"
#include "graphssl/spectral.hpp"

namespace graphssl {

TwoMoons gen_two_moons(Index n_points, double noise, std::uint64_t seed) {
  if (n_points < 2 || n_points % 2 != 0) throw InvalidArgument("two moons needs an even N >= 2");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidArgument("noise must be nonnegative");
  Rng rng(seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::normal_distribution<double> normal(0.0, 1.0);
  TwoMoons out;
  out.features.resize(n_points, 2);
  out.angles.resize(n_points);
  out.classes.resize(static_cast<std::size_t>(n_points));
  const Index half = n_points / 2;
  for (Index i = 0; i < n_points; ++i) {
    const double t = angle(rng);
    const int cls = i < half ? 0 : 1;
    double x = cls == 0 ? std::cos(t) : 1.0 - std::cos(t);
    double y = cls == 0 ? std::sin(t) : 0.5 - std::sin(t);
    if (noise > 0.0) {
      x += noise * normal(rng);
      y += noise * normal(rng);
    }
    out.features(i, 0) = x;
    out.features(i, 1) = y;
    out.angles[i] = t;
    out.classes[static_cast<std::size_t>(i)] = cls;
  }
  return out;
}

std::vector<Label> stratified_labels(const std::vector<int>& classes, Index per_class, Rng& rng) {
  if (per_class < 0) throw InvalidArgument("labels per class must be nonnegative");
  std::vector<Label> labels;
  for (int cls : {0, 1}) {
    std::vector<Index> members;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (classes[i] == cls) members.push_back(static_cast<Index>(i));
    }
    if (static_cast<Index>(members.size()) < per_class) {
      throw InvalidArgument("class " + std::to_string(cls) + " has fewer than " + std::to_string(per_class) +
                            " points");
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (Index a = 0; a < per_class; ++a) labels.push_back({members[static_cast<std::size_t>(a)], double(cls)});
  }
  return labels;
}

SamplingProblem two_moons_problem(Index n_points, std::uint64_t seed, const MoonsStudyConfig& config) {
  const TwoMoons moons = gen_two_moons(n_points, config.feature_noise, derive_seed(seed, 0));
  Rng label_rng(derive_seed(seed, 1));
  const auto labels = stratified_labels(moons.classes, config.labels_per_class, label_rng);
  const Dataset data = Dataset::classification(moons.features, labels);

  const double h = default_connectivity(n_points, 1, config.smoothness);
  const Graph graph = build_epsilon_graph(moons.features, 1, h).scaled(2.0 * std::numbers::pi);
  const Index k = default_truncation(n_points);
  auto spectrum = std::make_shared<const Spectrum>(eigendecompose(laplacian(graph), k));
  MaternPrior prior =
      MaternPrior::stationary(spectrum, config.tau, config.smoothness, k, static_cast<double>(n_points));
  if (prior.truncation_tail_bound() > 1e-3) {
    warn("truncated prior keeps less than 99.9% of the variance (tail bound " +
         std::to_string(prior.truncation_tail_bound()) + ")");
  }
  return SamplingProblem{std::move(prior), Likelihood(data, config.link)};
}

}  // namespace graphssl

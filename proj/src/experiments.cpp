#include "graphssl/experiments.hpp"

#include <algorithm>
#include <memory>
#include <numbers>
#include <set>

#include "graphssl/continuum.hpp"
#include "graphssl/error.hpp"
#include "graphssl/spectral.hpp"

namespace graphssl {

TwoMoonsExperimentResult run_two_moons_experiment(const TwoMoonsExperimentConfig& config) {
  TwoMoonsExperimentResult out;
  out.moons = gen_two_moons(config.n_points, config.noise, derive_seed(config.seed, 0));
  Rng label_rng(derive_seed(config.seed, 1));
  out.labels = stratified_labels(out.moons.classes, config.labels_per_class, label_rng);
  const Dataset data = Dataset::classification(out.moons.features, out.labels);

  const Graph graph = build_knn_graph(out.moons.features, config.neighbors, {config.lengthscale});
  const Index k = config.truncation > 0 ? config.truncation : default_truncation(config.n_points);
  auto spectrum = std::make_shared<const Spectrum>(eigendecompose(laplacian(graph), k));
  const MaternPrior prior =
      MaternPrior::stationary(spectrum, config.tau, config.smoothness, k, config.covariance_scale);
  const Likelihood likelihood(data, config.chain.link);

  ChainConfig chain = config.chain;
  chain.seed = derive_seed(config.seed, 2);
  if (config.chains > 1) {
    MultiChainResult multi = multi_chain(chain, config.chains, prior, likelihood);
    out.summary = std::move(multi.summary);
    out.r_hat = multi.r_hat;
    out.trace = std::move(multi.chains.front().trace);
  } else {
    ChainResult single = run_chain(chain, prior, likelihood);
    out.summary = std::move(single.summary);
    out.trace = std::move(single.trace);
  }

  out.posterior_std = out.summary.probability_variance.cwiseSqrt();
  std::set<Index> labeled;
  for (const auto& l : out.labels) labeled.insert(l.node);
  Index correct = 0, total = 0;
  for (Index i = 0; i < config.n_points; ++i) {
    if (labeled.count(i)) continue;
    ++total;
    correct += out.summary.class_labels[static_cast<std::size_t>(i)] == out.moons.classes[static_cast<std::size_t>(i)];
  }
  out.accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 1.0;

  const Index hood = std::min(config.neighborhood, config.n_points);
  double sum = 0.0;
  Index count = 0;
  for (const auto& l : out.labels) {
    std::vector<std::pair<double, Index>> dist;
    for (Index j = 0; j < config.n_points; ++j) {
      dist.emplace_back((out.moons.features.row(j) - out.moons.features.row(l.node)).squaredNorm(), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + hood, dist.end());
    for (Index r = 0; r < hood; ++r) {
      sum += out.posterior_std[dist[static_cast<std::size_t>(r)].second];
      ++count;
    }
  }
  out.neighborhood_std = count > 0 ? sum / static_cast<double>(count) : 0.0;
  out.global_std = out.posterior_std.mean();
  return out;
}

GalleryResult prior_gallery(const GalleryConfig& config) {
  if (!(config.tau_low > 0.0) || !(config.tau_high > 0.0)) throw InvalidArgument("tau values must be positive");
  GalleryResult out;
  Rng point_rng(derive_seed(config.seed, 0));
  out.angles = sample_circle_angles(config.n_points, point_rng);
  out.points = circle_points(out.angles);
  out.connectivity = default_connectivity(config.n_points, 1, config.s_low);
  const Graph graph = circle_graph(out.angles, out.connectivity);
  auto lap = std::make_shared<const Laplacian>(laplacian(graph));
  auto spectrum = std::make_shared<const Spectrum>(eigendecompose(*lap, config.n_points));

  Rng shared_rng(derive_seed(config.seed, 1));
  const Vector shared = standard_normal(config.n_points, shared_rng);
  auto noise = [&](std::uint64_t cell) {
    if (config.couple) return shared;
    Rng rng(derive_seed(config.seed, 2 + cell));
    return standard_normal(config.n_points, rng);
  };

  struct Stationary {
    const char* name;
    double tau, s;
  };
  const Stationary stationary[] = {{"tau_low_s_low", config.tau_low, config.s_low},
                                   {"tau_high_s_low", config.tau_high, config.s_low},
                                   {"tau_high_s_high", config.tau_high, config.s_high}};
  std::uint64_t cell = 0;
  for (const auto& c : stationary) {
    const MaternPrior prior = MaternPrior::stationary(spectrum, c.tau, c.s, config.n_points);
    GalleryCell g;
    g.name = c.name;
    g.s = c.s;
    g.tau = Vector::Constant(config.n_points, c.tau);
    g.values = prior.field_from_coefficients(noise(cell++));
    g.energy = dirichlet_energy(graph, g.values);
    out.cells.push_back(std::move(g));
  }
  GalleryCell ramp;
  ramp.name = "tau_ramp_s_low";
  ramp.s = config.s_low;
  ramp.tau = config.tau_low + (config.tau_high - config.tau_low) * out.angles.array() / (2.0 * std::numbers::pi);
  const MaternPrior prior = MaternPrior::nonstationary(lap, ramp.tau, config.s_low);
  ramp.values = sample_prior_nonstationary_from_noise(prior, noise(cell));
  ramp.energy = dirichlet_energy(graph, ramp.values);
  out.cells.push_back(std::move(ramp));
  return out;
}

double windowed_dirichlet_energy(const Graph& graph, const Vector& v, const std::vector<char>& mask) {
  if (v.size() != graph.size() || static_cast<Index>(mask.size()) != graph.size()) {
    throw InvalidArgument("vector and mask lengths must equal the graph size");
  }
  const SparseMatrix& w = graph.weights();
  double energy = 0.0;
  for (Index j = 0; j < w.outerSize(); ++j) {
    if (!mask[static_cast<std::size_t>(j)]) continue;
    for (SparseMatrix::InnerIterator it(w, j); it; ++it) {
      if (!mask[static_cast<std::size_t>(it.row())]) continue;
      const double d = v[it.row()] - v[it.col()];
      energy += it.value() * d * d;
    }
  }
  return 0.5 * energy;
}

}  // namespace graphssl

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "graphssl/model.hpp"
#include "graphssl/prior.hpp"

namespace graphssl {

struct ChainConfig {
  double theta = 0.1;
  std::int64_t iterations = 10000;
  // Negative means K / 5.
  std::int64_t burn_in = -1;
  std::int64_t thinning = 10;
  std::uint64_t seed = 0;
  std::optional<Vector> initial;  // zero vector when empty
  std::int64_t reservoir_size = 10000;
  Link link = Link::logistic;     // for class probabilities in classification summaries

  std::int64_t resolved_burn_in() const { return burn_in < 0 ? iterations / 5 : burn_in; }
  void validate() const;
};

struct PosteriorSummary {
  Vector mean;
  Vector variance;
  Vector q05, q50, q95;
  // Batch-means Monte Carlo standard error of each node's mean.
  Vector mean_standard_error;
  double acceptance_rate = 0.0;
  double effective_sample_size = 0.0;   // of the post-burn-in log-likelihood trace
  double ess_per_iteration = 0.0;       // ESS / (K - burn_in)
  std::int64_t retained = 0;            // thinned post-burn-in states
  // Classification only: posterior mean / variance of link(u), thresholded labels.
  Vector class_probabilities;
  Vector probability_variance;
  std::vector<int> class_labels;
};

struct ChainTrace {
  std::vector<double> log_likelihood;
  std::vector<char> accepted;
};

struct ChainResult {
  PosteriorSummary summary;
  ChainTrace trace;
  std::int64_t burn_in = 0;
};

/// sqrt(1 - theta^2) u + theta xi.
Vector pcn_proposal(const Vector& u, const Vector& xi, double theta);

/// min{1, exp(proposed - current)}.
double acceptance_probability(double current_loglik, double proposed_loglik);

struct StepResult {
  Vector next;
  bool accepted = false;
  double log_likelihood = 0.0;  // of `next`
};

/// One pCN Metropolis-Hastings step; xi is drawn from the prior.
StepResult pcn_step(const Vector& current, const ChainConfig& cfg, const MaternPrior& prior,
                    const Likelihood& likelihood, Rng& rng);

ChainResult run_chain(const ChainConfig& cfg, const MaternPrior& prior, const Likelihood& likelihood);

/// Initial-positive-sequence ESS of a scalar trace; a constant trace counts as independent draws.
double effective_sample_size(const std::vector<double>& trace);

/// Split-R-hat over equal-length traces; empty when degenerate (identical chains or no
/// within-chain variation).
std::optional<double> split_rhat(const std::vector<std::vector<double>>& traces);

struct MultiChainResult {
  PosteriorSummary summary;
  std::optional<double> r_hat;
  std::vector<ChainResult> chains;
};

/// `count` chains with seeds derive_seed(cfg.seed, index), pooled. `identical_seeds` runs every
/// chain with cfg.seed (test hook).
MultiChainResult multi_chain(const ChainConfig& cfg, int count, const MaternPrior& prior,
                             const Likelihood& likelihood, bool identical_seeds = false);

struct SamplingProblem {
  MaternPrior prior;
  Likelihood likelihood;
};

struct AcceptanceRow {
  Index n_points = 0;
  double acceptance_rate = 0.0;
  double ess_per_iteration = 0.0;
};

/// Runs the same chain protocol on a freshly generated problem for each N.
std::vector<AcceptanceRow> acceptance_vs_n_study(
    const std::function<SamplingProblem(Index n_points, std::uint64_t seed)>& generator,
    const std::vector<Index>& n_list, const ChainConfig& cfg);

}  // namespace graphssl

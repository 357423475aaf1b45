#include "graphssl/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "graphssl/error.hpp"

namespace graphssl {

namespace {

constexpr int kBatches = 50;

// Linear-interpolation quantile of an unsorted sample (copied).
double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct Moments {
  std::int64_t count = 0;
  Vector mean;
  Vector m2;

  explicit Moments(Index n = 0) : mean(Vector::Zero(n)), m2(Vector::Zero(n)) {}

  void add(const Vector& x) {
    ++count;
    const Vector delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta.cwiseProduct(x - mean);
  }

  Vector variance() const {
    if (count < 2) return Vector::Zero(mean.size());
    return m2 / static_cast<double>(count - 1);
  }

  // Chan et al. pairwise combination.
  void merge(const Moments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const Vector delta = other.mean - mean;
    mean += delta * (nb / (na + nb));
    m2 += other.m2 + delta.cwiseAbs2() * (na * nb / (na + nb));
    count += other.count;
  }
};

// Everything a chain accumulates; summaries are derived from it so chains can be pooled.
struct Accumulator {
  Moments latent;
  Moments probability;
  bool classification = false;
  Link link = Link::logistic;
  Matrix reservoir;
  std::int64_t reservoir_filled = 0;
  std::int64_t capacity = 0;
  Rng reservoir_rng;
  std::int64_t batch_size = 1;
  Matrix batch_sums;  // N x kBatches
  std::vector<std::int64_t> batch_counts;
  std::int64_t accepted = 0;
  std::int64_t steps = 0;

  void add(const Vector& u) {
    const std::int64_t r = latent.count;
    latent.add(u);
    if (classification) probability.add(classification_transform(u, link));
    const std::int64_t b = r / batch_size;
    if (b < batch_sums.cols()) {
      batch_sums.col(b) += u;
      ++batch_counts[static_cast<std::size_t>(b)];
    }
    if (capacity == 0) return;
    if (reservoir_filled < capacity) {
      reservoir.col(reservoir_filled++) = u;
    } else {
      std::uniform_int_distribution<std::int64_t> pick(0, r);
      const std::int64_t j = pick(reservoir_rng);
      if (j < capacity) reservoir.col(j) = u;
    }
  }
};

Accumulator make_accumulator(const ChainConfig& cfg, Index n, const Likelihood& likelihood) {
  Accumulator acc;
  acc.latent = Moments(n);
  acc.classification = likelihood.task() == TaskKind::classification;
  acc.link = cfg.link;
  if (acc.classification) acc.probability = Moments(n);
  const std::int64_t burn = cfg.resolved_burn_in();
  const std::int64_t retained = (cfg.iterations - burn) / cfg.thinning;
  acc.capacity = std::min(cfg.reservoir_size, retained);
  acc.reservoir = Matrix::Zero(n, acc.capacity);
  acc.reservoir_rng.seed(derive_seed(cfg.seed, 0x7265736572766f69ULL));
  const std::int64_t batches = std::min<std::int64_t>(kBatches, std::max<std::int64_t>(retained, 1));
  acc.batch_size = std::max<std::int64_t>(1, retained / batches);
  acc.batch_sums = Matrix::Zero(n, batches);
  acc.batch_counts.assign(static_cast<std::size_t>(batches), 0);
  return acc;
}

Vector batch_standard_error(const std::vector<const Accumulator*>& accs) {
  // Full batches of every chain, treated as one pool of batch means.
  std::vector<Vector> means;
  for (const auto* acc : accs) {
    for (Index b = 0; b < acc->batch_sums.cols(); ++b) {
      if (acc->batch_counts[static_cast<std::size_t>(b)] == acc->batch_size) {
        means.push_back(acc->batch_sums.col(b) / static_cast<double>(acc->batch_size));
      }
    }
  }
  const Index n = accs.front()->latent.mean.size();
  if (means.size() < 2) return Vector::Constant(n, std::numeric_limits<double>::infinity());
  Moments m(n);
  for (const auto& v : means) m.add(v);
  return (m.variance() / static_cast<double>(means.size())).cwiseSqrt();
}

PosteriorSummary summarize(const std::vector<const Accumulator*>& accs) {
  Moments latent(accs.front()->latent.mean.size());
  Moments probability(accs.front()->probability.mean.size());
  std::int64_t accepted = 0, steps = 0;
  for (const auto* acc : accs) {
    latent.merge(acc->latent);
    probability.merge(acc->probability);
    accepted += acc->accepted;
    steps += acc->steps;
  }
  PosteriorSummary s;
  s.mean = latent.mean;
  s.variance = latent.variance();
  s.retained = latent.count;
  s.acceptance_rate = steps > 0 ? static_cast<double>(accepted) / static_cast<double>(steps) : 0.0;
  s.mean_standard_error = batch_standard_error(accs);

  std::int64_t stored = 0;
  for (const auto* acc : accs) stored += acc->reservoir_filled;
  const Index n = s.mean.size();
  if (stored > 0) {
    s.q05.resize(n);
    s.q50.resize(n);
    s.q95.resize(n);
    std::vector<double> row(static_cast<std::size_t>(stored));
    for (Index i = 0; i < n; ++i) {
      std::size_t c = 0;
      for (const auto* acc : accs) {
        for (std::int64_t j = 0; j < acc->reservoir_filled; ++j) row[c++] = acc->reservoir(i, j);
      }
      s.q05[i] = quantile(row, 0.05);
      s.q50[i] = quantile(row, 0.5);
      s.q95[i] = quantile(row, 0.95);
    }
  }
  if (accs.front()->classification) {
    s.class_probabilities = probability.mean;
    s.probability_variance = probability.variance();
    s.class_labels.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) s.class_labels[static_cast<std::size_t>(i)] = s.class_probabilities[i] > 0.5;
  }
  return s;
}

struct ChainRun {
  ChainResult result;
  Accumulator acc;
};

ChainRun run_chain_impl(const ChainConfig& cfg, const MaternPrior& prior, const Likelihood& likelihood) {
  cfg.validate();
  const Index n = prior.size();
  if (likelihood.size() != n) throw InvalidArgument("likelihood and prior sizes differ");
  if (cfg.initial && cfg.initial->size() != n) throw InvalidArgument("initial state length must equal N");

  const std::int64_t burn = cfg.resolved_burn_in();
  ChainRun run{ChainResult{}, make_accumulator(cfg, n, likelihood)};
  run.result.burn_in = burn;
  auto& trace = run.result.trace;
  trace.log_likelihood.reserve(static_cast<std::size_t>(cfg.iterations));
  trace.accepted.reserve(static_cast<std::size_t>(cfg.iterations));

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double keep = std::sqrt(1.0 - cfg.theta * cfg.theta);
  auto retain = [&](std::int64_t k) { return k > burn && (k - burn) % cfg.thinning == 0; };

  if (prior.is_stationary()) {
    // Chain on the Karhunen-Loeve coefficients; the field at the labeled nodes is all the
    // likelihood needs, full fields are formed only for retained states.
    const Vector scales = prior.coefficient_scales();
    const Index k = prior.truncation();
    const auto psi = prior.spectrum().eigenvectors().leftCols(k);
    Matrix labeled(likelihood.label_count(), k);
    for (Index a = 0; a < likelihood.label_count(); ++a) {
      labeled.row(a) = psi.row(likelihood.nodes()[static_cast<std::size_t>(a)]).cwiseProduct(scales.transpose());
    }
    Vector x = Vector::Zero(k);
    if (cfg.initial) x = (psi.transpose() * *cfg.initial).cwiseQuotient(scales);
    double ell = likelihood.from_labeled(labeled * x);
    for (std::int64_t it = 1; it <= cfg.iterations; ++it) {
      Vector proposal = keep * x + cfg.theta * standard_normal(k, rng);
      const double ell_new = likelihood.from_labeled(labeled * proposal);
      const bool accept = uniform(rng) < acceptance_probability(ell, ell_new);
      if (accept) {
        x = std::move(proposal);
        ell = ell_new;
      }
      trace.log_likelihood.push_back(ell);
      trace.accepted.push_back(accept);
      if (it > burn) {
        ++run.acc.steps;
        run.acc.accepted += accept;
      }
      if (retain(it)) run.acc.add(psi * scales.cwiseProduct(x));
    }
  } else {
    Vector u = cfg.initial ? *cfg.initial : Vector::Zero(n);
    double ell = likelihood(u);
    for (std::int64_t it = 1; it <= cfg.iterations; ++it) {
      Vector proposal = pcn_proposal(u, sample_prior_nonstationary(prior, rng), cfg.theta);
      const double ell_new = likelihood(proposal);
      const bool accept = uniform(rng) < acceptance_probability(ell, ell_new);
      if (accept) {
        u = std::move(proposal);
        ell = ell_new;
      }
      trace.log_likelihood.push_back(ell);
      trace.accepted.push_back(accept);
      if (it > burn) {
        ++run.acc.steps;
        run.acc.accepted += accept;
      }
      if (retain(it)) run.acc.add(u);
    }
  }

  run.result.summary = summarize({&run.acc});
  const std::vector<double> post(trace.log_likelihood.begin() + burn, trace.log_likelihood.end());
  run.result.summary.effective_sample_size = effective_sample_size(post);
  run.result.summary.ess_per_iteration =
      post.empty() ? 0.0 : run.result.summary.effective_sample_size / static_cast<double>(post.size());
  return run;
}

}  // namespace

void ChainConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
  if (iterations < 1) throw InvalidArgument("iterations must be positive");
  if (resolved_burn_in() >= iterations) throw InvalidArgument("burn-in must be smaller than the iteration count");
  if (thinning < 1) throw InvalidArgument("thinning must be positive");
  if (reservoir_size < 0) throw InvalidArgument("reservoir size must be nonnegative");
}

Vector pcn_proposal(const Vector& u, const Vector& xi, double theta) {
  if (u.size() != xi.size()) throw InvalidArgument("proposal noise length must equal N");
  return std::sqrt(1.0 - theta * theta) * u + theta * xi;
}

double acceptance_probability(double current_loglik, double proposed_loglik) {
  const double delta = proposed_loglik - current_loglik;
  if (delta >= 0.0) return 1.0;
  return std::exp(delta);
}

StepResult pcn_step(const Vector& current, const ChainConfig& cfg, const MaternPrior& prior,
                    const Likelihood& likelihood, Rng& rng) {
  if (!current.allFinite()) throw InvalidArgument("current state has non-finite entries");
  const Vector xi = prior.is_stationary() ? sample_prior(prior, rng) : sample_prior_nonstationary(prior, rng);
  Vector proposal = pcn_proposal(current, xi, cfg.theta);
  const double ell = likelihood(current);
  const double ell_new = likelihood(proposal);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  StepResult step;
  step.accepted = uniform(rng) < acceptance_probability(ell, ell_new);
  step.next = step.accepted ? std::move(proposal) : current;
  step.log_likelihood = step.accepted ? ell_new : ell;
  return step;
}

ChainResult run_chain(const ChainConfig& cfg, const MaternPrior& prior, const Likelihood& likelihood) {
  return run_chain_impl(cfg, prior, likelihood).result;
}

double effective_sample_size(const std::vector<double>& trace) {
  const std::size_t n = trace.size();
  if (n < 2) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : trace) mean += v;
  mean /= static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += (trace[i] - mean) * (trace[i + lag] - mean);
    return acc / static_cast<double>(n);
  };
  const double gamma0 = autocov(0);
  if (!(gamma0 > 1e-300 * std::max(1.0, mean * mean))) return static_cast<double>(n);
  // Geyer: sum adjacent pairs while they stay positive.
  double tau = -gamma0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = autocov(2 * m) + autocov(2 * m + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau /= gamma0;
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  return static_cast<double>(n) / tau;
}

std::optional<double> split_rhat(const std::vector<std::vector<double>>& traces) {
  if (traces.size() < 2) throw InvalidArgument("split R-hat needs at least two chains");
  const std::size_t len = traces.front().size();
  for (const auto& t : traces) {
    if (t.size() != len) throw InvalidArgument("split R-hat needs equal-length traces");
  }
  if (len < 4) throw InvalidArgument("split R-hat needs at least four draws per chain");
  for (std::size_t a = 0; a < traces.size(); ++a) {
    for (std::size_t b = a + 1; b < traces.size(); ++b) {
      if (traces[a] == traces[b]) return std::nullopt;
    }
  }
  const std::size_t half = len / 2;
  std::vector<double> means, variances;
  for (const auto& t : traces) {
    for (std::size_t start : {std::size_t{0}, len - half}) {
      double m = 0.0;
      for (std::size_t i = 0; i < half; ++i) m += t[start + i];
      m /= static_cast<double>(half);
      double v = 0.0;
      for (std::size_t i = 0; i < half; ++i) v += (t[start + i] - m) * (t[start + i] - m);
      means.push_back(m);
      variances.push_back(v / static_cast<double>(half - 1));
    }
  }
  const double chains = static_cast<double>(means.size());
  double w = 0.0, grand = 0.0;
  for (std::size_t j = 0; j < means.size(); ++j) {
    w += variances[j];
    grand += means[j];
  }
  w /= chains;
  grand /= chains;
  if (!(w > 0.0)) return std::nullopt;
  double b = 0.0;
  for (double m : means) b += (m - grand) * (m - grand);
  b *= static_cast<double>(half) / (chains - 1.0);
  const double h = static_cast<double>(half);
  const double var_plus = (h - 1.0) / h * w + b / h;
  return std::sqrt(var_plus / w);
}

MultiChainResult multi_chain(const ChainConfig& cfg, int count, const MaternPrior& prior,
                             const Likelihood& likelihood, bool identical_seeds) {
  if (count < 2) throw InvalidArgument("multi_chain needs at least two chains");
  cfg.validate();
  std::vector<std::future<ChainRun>> futures;
  for (int c = 0; c < count; ++c) {
    ChainConfig chain_cfg = cfg;
    chain_cfg.seed = identical_seeds ? cfg.seed : derive_seed(cfg.seed, static_cast<std::uint64_t>(c));
    futures.push_back(std::async(std::launch::async, [chain_cfg, &prior, &likelihood] {
      return run_chain_impl(chain_cfg, prior, likelihood);
    }));
  }
  std::vector<ChainRun> runs;
  for (auto& f : futures) runs.push_back(f.get());

  std::vector<const Accumulator*> accs;
  std::vector<std::vector<double>> traces;
  double ess = 0.0;
  std::size_t post_steps = 0;
  for (const auto& run : runs) {
    accs.push_back(&run.acc);
    const auto& ll = run.result.trace.log_likelihood;
    traces.emplace_back(ll.begin() + run.result.burn_in, ll.end());
    ess += run.result.summary.effective_sample_size;
    post_steps += traces.back().size();
  }
  MultiChainResult out;
  out.summary = summarize(accs);
  out.summary.effective_sample_size = ess;
  out.summary.ess_per_iteration = post_steps > 0 ? ess / static_cast<double>(post_steps) : 0.0;
  if (traces.front().size() >= 4) out.r_hat = split_rhat(traces);
  if (!out.r_hat) {
    warn("split R-hat is degenerate (identical chains or constant log-likelihood traces)");
  } else if (*out.r_hat > 1.05) {
    std::ostringstream msg;
    msg << "split R-hat " << *out.r_hat << " exceeds 1.05; chains may not have mixed";
    warn(msg.str());
  }
  for (auto& run : runs) out.chains.push_back(std::move(run.result));
  return out;
}

std::vector<AcceptanceRow> acceptance_vs_n_study(
    const std::function<SamplingProblem(Index n_points, std::uint64_t seed)>& generator,
    const std::vector<Index>& n_list, const ChainConfig& cfg) {
  std::vector<AcceptanceRow> rows;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const std::uint64_t problem_seed = derive_seed(cfg.seed, i);
    const SamplingProblem problem = generator(n_list[i], problem_seed);
    ChainConfig chain_cfg = cfg;
    chain_cfg.seed = derive_seed(problem_seed, 1);
    const ChainResult result = run_chain(chain_cfg, problem.prior, problem.likelihood);
    rows.push_back({n_list[i], result.summary.acceptance_rate, result.summary.ess_per_iteration});
  }
  return rows;
}

}  // namespace graphssl

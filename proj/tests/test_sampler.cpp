#include <doctest.h>

#include <cmath>
#include <random>

#include "graphssl/continuum.hpp"
#include "graphssl/error.hpp"
#include "graphssl/sampler.hpp"
#include "oracles.hpp"

using namespace graphssl;

namespace {

struct Fixture {
  std::shared_ptr<const Laplacian> lap;
  std::shared_ptr<const Spectrum> spectrum;
  Dataset data;
};

// Circle graph with `n` nodes and regression labels sin(theta) + noise on the first `labels`.
Fixture circle_fixture(Index n, Index labels, double noise, std::uint64_t seed) {
  auto old = set_warning_handler([](const std::string&) {});
  Rng rng(seed);
  const Vector angles = sample_circle_angles(n, rng);
  auto lap = std::make_shared<const Laplacian>(laplacian(circle_graph(angles, default_connectivity(n, 1, 2.0))));
  set_warning_handler(old);
  auto spec = std::make_shared<const Spectrum>(eigendecompose(*lap, n));
  std::normal_distribution<double> normal;
  std::vector<Label> y;
  for (Index i = 0; i < labels; ++i) y.push_back({i, std::sin(angles[i]) + noise * normal(rng)});
  return {lap, spec, Dataset::regression(circle_points(angles), std::move(y), noise)};
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("pCN proposal and acceptance probability") {
  Vector u(3);
  u << 1.0, -2.0, 0.5;
  CHECK((pcn_proposal(u, Vector::Zero(3), std::sqrt(0.19)) - 0.9 * u).cwiseAbs().maxCoeff() < 1e-15);
  Vector xi(3);
  xi << 0.3, 0.1, -1.0;
  CHECK((pcn_proposal(u, xi, 0.6) - (0.8 * u + 0.6 * xi)).cwiseAbs().maxCoeff() < 1e-15);

  struct Row {
    double current, proposed, expected;
  };
  for (const Row& r : {Row{-3.0, -1.0, 1.0}, Row{-1.0, -1.0, 1.0}, Row{-1.0, -3.0, std::exp(-2.0)},
                       Row{0.0, -0.5, std::exp(-0.5)}, Row{-10.0, -10.0 - std::log(4.0), 0.25},
                       Row{5.0, -1e9, 0.0}}) {
    CHECK(acceptance_probability(r.current, r.proposed) == doctest::Approx(r.expected).epsilon(1e-14));
  }
}

TEST_CASE("pcn_step accepts every likelihood increase and every move without labels") {
  const Fixture f = circle_fixture(20, 5, 0.2, 1);
  const MaternPrior prior = MaternPrior::stationary(f.spectrum, 1.0, 2.0, 20);
  const Likelihood lik(f.data);
  const Likelihood flat(Dataset::regression(f.data.features(), {}, 1.0));
  ChainConfig cfg;
  cfg.theta = 0.3;
  Rng rng(3);
  Vector u = Vector::Zero(20);
  int accepted_flat = 0;
  for (int t = 0; t < 500; ++t) {
    Rng probe = rng;
    const StepResult s = pcn_step(u, cfg, prior, lik, rng);
    if (s.accepted) {
      CHECK(s.log_likelihood == doctest::Approx(lik(s.next)));
    } else {
      CHECK(s.next == u);
    }
    if (lik(s.next) > lik(u)) CHECK(s.accepted);
    accepted_flat += pcn_step(u, cfg, prior, flat, probe).accepted;
    u = s.next;
  }
  CHECK(accepted_flat == 500);
}

TEST_CASE("runs are deterministic given the seed") {
  const Fixture f = circle_fixture(15, 4, 0.3, 2);
  const MaternPrior prior = MaternPrior::stationary(f.spectrum, 1.0, 2.0, 15, 15.0);
  ChainConfig cfg;
  cfg.iterations = 3000;
  cfg.seed = 77;
  const ChainResult a = run_chain(cfg, prior, Likelihood(f.data));
  const ChainResult b = run_chain(cfg, prior, Likelihood(f.data));
  CHECK(a.summary.mean == b.summary.mean);
  CHECK(a.summary.variance == b.summary.variance);
  CHECK(a.summary.q50 == b.summary.q50);
  CHECK(a.trace.log_likelihood == b.trace.log_likelihood);
  CHECK(a.summary.acceptance_rate == b.summary.acceptance_rate);
}

TEST_CASE("summary bookkeeping") {
  const Fixture f = circle_fixture(15, 4, 0.3, 2);
  const MaternPrior prior = MaternPrior::stationary(f.spectrum, 1.0, 2.0, 15, 15.0);
  ChainConfig cfg;
  cfg.iterations = 5000;
  cfg.burn_in = 1000;
  cfg.thinning = 4;
  const ChainResult r = run_chain(cfg, prior, Likelihood(f.data));
  CHECK(r.summary.retained == 1000);
  CHECK(r.trace.log_likelihood.size() == 5000);
  CHECK(r.summary.variance.minCoeff() >= 0.0);
  CHECK((r.summary.q05.array() <= r.summary.q50.array()).all());
  CHECK((r.summary.q50.array() <= r.summary.q95.array()).all());
  CHECK(r.summary.acceptance_rate >= 0.0);
  CHECK(r.summary.acceptance_rate <= 1.0);
  int accepted = 0;
  for (std::size_t i = 1000; i < 5000; ++i) accepted += r.trace.accepted[i];
  CHECK(r.summary.acceptance_rate == doctest::Approx(accepted / 4000.0));
  CHECK(r.summary.effective_sample_size > 0.0);
  CHECK(r.summary.ess_per_iteration == doctest::Approx(r.summary.effective_sample_size / 4000.0));
}

TEST_CASE("classification summaries") {
  const Fixture f = circle_fixture(30, 0, 0.1, 4);
  std::vector<Label> labels;
  for (Index i = 0; i < 8; ++i) labels.push_back({i, f.data.features()(i, 1) > 0 ? 1.0 : 0.0});
  const Dataset d = Dataset::classification(f.data.features(), labels);
  const MaternPrior prior = MaternPrior::stationary(f.spectrum, 1.0, 2.0, 30, 30.0);
  ChainConfig cfg;
  cfg.iterations = 4000;
  const PosteriorSummary s = run_chain(cfg, prior, Likelihood(d)).summary;
  CHECK(s.class_probabilities.minCoeff() >= 0.0);
  CHECK(s.class_probabilities.maxCoeff() <= 1.0);
  for (Index i = 0; i < 30; ++i) CHECK(s.class_labels[i] == (s.class_probabilities[i] > 0.5 ? 1 : 0));
}

TEST_CASE("constant likelihood preserves the prior") {
  const Fixture f = circle_fixture(10, 0, 0.1, 5);
  const MaternPrior prior = MaternPrior::stationary(f.spectrum, 1.0, 2.0, 10, 10.0);
  const Likelihood flat(f.data);
  ChainConfig cfg;
  cfg.theta = 0.5;
  cfg.iterations = 120000;
  cfg.thinning = 1;
  cfg.reservoir_size = 0;
  const PosteriorSummary s = run_chain(cfg, prior, flat).summary;
  CHECK(s.acceptance_rate == 1.0);
  const Vector var = prior.marginal_variance();
  for (Index j = 0; j < 10; ++j) {
    CHECK(std::abs(s.mean[j]) < 3.0 * s.mean_standard_error[j]);
    CHECK(std::abs(s.variance[j] / var[j] - 1.0) < 0.05);
  }
}

TEST_CASE("nonstationary prior chains use the same kernel") {
  const Fixture f = circle_fixture(12, 0, 0.1, 6);
  Vector tau(12);
  for (Index i = 0; i < 12; ++i) tau[i] = 0.5 + 0.1 * i;
  const MaternPrior prior = MaternPrior::nonstationary(f.lap, tau, 2.0, 12.0);
  ChainConfig cfg;
  cfg.theta = 0.5;
  cfg.iterations = 120000;
  cfg.thinning = 1;
  cfg.reservoir_size = 0;
  const PosteriorSummary s = run_chain(cfg, prior, Likelihood(f.data)).summary;
  const Matrix op = Matrix(tau.asDiagonal()) + f.lap->dense();
  const Vector var = 12.0 * oracle::matrix_power(op, 2).inverse().diagonal();
  for (Index j = 0; j < 12; ++j) CHECK(std::abs(s.variance[j] / var[j] - 1.0) < 0.05);
}

TEST_CASE("regression chain approaches the conjugate posterior as K grows") {
  const Fixture f = circle_fixture(12, 5, 0.2, 7);
  const MaternPrior prior = MaternPrior::stationary(f.spectrum, 1.0, 2.0, 12);
  const GaussianPosterior exact = exact_gaussian_posterior(prior, f.data);
  const Likelihood lik(f.data);
  auto rms = [&](std::int64_t k) {
    double acc = 0.0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      ChainConfig cfg;
      cfg.theta = 0.3;
      cfg.iterations = k;
      cfg.thinning = 1;
      cfg.reservoir_size = 0;
      cfg.seed = seed;
      acc += (run_chain(cfg, prior, lik).summary.mean - exact.mean).squaredNorm();
    }
    return std::sqrt(acc / (8.0 * 12.0));  // per-node RMS
  };
  const double e1 = rms(10000), e4 = rms(40000);
  CHECK(e4 < 0.75 * e1);
  CHECK(e4 < 0.05);
}

TEST_CASE("effective sample size of an AR(1) trace") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (double rho : {0.0, 0.5, 0.9}) {
    std::vector<double> x(200000);
    double v = normal(rng) / std::sqrt(1.0 - rho * rho);
    for (auto& e : x) {
      v = rho * v + normal(rng);
      e = v;
    }
    const double expected = x.size() * (1.0 - rho) / (1.0 + rho);
    CHECK(effective_sample_size(x) == doctest::Approx(expected).epsilon(0.1));
  }
  CHECK(effective_sample_size(std::vector<double>(100, 1.0)) > 0.0);
}

TEST_CASE("split R-hat") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> good(4, std::vector<double>(2000));
  for (auto& c : good) {
    for (auto& e : c) e = normal(rng);
  }
  const auto r = split_rhat(good);
  REQUIRE(r.has_value());
  CHECK(*r < 1.01);
  auto shifted = good;
  for (auto& e : shifted[0]) e += 3.0;
  CHECK(*split_rhat(shifted) > 1.1);
  std::vector<std::vector<double>> same(3, good[0]);
  same[0] = std::vector<double>(2000, 1.0);
  same[1] = same[0];
  same[2] = same[0];
  CHECK_FALSE(split_rhat(same).has_value());
}

TEST_CASE("multi-chain pooling and diagnostics") {
  const Fixture f = circle_fixture(15, 5, 0.2, 11);
  const MaternPrior prior = MaternPrior::stationary(f.spectrum, 1.0, 2.0, 15, 15.0);
  const Likelihood lik(f.data);
  ChainConfig cfg;
  cfg.theta = 0.3;
  cfg.iterations = 20000;
  cfg.seed = 12;

  const MultiChainResult m = multi_chain(cfg, 2, prior, lik);
  const Vector avg = 0.5 * (m.chains[0].summary.mean + m.chains[1].summary.mean);
  CHECK((m.summary.mean - avg).cwiseAbs().maxCoeff() < 1e-10);
  REQUIRE(m.r_hat.has_value());
  CHECK(*m.r_hat < 1.05);
  CHECK(m.summary.retained == m.chains[0].summary.retained + m.chains[1].summary.retained);
  // Pooled unbiased variance from the per-chain sums of squares.
  const double r = static_cast<double>(m.chains[0].summary.retained);
  const Vector pooled = ((r - 1.0) * (m.chains[0].summary.variance + m.chains[1].summary.variance) +
                         0.5 * r * (m.chains[0].summary.mean - m.chains[1].summary.mean).cwiseAbs2()) /
                        (2.0 * r - 1.0);
  CHECK((m.summary.variance - pooled).cwiseAbs().maxCoeff() < 1e-10 * pooled.maxCoeff());

  std::string warning;
  auto old = set_warning_handler([&](const std::string& w) { warning = w; });
  const MultiChainResult same = multi_chain(cfg, 3, prior, lik, true);
  set_warning_handler(old);
  CHECK_FALSE(same.r_hat.has_value());
  CHECK(warning.find("degenerate") != std::string::npos);

  const MultiChainResult again = multi_chain(cfg, 2, prior, lik);
  CHECK(again.summary.mean == m.summary.mean);
}

TEST_CASE("acceptance-vs-N study") {
  ChainConfig cfg;
  cfg.iterations = 2000;
  auto generator = [](Index n, std::uint64_t seed) {
    const Fixture f = circle_fixture(n, 0, 0.1, seed);
    return SamplingProblem{MaternPrior::stationary(f.spectrum, 1.0, 2.0, n, double(n)), Likelihood(f.data)};
  };
  const auto one = acceptance_vs_n_study(generator, {20}, cfg);
  REQUIRE(one.size() == 1);
  CHECK(one[0].n_points == 20);
  for (const auto& row : acceptance_vs_n_study(generator, {20, 40}, cfg)) CHECK(row.acceptance_rate == 1.0);
}

TEST_CASE("chain configuration is validated") {
  const Fixture f = circle_fixture(10, 2, 0.1, 12);
  const MaternPrior prior = MaternPrior::stationary(f.spectrum, 1.0, 2.0, 10);
  const Likelihood lik(f.data);
  ChainConfig cfg;
  cfg.theta = 1.0;
  CHECK_THROWS_AS(run_chain(cfg, prior, lik), InvalidArgument);
  cfg.theta = 0.1;
  cfg.burn_in = cfg.iterations;
  CHECK_THROWS_AS(run_chain(cfg, prior, lik), InvalidArgument);
  cfg.burn_in = -1;
  cfg.thinning = 0;
  CHECK_THROWS_AS(run_chain(cfg, prior, lik), InvalidArgument);
  cfg.thinning = 1;
  CHECK_THROWS_AS(multi_chain(cfg, 1, prior, lik), InvalidArgument);
}

}  // TEST_SUITE

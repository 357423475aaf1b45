#include <doctest.h>

#include <cmath>
#include <random>

#include "graphssl/continuum.hpp"
#include "graphssl/error.hpp"
#include "graphssl/transport.hpp"
#include "oracles.hpp"

using namespace graphssl;

namespace {

Matrix tl2_cost(const TL2Point& a, const TL2Point& b) {
  Matrix c(a.support.size(), b.support.size());
  for (Index i = 0; i < c.rows(); ++i) {
    for (Index j = 0; j < c.cols(); ++j) {
      const double d = oracle::circle_distance(a.support[i], b.support[j]);
      c(i, j) = d * d + (a.values[i] - b.values[j]) * (a.values[i] - b.values[j]);
    }
  }
  return c;
}

struct QuietWarnings {
  QuietWarnings() : old(set_warning_handler([](const std::string&) {})) {}
  ~QuietWarnings() { set_warning_handler(old); }
  WarningHandler old;
};

}  // namespace

TEST_SUITE("continuum") {

TEST_CASE("circle eigenpairs") {
  const CircleHarmonics one = circle_eigenpairs(1);
  CHECK(one.eigenvalues()[0] == 0.0);
  CHECK(one(0, 1.234) == 1.0);
  const CircleHarmonics h = circle_eigenpairs(7);
  Vector expected(7);
  expected << 0, 1, 1, 4, 4, 9, 9;
  CHECK(h.eigenvalues() == expected);
  CHECK(h(3, 0.3) == doctest::Approx(std::sqrt(2.0) * std::cos(0.6)));
  CHECK(h(4, 0.3) == doctest::Approx(std::sqrt(2.0) * std::sin(0.6)));
}

TEST_CASE("circle eigenfunctions are orthonormal under quadrature") {
  for (Index count : {3, 16, 33}) {
    const CircleHarmonics h = circle_eigenpairs(count);
    const Index m = 10000;
    Vector angles(m);
    for (Index i = 0; i < m; ++i) angles[i] = 2.0 * M_PI * (i + 0.5) / m;
    const Matrix e = h.evaluate(angles);
    const Matrix gram = e.transpose() * e / static_cast<double>(m);
    CHECK((gram - Matrix::Identity(count, count)).cwiseAbs().maxCoeff() < 1e-6);
    // -psi'' = lambda psi, by second differences.
    const double step = 1e-4;
    for (Index i = 0; i < count; ++i) {
      const double t = 0.77;
      const double d2 = (h(i, t + step) - 2.0 * h(i, t) + h(i, t - step)) / (step * step);
      CHECK(std::abs(-d2 - h.eigenvalues()[i] * h(i, t)) < 1e-4 * std::max(1.0, h.eigenvalues()[i]));
    }
  }
}

TEST_CASE("circle geodesic distance") {
  CHECK(CircleManifold::distance(0.1, 2.0 * M_PI - 0.1) == doctest::Approx(0.2));
  CHECK(CircleManifold::distance(0.0, M_PI) == doctest::Approx(M_PI));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int t = 0; t < 200; ++t) {
    const double a = angle(rng), b = angle(rng), c = angle(rng);
    CHECK(CircleManifold::distance(a, b) == CircleManifold::distance(b, a));
    CHECK(CircleManifold::distance(a, b) <= M_PI + 1e-15);
    CHECK(CircleManifold::distance(a, c) <= CircleManifold::distance(a, b) + CircleManifold::distance(b, c) + 1e-12);
  }
}

TEST_CASE("assignment solver against brute force") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 60; ++rep) {
    const Index m = 1 + rep % 8;
    Matrix c(m, m);
    for (Index i = 0; i < c.size(); ++i) c.data()[i] = unit(rng);
    std::vector<Index> assignment;
    const double total = solve_assignment(c, &assignment);
    CHECK(total == doctest::Approx(oracle::brute_force_assignment(c)).epsilon(1e-12));
    double check = 0.0;
    std::vector<char> used(m, 0);
    for (Index i = 0; i < m; ++i) {
      check += c(i, assignment[i]);
      CHECK_FALSE(used[assignment[i]]);
      used[assignment[i]] = 1;
    }
    CHECK(check == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("network simplex against a unit-splitting brute force") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 80; ++rep) {
    const int rows = 1 + static_cast<int>(rng() % 4), cols = 1 + static_cast<int>(rng() % 5);
    const int total = std::max(rows, cols) + static_cast<int>(rng() % 3);
    auto split = [&](int parts) {
      std::vector<int> w(parts, 1);
      for (int r = parts; r < total; ++r) ++w[rng() % parts];
      return w;
    };
    const std::vector<int> a = split(rows), b = split(cols);
    Matrix c(rows, cols);
    for (Index i = 0; i < c.size(); ++i) c.data()[i] = unit(rng);
    const double ref = oracle::brute_force_transport(a, b, c);

    std::vector<long long> ai(a.begin(), a.end()), bi(b.begin(), b.end());
    Matrix plan;
    const double exact = solve_transport(ai, bi, c, &plan) / total;
    CHECK(exact == doctest::Approx(ref).epsilon(1e-12));
    CHECK((plan.rowwise().sum() - Eigen::Map<const Eigen::VectorXi>(a.data(), rows).cast<double>())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK(plan.minCoeff() >= 0.0);

    Vector ad(rows), bd(cols);
    for (int i = 0; i < rows; ++i) ad[i] = a[i] / double(total);
    for (int j = 0; j < cols; ++j) bd[j] = b[j] / double(total);
    Matrix pd;
    CHECK(solve_transport(ad, bd, c, &pd) == doctest::Approx(ref).epsilon(1e-10));
    CHECK((pd.colwise().sum().transpose() - bd).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pd.array() * c.array()).sum() == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("network simplex agrees with assignment on uniform square problems") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Index m : {5, 30, 120}) {
    Matrix c(m, m);
    for (Index i = 0; i < c.size(); ++i) c.data()[i] = unit(rng);
    const std::vector<long long> ones(static_cast<std::size_t>(m), 1);
    CHECK(solve_transport(ones, ones, c) == doctest::Approx(solve_assignment(c)).epsilon(1e-12));
  }
}

TEST_CASE("transport rejects infeasible marginals") {
  Matrix c = Matrix::Ones(2, 2);
  Vector a(2), b(2);
  a << 0.5, 0.5;
  b << 0.5, 0.6;
  CHECK_THROWS_AS(solve_transport(a, b, c), InvalidArgument);
  b << 1.5, -0.5;
  CHECK_THROWS_AS(solve_transport(a, b, c), InvalidArgument);
}

TEST_CASE("TL2 distance examples") {
  Vector s(2), zero(2), one(2);
  s << 0.0, M_PI;
  zero << 0.0, 0.0;
  one << 1.0, 1.0;
  const TL2Point a = TL2Point::uniform(s, zero), b = TL2Point::uniform(s, one);
  CHECK(tl2_distance(a, a) == 0.0);
  CHECK(tl2_distance(a, b) == doctest::Approx(1.0).epsilon(1e-14));

  // Constant shift on a shared support, general weights.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const Index m = 2 + rep % 7;
    TL2Point p;
    p.support.resize(m);
    p.weights.resize(m);
    p.values.resize(m);
    for (Index i = 0; i < m; ++i) {
      p.support[i] = 2.0 * M_PI * unit(rng);
      p.weights[i] = 0.1 + unit(rng);
      p.values[i] = unit(rng);
    }
    p.weights /= p.weights.sum();
    TL2Point q = p;
    q.values.array() += 0.3;
    CHECK(tl2_distance(p, q) == doctest::Approx(0.3).epsilon(1e-10));
  }

  TL2Point bad = a;
  bad.weights << 0.5, 0.6;
  CHECK_THROWS_AS(tl2_distance(bad, a), InvalidArgument);
}

TEST_CASE("TL2 distance matches brute force on small uniform measures") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const Index m = 1 + rep % 8;
    Vector sa(m), sb(m), va(m), vb(m);
    for (Index i = 0; i < m; ++i) {
      sa[i] = 2.0 * M_PI * unit(rng);
      sb[i] = 2.0 * M_PI * unit(rng);
      va[i] = unit(rng);
      vb[i] = unit(rng);
    }
    const TL2Point a = TL2Point::uniform(sa, va), b = TL2Point::uniform(sb, vb);
    const double ref = std::sqrt(oracle::brute_force_assignment(tl2_cost(a, b)) / static_cast<double>(m));
    CHECK(tl2_distance(a, b) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("TL2 distance is a metric on a shared support") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const Index m = 2 + rep % 15;
    Vector support(m);
    for (Index i = 0; i < m; ++i) support[i] = 2.0 * M_PI * unit(rng);
    auto point = [&] {
      Vector v(m);
      for (Index i = 0; i < m; ++i) v[i] = 2.0 * unit(rng);
      return TL2Point::uniform(support, v);
    };
    const TL2Point a = point(), b = point(), c = point();
    const double ab = tl2_distance(a, b), ba = tl2_distance(b, a), bc = tl2_distance(b, c), ac = tl2_distance(a, c);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ac <= ab + bc + 1e-9);
    CHECK(ab <= (a.values - b.values).norm() / std::sqrt(static_cast<double>(m)) + 1e-12);
  }
}

TEST_CASE("unequal sizes use the general solver") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const Index ma = 2 + rep % 3, mb = 2 * ma;
    Vector sa(ma), sb(mb), va(ma), vb(mb);
    for (Index i = 0; i < ma; ++i) sa[i] = 2.0 * M_PI * unit(rng), va[i] = unit(rng);
    for (Index i = 0; i < mb; ++i) sb[i] = 2.0 * M_PI * unit(rng), vb[i] = unit(rng);
    const TL2Point a = TL2Point::uniform(sa, va), b = TL2Point::uniform(sb, vb);
    const double ref = oracle::brute_force_transport(std::vector<int>(ma, 2), std::vector<int>(mb, 1), tl2_cost(a, b));
    CHECK(tl2_distance(a, b) == doctest::Approx(std::sqrt(ref)).epsilon(1e-12));
  }
}

TEST_CASE("graph spectrum on the circle") {
  QuietWarnings quiet;
  const SpectrumCheck r = graph_spectrum_vs_circle(600, 7, 2.0, 3);
  CHECK(std::abs(r.eigenvalues[0]) < 1e-8);
  CHECK(r.reference.size() == 7);
  CHECK(r.relative_errors.allFinite());
  REQUIRE(r.subspace_angles.size() == 3);
  for (double a : r.subspace_angles) CHECK(a >= 0.0);
  CHECK(r.subspace_angles[0] < 0.3);
  CHECK_THROWS_AS(graph_spectrum_vs_circle(100, 11, 2.0, 0), InvalidArgument);
}

TEST_CASE("principal angle") {
  Matrix a(3, 1), b(3, 2);
  a << 1, 0, 0;
  b << 0, 0, 1, 0, 0, 1;
  CHECK(principal_angle(a, b) == doctest::Approx(M_PI / 2));
  b << 1, 0, 0, 1, 0, 0;
  CHECK(principal_angle(a, b) == doctest::Approx(0.0).epsilon(1e-12));
  Matrix c(2, 1), d(2, 1);
  c << 1, 0;
  d << 1, 1;
  CHECK(principal_angle(c, d) == doctest::Approx(M_PI / 4));
}

TEST_CASE("coupled prior discrepancy: determinism, sign and the constant mode") {
  QuietWarnings quiet;
  CoupledPriorConfig cfg;
  cfg.trials = 4;
  cfg.grid = 512;
  cfg.seed = 9;
  const auto rows = coupled_prior_discrepancy({64, 128, 64}, cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].estimate == rows[2].estimate);
  for (const auto& r : rows) CHECK(r.estimate >= 0.0);
  CHECK(coupled_prior_discrepancy({64}, cfg)[0].estimate == rows[0].estimate);

  cfg.modes = 1;
  cfg.trials = 10;
  cfg.grid = 2048;
  CHECK(coupled_prior_discrepancy({512}, cfg)[0].estimate < 0.05);
}

TEST_CASE("coupled prior discrepancy is insensitive to the reference grid") {
  QuietWarnings quiet;
  CoupledPriorConfig cfg;
  cfg.trials = 3;
  cfg.seed = 10;
  const double coarse = coupled_prior_discrepancy({256}, cfg)[0].estimate;
  cfg.grid = 4096;
  const double fine = coupled_prior_discrepancy({256}, cfg)[0].estimate;
  CHECK(std::abs(fine - coarse) < 0.02 * coarse);
}

TEST_CASE("contraction study") {
  QuietWarnings quiet;
  SUBCASE("noise-free, fully labeled tiny problem interpolates") {
    ContractionConfig cfg;
    cfg.noise_std = 0.0;
    cfg.trials = 1;
    cfg.points_for = [](Index n) { return n; };
    const auto rows = contraction_study({12}, cfg);
    CHECK(rows[0].n_points == 12);
    CHECK(rows[0].median_error < 1e-2);
  }
  SUBCASE("reproducible") {
    ContractionConfig cfg;
    cfg.trials = 1;
    cfg.seed = 4;
    const auto a = contraction_study({10, 20}, cfg);
    const auto b = contraction_study({10, 20}, cfg);
    CHECK(a[0].median_error == b[0].median_error);
    CHECK(a[1].median_error == b[1].median_error);
    CHECK(a[0].n_points == 200);
    CHECK(a[1].n_points == 400);
  }
}

}  // TEST_SUITE

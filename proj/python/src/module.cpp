#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graphssl/continuum.hpp"
#include "graphssl/datasets.hpp"
#include "graphssl/error.hpp"
#include "graphssl/model.hpp"
#include "graphssl/sampler.hpp"

namespace py = pybind11;
using namespace graphssl;

namespace {

Link parse_link(const std::string& name) {
  if (name == "logistic") return Link::logistic;
  if (name == "probit") return Link::probit;
  throw InvalidArgument("unknown link '" + name + "'");
}

std::vector<Label> make_labels(const std::vector<Index>& nodes, const std::vector<double>& values) {
  if (nodes.size() != values.size()) throw InvalidArgument("label nodes and values differ in length");
  std::vector<Label> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) out.push_back({nodes[i], values[i]});
  return out;
}

std::shared_ptr<const Spectrum> spectrum_of(const SparseMatrix& weights, Index truncation) {
  const Laplacian lap = laplacian(Graph(weights, GraphMeta{}));
  return std::make_shared<const Spectrum>(
      eigendecompose(lap, truncation > 0 ? truncation : default_truncation(lap.size())));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph-based Bayesian semi-supervised learning";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<Unsupported>(m, "Unsupported", PyExc_NotImplementedError);

  m.def("default_connectivity", &default_connectivity, py::arg("n_points"), py::arg("intrinsic_dim"),
        py::arg("smoothness"));

  m.def(
      "epsilon_graph",
      [](const Matrix& features, int intrinsic_dim, double h) {
        return build_epsilon_graph(features, intrinsic_dim, h).weights();
      },
      py::arg("features"), py::arg("intrinsic_dim"), py::arg("h"), "Calibrated epsilon-graph weights (scipy.sparse).");

  m.def(
      "knn_graph",
      [](const Matrix& features, int k, double lengthscale) {
        return build_knn_graph(features, k, SquaredExponential{lengthscale}).weights();
      },
      py::arg("features"), py::arg("k"), py::arg("lengthscale") = 1.0);

  m.def(
      "laplacian_spectrum",
      [](const SparseMatrix& weights, Index k) {
        const Spectrum s = eigendecompose(laplacian(Graph(weights, GraphMeta{})), k);
        return py::make_tuple(s.eigenvalues(), s.eigenvectors());
      },
      py::arg("weights"), py::arg("k"), "Smallest k eigenpairs of L = D - W, ascending.");

  m.def(
      "two_moons",
      [](Index n_points, double noise, std::uint64_t seed) {
        const TwoMoons t = gen_two_moons(n_points, noise, seed);
        return py::make_tuple(t.features, t.classes);
      },
      py::arg("n_points"), py::arg("noise"), py::arg("seed") = 0);

  m.def(
      "sample_prior",
      [](const SparseMatrix& weights, double tau, double s, Index truncation, double covariance_scale,
         std::uint64_t seed) {
        const MaternPrior prior = MaternPrior::stationary(spectrum_of(weights, truncation), tau, s,
                                                          truncation > 0 ? truncation : default_truncation(weights.rows()),
                                                          covariance_scale);
        Rng rng(seed);
        return sample_prior(prior, rng);
      },
      py::arg("weights"), py::arg("tau"), py::arg("s"), py::arg("truncation") = 0, py::arg("covariance_scale") = 1.0,
      py::arg("seed") = 0);

  m.def(
      "regression_posterior",
      [](const SparseMatrix& weights, const std::vector<Index>& nodes, const std::vector<double>& values,
         double noise_std, double tau, double s, double covariance_scale) {
        const Laplacian lap = laplacian(Graph(weights, GraphMeta{}));
        const Dataset d = Dataset::regression(Matrix::Zero(lap.size(), 1), make_labels(nodes, values), noise_std);
        const GaussianPosterior p = exact_gaussian_posterior(lap, tau, s, d, covariance_scale);
        return py::make_tuple(p.mean, p.covariance);
      },
      py::arg("weights"), py::arg("nodes"), py::arg("values"), py::arg("noise_std"), py::arg("tau"), py::arg("s"),
      py::arg("covariance_scale") = 1.0, "Exact conjugate posterior mean and covariance.");

  m.def(
      "pcn",
      [](const SparseMatrix& weights, const std::vector<Index>& nodes, const std::vector<double>& values,
         const std::string& task, double noise_std, double tau, double s, Index truncation, double covariance_scale,
         double theta, std::int64_t iterations, std::uint64_t seed, const std::string& link) {
        const Index n = weights.rows();
        const Index t = truncation > 0 ? truncation : default_truncation(n);
        const MaternPrior prior = MaternPrior::stationary(spectrum_of(weights, t), tau, s, t, covariance_scale);
        const Matrix features = Matrix::Zero(n, 1);
        Dataset d = task == "regression"       ? Dataset::regression(features, make_labels(nodes, values), noise_std)
                    : task == "classification" ? Dataset::classification(features, make_labels(nodes, values))
                                               : throw InvalidArgument("task must be regression or classification");
        ChainConfig cfg;
        cfg.theta = theta;
        cfg.iterations = iterations;
        cfg.seed = seed;
        cfg.link = parse_link(link);
        const ChainResult r = run_chain(cfg, prior, Likelihood(d, cfg.link));
        py::dict out;
        out["mean"] = r.summary.mean;
        out["variance"] = r.summary.variance;
        out["acceptance_rate"] = r.summary.acceptance_rate;
        out["effective_sample_size"] = r.summary.effective_sample_size;
        if (d.task() == TaskKind::classification) {
          out["class_probabilities"] = r.summary.class_probabilities;
          out["class_labels"] = r.summary.class_labels;
        }
        return out;
      },
      py::arg("weights"), py::arg("nodes"), py::arg("values"), py::arg("task") = "regression",
      py::arg("noise_std") = 0.1, py::arg("tau") = 1.0, py::arg("s") = 2.0, py::arg("truncation") = 0,
      py::arg("covariance_scale") = 1.0, py::arg("theta") = 0.1, py::arg("iterations") = 10000, py::arg("seed") = 0,
      py::arg("link") = "logistic", "Run one pCN chain and return the posterior summary.");

  m.def(
      "tl2_distance",
      [](const Vector& angles_a, const Vector& values_a, const Vector& angles_b, const Vector& values_b) {
        return tl2_distance(TL2Point::uniform(angles_a, values_a), TL2Point::uniform(angles_b, values_b));
      },
      py::arg("angles_a"), py::arg("values_a"), py::arg("angles_b"), py::arg("values_b"),
      "TL2 distance between two uniformly weighted functions on the unit circle.");

  m.def(
      "spectrum_vs_circle",
      [](Index n_points, Index k, double s, std::uint64_t seed) {
        const SpectrumCheck c = graph_spectrum_vs_circle(n_points, k, s, seed);
        py::dict out;
        out["connectivity"] = c.connectivity;
        out["eigenvalues"] = c.eigenvalues;
        out["reference"] = c.reference;
        out["relative_errors"] = c.relative_errors;
        out["subspace_angles"] = c.subspace_angles;
        return out;
      },
      py::arg("n_points"), py::arg("k"), py::arg("s") = 2.0, py::arg("seed") = 0);
}

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "graphssl/continuum.hpp"
#include "graphssl/error.hpp"
#include "graphssl/experiments.hpp"
#include "graphssl/io.hpp"
#include "graphssl/model.hpp"
#include "graphssl/sampler.hpp"

namespace graphssl::cli {

namespace {

namespace fs = std::filesystem;

using Extras = std::vector<std::pair<std::string, std::string>>;

struct Global {
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string config;
  std::string format = "csv";
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Index> parse_list(const std::string& text, const std::string& what) {
  std::vector<Index> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size() || v < 1) {
      throw InvalidArgument(what + ": '" + item + "' is not a positive integer");
    }
    out.push_back(static_cast<Index>(v));
  }
  if (out.empty()) throw InvalidArgument(what + " is empty");
  return out;
}

Link parse_link(const std::string& name) { return name == "probit" ? Link::probit : Link::logistic; }

class Output {
 public:
  Output(const Global& g) : dir_(g.out), format_(g.format == "gnuplot" ? Format::gnuplot : Format::csv) {
    fs::create_directories(dir_);
  }

  fs::path path(const std::string& stem) const {
    return dir_ / (stem + (format_ == Format::csv ? ".csv" : ".dat"));
  }
  void table(const std::string& stem, const Table& t) const { t.save(path(stem).string(), format_); }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  Format format_;
};

std::string option_key(const CLI::Option* opt) {
  std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
  std::replace(name.begin(), name.end(), '-', '_');
  return name == "out" ? "output_dir" : name;
}

std::string option_value(const CLI::Option* opt) {
  if (opt->count() > 0 && !opt->results().empty()) return opt->results().back();
  return opt->get_default_str();
}

void write_manifest(const Output& out, const CLI::App& app, const CLI::App& sub, const Extras& extras) {
  std::ofstream m(out.dir() / "manifest");
  if (!m) throw InvalidArgument("cannot write the manifest in " + out.dir().string());
  m << "command = " << sub.get_name() << '\n';
  for (const CLI::App* scope : {&app, &sub}) {
    for (const CLI::Option* opt : scope->get_options()) {
      const std::string key = option_key(opt);
      if (key == "help" || key == "config") continue;
      m << key << " = " << option_value(opt) << '\n';
    }
  }
  for (const auto& [k, v] : extras) m << k << " = " << v << '\n';
}

// Flat `key = value` lines become `--key=value` tokens, unless the flag is also on the command
// line (flags override the file).
void inject_config(CLI::App& app, std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);

  std::size_t sub_pos = args.size();
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size() && !sub; ++i) {
    for (CLI::App* candidate : app.get_subcommands({})) {
      if (candidate->get_name() == args[i]) {
        sub = candidate;
        sub_pos = i;
        break;
      }
    }
  }
  auto given = [&](const CLI::Option* opt) {
    for (const auto& name : opt->get_lnames()) {
      for (const auto& a : args) {
        if (a == "--" + name || a.rfind("--" + name + "=", 0) == 0) return true;
      }
    }
    return false;
  };

  std::vector<std::string> tokens;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(path + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    const CLI::Option* opt = nullptr;
    if (name != "config" && name != "help") {
      if (sub) opt = sub->get_option_no_throw("--" + name);
      if (!opt) opt = app.get_option_no_throw("--" + name);
    }
    if (!opt) throw InvalidArgument("unknown config key '" + key + "' in " + path);
    if (!given(opt)) tokens.push_back("--" + name + "=" + value);
  }
  const std::size_t at = sub ? sub_pos + 1 : args.size();
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), tokens.begin(), tokens.end());
}

void add_chain_options(CLI::App* sub, ChainConfig& chain, int* chains) {
  sub->add_option("--theta", chain.theta, "pCN step size in (0, 1)");
  sub->add_option("--iters", chain.iterations, "chain length K");
  sub->add_option("--burn-in", chain.burn_in, "discarded initial steps (negative: K/5)");
  sub->add_option("--thin", chain.thinning, "keep every thin-th post-burn-in state");
  if (chains) sub->add_option("--chains", *chains, "independent chains (split R-hat when >= 2)");
}

// ---------------------------------------------------------------------------------------------

struct TwoMoonsCommand {
  TwoMoonsExperimentConfig cfg;
  std::string link = "logistic";

  void attach(CLI::App* sub) {
    sub->add_option("--n", cfg.n_points, "number of points (even)");
    sub->add_option("--labels-per-class", cfg.labels_per_class);
    sub->add_option("--noise", cfg.noise, "feature noise standard deviation");
    sub->add_option("--k", cfg.neighbors, "nearest neighbours");
    sub->add_option("--lengthscale", cfg.lengthscale, "squared-exponential lengthscale");
    sub->add_option("--tau", cfg.tau);
    sub->add_option("--s", cfg.smoothness);
    sub->add_option("--covariance-scale", cfg.covariance_scale);
    sub->add_option("--truncation", cfg.truncation, "retained modes (0: min(N, 256))");
    sub->add_option("--link", link)->check(CLI::IsMember({"logistic", "probit"}));
    add_chain_options(sub, cfg.chain, &cfg.chains);
  }

  Extras run(const Global& g, const Output& out) {
    cfg.seed = g.seed;
    cfg.chain.link = parse_link(link);
    const TwoMoonsExperimentResult r = run_two_moons_experiment(cfg);
    std::set<Index> labeled;
    for (const auto& l : r.labels) labeled.insert(l.node);
    Table summary({"node", "x", "y", "class_probability", "posterior_std", "predicted_class", "true_class", "labeled"});
    for (Index i = 0; i < cfg.n_points; ++i) {
      const auto si = static_cast<std::size_t>(i);
      summary.add_row({double(i), r.moons.features(i, 0), r.moons.features(i, 1), r.summary.class_probabilities[i],
                       r.posterior_std[i], double(r.summary.class_labels[si]), double(r.moons.classes[si]),
                       labeled.count(i) ? 1.0 : 0.0});
    }
    out.table("summary", summary);
    Table labels({"index", "value"});
    for (const auto& l : r.labels) labels.add_row({double(l.node), l.value});
    out.table("labels", labels);

    std::cout << "accuracy on " << cfg.n_points - static_cast<Index>(r.labels.size())
              << " unlabeled nodes: " << format_double(r.accuracy) << '\n'
              << "posterior std: labeled neighbourhoods " << format_double(r.neighborhood_std) << ", all nodes "
              << format_double(r.global_std) << '\n';
    Extras e = {{"geometry", "class 0: (cos t, sin t); class 1: (1 - cos t, 0.5 - sin t); t ~ U[0, pi]"},
                {"label_selection", "stratified uniform"},
                {"accuracy_unlabeled", format_double(r.accuracy)},
                {"labeled_neighborhood_std", format_double(r.neighborhood_std)},
                {"global_posterior_std", format_double(r.global_std)},
                {"acceptance_rate", format_double(r.summary.acceptance_rate)}};
    if (cfg.chains > 1) e.push_back({"r_hat", r.r_hat ? format_double(*r.r_hat) : "degenerate"});
    return e;
  }
};

struct GalleryCommand {
  GalleryConfig cfg;

  void attach(CLI::App* sub) {
    sub->add_option("--n", cfg.n_points);
    sub->add_option("--tau-low", cfg.tau_low);
    sub->add_option("--tau-high", cfg.tau_high);
    sub->add_option("--s-low", cfg.s_low);
    sub->add_option("--s-high", cfg.s_high);
    sub->add_flag("--couple", cfg.couple, "drive every cell with the same standard normal vector");
  }

  Extras run(const Global& g, const Output& out) {
    cfg.seed = g.seed;
    const GalleryResult r = prior_gallery(cfg);
    Extras e;
    for (const auto& cell : r.cells) {
      Table t({"node", "x", "y", "theta", "tau", "value"});
      for (Index i = 0; i < cfg.n_points; ++i) {
        t.add_row({double(i), r.points(i, 0), r.points(i, 1), r.angles[i], cell.tau[i], cell.values[i]});
      }
      out.table("prior_" + cell.name, t);
      e.push_back({"energy_" + cell.name, format_double(cell.energy)});
    }
    e.push_back({"connectivity", format_double(r.connectivity)});
    return e;
  }
};

struct RunCommand {
  std::string features, labels, task = "regression", graph = "epsilon", link = "logistic", tau_file;
  bool header = false, map = false, oracle = false, export_graph = false, export_spectrum = false;
  double noise_std = 0.0, h = 0.0, lengthscale = 1.0, tau = 1.0, s = 2.0, covariance_scale = 1.0, weight_scale = 1.0;
  int m = 1, k = 8, chains = 1;
  Index truncation = 0;
  ChainConfig chain;

  void attach(CLI::App* sub) {
    sub->add_option("--features", features, "feature CSV, one point per row")->required();
    sub->add_option("--labels", labels, "label CSV with columns index,value")->required();
    sub->add_flag("--header", header, "skip the first line of both CSV files");
    sub->add_option("--task", task)->check(CLI::IsMember({"regression", "classification"}));
    sub->add_option("--noise-std", noise_std, "regression noise standard deviation");
    sub->add_option("--graph", graph)->check(CLI::IsMember({"epsilon", "knn"}));
    sub->add_option("--m", m, "intrinsic dimension (epsilon graph)");
    sub->add_option("--connectivity", h, "epsilon-graph connectivity h (0: default)");
    sub->add_option("--weight-scale", weight_scale, "multiply all weights (e.g. manifold volume)");
    sub->add_option("--k", k, "nearest neighbours (knn graph)");
    sub->add_option("--lengthscale", lengthscale);
    sub->add_option("--tau", tau);
    sub->add_option("--tau-file", tau_file, "per-node tau, one value per line (nonstationary prior)");
    sub->add_option("--s", s);
    sub->add_option("--truncation", truncation, "retained modes (0: min(N, 256))");
    sub->add_option("--covariance-scale", covariance_scale);
    sub->add_option("--link", link)->check(CLI::IsMember({"logistic", "probit"}));
    sub->add_flag("--map", map, "also write the MAP estimate");
    sub->add_flag("--oracle", oracle, "also write the conjugate posterior (regression, N <= 512)");
    sub->add_flag("--export-graph", export_graph);
    sub->add_flag("--export-spectrum", export_spectrum);
    add_chain_options(sub, chain, &chains);
  }

  Extras run(const Global& g, const Output& out) {
    if (!fs::exists(features)) throw InvalidArgument("feature file not found: " + features);
    if (!fs::exists(labels)) throw InvalidArgument("label file not found: " + labels);
    const Matrix x = read_features_csv(features, header);
    auto y = read_labels_csv(labels, header);
    const Dataset data = task == "regression" ? Dataset::regression(x, std::move(y), noise_std)
                                              : Dataset::classification(x, std::move(y));
    const Index n = data.size();
    Graph gr = graph == "epsilon"
                   ? build_epsilon_graph(x, m, h > 0.0 ? h : default_connectivity(n, m, s))
                   : build_knn_graph(x, k, {lengthscale});
    if (weight_scale != 1.0) gr = gr.scaled(weight_scale);
    auto lap = std::make_shared<const Laplacian>(laplacian(gr));

    std::optional<MaternPrior> prior;
    std::shared_ptr<const Spectrum> spectrum;
    if (!tau_file.empty()) {
      const auto rows = read_numeric_csv(tau_file);
      if (static_cast<Index>(rows.size()) != n) throw InvalidArgument("tau file must have one row per node");
      Vector t(n);
      for (Index i = 0; i < n; ++i) t[i] = rows[static_cast<std::size_t>(i)].at(0);
      prior = MaternPrior::nonstationary(lap, t, s, covariance_scale);
    } else {
      const Index kk = truncation > 0 ? truncation : default_truncation(n);
      spectrum = std::make_shared<const Spectrum>(eigendecompose(*lap, kk));
      prior = MaternPrior::stationary(spectrum, tau, s, kk, covariance_scale);
      if (prior->truncation_tail_bound() > 1e-3) {
        warn("truncation keeps less than 99.9% of the prior variance (tail bound " +
             format_double(prior->truncation_tail_bound()) + ")");
      }
    }
    chain.seed = g.seed;
    chain.link = parse_link(link);
    const Likelihood likelihood(data, chain.link);

    Extras e;
    PosteriorSummary summary;
    Table trace({"chain", "iteration", "log_likelihood", "accepted"});
    auto add_trace = [&](const ChainTrace& t, int c) {
      for (std::size_t i = 0; i < t.log_likelihood.size(); ++i) {
        trace.add_row({double(c), double(i + 1), t.log_likelihood[i], double(t.accepted[i])});
      }
    };
    if (chains > 1) {
      MultiChainResult r = multi_chain(chain, chains, *prior, likelihood);
      summary = std::move(r.summary);
      for (std::size_t c = 0; c < r.chains.size(); ++c) add_trace(r.chains[c].trace, static_cast<int>(c));
      e.push_back({"r_hat", r.r_hat ? format_double(*r.r_hat) : "degenerate"});
    } else {
      ChainResult r = run_chain(chain, *prior, likelihood);
      summary = std::move(r.summary);
      add_trace(r.trace, 0);
    }
    const bool classification = data.task() == TaskKind::classification;
    std::vector<std::string> cols = {"node", "mean", "variance", "q05", "q50", "q95"};
    if (classification) {
      cols.push_back("class_probability");
      cols.push_back("predicted_class");
    }
    Table table(cols);
    const bool quantiles = summary.q05.size() == n;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (Index i = 0; i < n; ++i) {
      std::vector<double> row = {double(i), summary.mean[i], summary.variance[i], quantiles ? summary.q05[i] : nan,
                                 quantiles ? summary.q50[i] : nan, quantiles ? summary.q95[i] : nan};
      if (classification) {
        row.push_back(summary.class_probabilities[i]);
        row.push_back(summary.class_labels[static_cast<std::size_t>(i)]);
      }
      table.add_row(std::move(row));
    }
    out.table("summary", table);
    out.table("trace", trace);

    if (map) {
      const Vector u = map_estimate(*prior, data, chain.link);
      Table t({"node", "value"});
      for (Index i = 0; i < n; ++i) t.add_row({double(i), u[i]});
      out.table("map", t);
    }
    if (oracle) {
      const GaussianPosterior post = exact_gaussian_posterior(*prior, data);
      Table t({"node", "mean", "variance"});
      for (Index i = 0; i < n; ++i) t.add_row({double(i), post.mean[i], post.covariance(i, i)});
      out.table("oracle", t);
    }
    if (export_graph) {
      std::ofstream f(out.dir() / "graph.csv");
      write_edge_list(gr, f);
    }
    if (export_spectrum && spectrum) {
      std::ofstream f(out.dir() / "spectrum.csv");
      write_spectrum_csv(*spectrum, f);
    }
    e.push_back({"acceptance_rate", format_double(summary.acceptance_rate)});
    e.push_back({"effective_sample_size", format_double(summary.effective_sample_size)});
    std::cout << "acceptance rate " << format_double(summary.acceptance_rate) << ", ESS "
              << format_double(summary.effective_sample_size) << '\n';
    return e;
  }
};

struct AcceptanceCommand {
  std::string n_list = "200,400,800,1600";
  MoonsStudyConfig study;
  std::string link = "logistic";
  ChainConfig chain = [] {
    ChainConfig c;
    c.iterations = 50000;
    c.reservoir_size = 0;
    return c;
  }();

  void attach(CLI::App* sub) {
    sub->add_option("--n-list", n_list, "comma-separated N values");
    sub->add_option("--labels-per-class", study.labels_per_class);
    sub->add_option("--feature-noise", study.feature_noise);
    sub->add_option("--tau", study.tau);
    sub->add_option("--s", study.smoothness);
    sub->add_option("--link", link)->check(CLI::IsMember({"logistic", "probit"}));
    add_chain_options(sub, chain, nullptr);
  }

  Extras run(const Global& g, const Output& out) {
    const auto ns = parse_list(n_list, "n_list");
    study.link = parse_link(link);
    chain.seed = g.seed;
    chain.link = study.link;
    const auto rows = acceptance_vs_n_study(
        [&](Index n, std::uint64_t seed) { return two_moons_problem(n, seed, study); }, ns, chain);
    Table t({"n_points", "acceptance_rate", "ess_per_iteration"});
    for (const auto& r : rows) {
      t.add_row({double(r.n_points), r.acceptance_rate, r.ess_per_iteration});
      std::cout << "N = " << r.n_points << ": acceptance " << format_double(r.acceptance_rate) << ", ESS/K "
                << format_double(r.ess_per_iteration) << '\n';
    }
    out.table("acceptance", t);
    return {{"graph", "calibrated epsilon graph, m = 1, weights x 2 pi"}, {"covariance_scale", "N"}};
  }
};

struct ConvergenceCommand {
  std::string n_list = "64,128,256,512";
  CoupledPriorConfig cfg;

  void attach(CLI::App* sub) {
    sub->add_option("--n-list", n_list, "comma-separated N values");
    sub->add_option("--tau", cfg.tau);
    sub->add_option("--s", cfg.smoothness);
    sub->add_option("--modes", cfg.modes, "truncation b");
    sub->add_option("--trials", cfg.trials);
    sub->add_option("--grid", cfg.grid, "continuum reference grid size");
  }

  Extras run(const Global& g, const Output& out) {
    cfg.seed = g.seed;
    const auto rows = coupled_prior_discrepancy(parse_list(n_list, "n_list"), cfg);
    Table t({"n_points", "estimate", "standard_error"});
    for (const auto& r : rows) {
      t.add_row({double(r.n_points), r.estimate, r.standard_error});
      std::cout << "N = " << r.n_points << ": E d_TL2^2 ~ " << format_double(r.estimate) << " +- "
                << format_double(r.standard_error) << '\n';
    }
    out.table("discrepancy", t);
    return {{"covariance_scale", "N"}};
  }
};

struct SpectrumCommand {
  Index n = 1000;
  Index k = 7;
  double s = 2.0;

  void attach(CLI::App* sub) {
    sub->add_option("--n", n);
    sub->add_option("--k", k, "compared modes (<= 10)");
    sub->add_option("--s", s, "smoothness used by the connectivity window");
  }

  Extras run(const Global& g, const Output& out) {
    const SpectrumCheck r = graph_spectrum_vs_circle(n, k, s, g.seed);
    Table t({"index", "eigenvalue", "reference", "relative_error"});
    for (Index i = 0; i < r.eigenvalues.size(); ++i) {
      t.add_row({double(i), r.eigenvalues[i], r.reference[i], r.relative_errors[i]});
      std::cout << "lambda_" << i << " = " << format_double(r.eigenvalues[i]) << " (circle "
                << format_double(r.reference[i]) << ", relative error " << format_double(r.relative_errors[i]) << ")\n";
    }
    out.table("spectrum_check", t);
    Table a({"frequency", "subspace_angle"});
    for (std::size_t f = 0; f < r.subspace_angles.size(); ++f) {
      a.add_row({double(f + 1), r.subspace_angles[f]});
      std::cout << "frequency " << f + 1 << ": subspace angle " << format_double(r.subspace_angles[f]) << '\n';
    }
    out.table("subspace_angles", a);
    return {{"connectivity", format_double(r.connectivity)}};
  }
};

struct ContractionCommand {
  std::string n_list = "10,20,40,80";
  ContractionConfig cfg;

  void attach(CLI::App* sub) {
    sub->add_option("--n-list", n_list, "comma-separated label counts n");
    sub->add_option("--tau", cfg.tau);
    sub->add_option("--s", cfg.smoothness);
    sub->add_option("--noise", cfg.noise_std, "label noise delta");
    sub->add_option("--trials", cfg.trials);
  }

  Extras run(const Global& g, const Output& out) {
    cfg.seed = g.seed;
    const auto rows = contraction_study(parse_list(n_list, "n_list"), cfg);
    Table t({"labels", "n_points", "median_error"});
    for (const auto& r : rows) {
      t.add_row({double(r.labels), double(r.n_points), r.median_error});
      std::cout << "n = " << r.labels << " (N = " << r.n_points << "): median error " << format_double(r.median_error)
                << '\n';
    }
    out.table("contraction", t);
    return {{"truth", "sin(theta)"}, {"points_for_n", "max(n^2, 200)"}, {"covariance_scale", "N"}};
  }
};

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Graph-based Bayesian semi-supervised learning", "graphssl"};
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out,--output-dir", g.out, "output directory");
  app.add_option("--config", g.config, "flat key = value file; flags override it");
  app.add_option("--format", g.format, "table format")->check(CLI::IsMember({"csv", "gnuplot"}));

  TwoMoonsCommand two_moons;
  GalleryCommand gallery;
  RunCommand run_cmd;
  AcceptanceCommand acceptance;
  ConvergenceCommand convergence;
  SpectrumCommand spectrum;
  ContractionCommand contraction;
  CLI::App* subs[] = {
      app.add_subcommand("two-moons", "two-moons classification demo"),
      app.add_subcommand("prior-gallery", "prior draws on the circle for several (tau, s)"),
      app.add_subcommand("run", "full pipeline on CSV features and labels"),
      app.add_subcommand("acceptance-study", "pCN acceptance rate and ESS versus N"),
      app.add_subcommand("prior-convergence", "coupled TL2 discrepancy of graph and continuum priors"),
      app.add_subcommand("spectrum-check", "graph Laplacian spectrum versus the circle"),
      app.add_subcommand("contraction-study", "posterior mean error versus label count"),
  };
  two_moons.attach(subs[0]);
  gallery.attach(subs[1]);
  run_cmd.attach(subs[2]);
  acceptance.attach(subs[3]);
  convergence.attach(subs[4]);
  spectrum.attach(subs[5]);
  contraction.attach(subs[6]);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    inject_config(app, args);
    std::reverse(args.begin(), args.end());
    app.parse(args);

    const Output out(g);
    Extras extras;
    CLI::App* active = nullptr;
    for (CLI::App* sub : subs) {
      if (sub->parsed()) active = sub;
    }
    if (active == subs[0]) extras = two_moons.run(g, out);
    if (active == subs[1]) extras = gallery.run(g, out);
    if (active == subs[2]) extras = run_cmd.run(g, out);
    if (active == subs[3]) extras = acceptance.run(g, out);
    if (active == subs[4]) extras = convergence.run(g, out);
    if (active == subs[5]) extras = spectrum.run(g, out);
    if (active == subs[6]) extras = contraction.run(g, out);
    write_manifest(out, app, *active, extras);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const Unsupported& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace graphssl::cli

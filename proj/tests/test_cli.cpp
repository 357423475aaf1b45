#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "graphssl/continuum.hpp"
#include "graphssl/datasets.hpp"
#include "graphssl/error.hpp"
#include "graphssl/io.hpp"
#include "graphssl/model.hpp"

using namespace graphssl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("graphssl_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "graphssl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  auto old = set_warning_handler([](const std::string&) {});
  std::streambuf* out = std::cout.rdbuf();
  std::ostringstream sink;
  std::cout.rdbuf(sink.rdbuf());
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(out);
  set_warning_handler(old);
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> manifest(const fs::path& dir) {
  std::map<std::string, std::string> m;
  std::ifstream in(dir / "manifest");
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return m;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("two moons generator") {
  const TwoMoons m = gen_two_moons(200, 0.0, 1);
  int c0 = 0;
  for (Index i = 0; i < 200; ++i) {
    if (m.classes[static_cast<std::size_t>(i)] == 0) {
      ++c0;
      CHECK(std::abs(m.features.row(i).squaredNorm() - 1.0) < 1e-12);
      CHECK(m.features(i, 1) >= 0.0);
    } else {
      const double dx = m.features(i, 0) - 1.0, dy = m.features(i, 1) - 0.5;
      CHECK(std::abs(dx * dx + dy * dy - 1.0) < 1e-12);
      CHECK(dy <= 0.0);
    }
  }
  CHECK(c0 == 100);
  CHECK(gen_two_moons(200, 0.05, 7).features == gen_two_moons(200, 0.05, 7).features);
  CHECK_THROWS_AS(gen_two_moons(201, 0.0, 1), InvalidArgument);
}

TEST_CASE("stratified labels") {
  const TwoMoons m = gen_two_moons(200, 0.05, 2);
  Rng rng(3);
  const auto labels = stratified_labels(m.classes, 5, rng);
  REQUIRE(labels.size() == 10);
  std::set<Index> nodes;
  int ones = 0;
  for (const Label& l : labels) {
    nodes.insert(l.node);
    CHECK(l.value == m.classes[static_cast<std::size_t>(l.node)]);
    ones += l.value == 1.0;
  }
  CHECK(nodes.size() == 10);
  CHECK(ones == 5);
}

TEST_CASE("tables round-trip through CSV") {
  const fs::path dir = scratch("roundtrip");
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  Table t({"a", "b", "c"});
  for (int r = 0; r < 50; ++r) t.add_row({normal(rng), 1e-300 * normal(rng), 1e12 * normal(rng)});
  t.save((dir / "t.csv").string());
  const Table back = read_table_csv((dir / "t.csv").string());
  CHECK(back.columns() == t.columns());
  REQUIRE(back.rows().size() == 50);
  for (std::size_t r = 0; r < 50; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      const double x = t.rows()[r][c];
      CHECK(std::abs(back.rows()[r][c] - x) <= 1e-12 * std::abs(x));
    }
  }
  std::ostringstream g;
  t.write(g, Format::gnuplot);
  CHECK(g.str().rfind("# a b c\n", 0) == 0);
  CHECK(g.str().find(',') == std::string::npos);
}

TEST_CASE("CSV readers report line numbers") {
  const fs::path dir = scratch("csv");
  write_text(dir / "bad.csv", "1,2\n3,x\n");
  try {
    read_features_csv((dir / "bad.csv").string());
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  write_text(dir / "ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(read_features_csv((dir / "ragged.csv").string()), InvalidArgument);
  write_text(dir / "h.csv", "x,y\n1,2\n3,4\n");
  const Matrix x = read_features_csv((dir / "h.csv").string(), true);
  CHECK(x.rows() == 2);
  CHECK(x(1, 0) == 3.0);
  write_text(dir / "l.csv", "4,1.5\n0,-2\n");
  const auto labels = read_labels_csv((dir / "l.csv").string());
  REQUIRE(labels.size() == 2);
  CHECK(labels[0].node == 4);
  CHECK(labels[1].value == -2.0);
  write_text(dir / "frac.csv", "1.5,1\n");
  CHECK_THROWS_AS(read_labels_csv((dir / "frac.csv").string()), InvalidArgument);
  CHECK_THROWS_AS(read_features_csv((dir / "missing.csv").string()), InvalidArgument);
}

TEST_CASE("edge list and spectrum export") {
  SparseMatrix w(3, 3);
  w.insert(0, 1) = w.insert(1, 0) = 2.0;
  w.insert(1, 2) = w.insert(2, 1) = 0.5;
  std::ostringstream e;
  write_edge_list(Graph(w, {}), e);
  CHECK(e.str() == "i,j,weight\n0,1,2\n1,2,0.5\n");
  const Spectrum s = eigendecompose(laplacian(Graph(w, {})), 3);
  std::ostringstream sp;
  write_spectrum_csv(s, sp);
  std::istringstream in(sp.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 4);
}

TEST_CASE("config file, manifest and flag precedence") {
  const fs::path dir = scratch("config");
  write_text(dir / "ok.cfg", "# gallery\nn = 64\ntau_high = 12\noutput_dir = " + (dir / "from_file").string() + "\n");
  CHECK(run_cli({"--config", (dir / "ok.cfg").string(), "prior-gallery", "--tau-high", "20"}) == 0);
  const auto m = manifest(dir / "from_file");
  CHECK(m.at("command") == "prior-gallery");
  CHECK(m.at("n") == "64");
  CHECK(m.at("tau_high") == "20");
  CHECK(m.at("seed") == "0");
  CHECK(m.at("output_dir") == (dir / "from_file").string());
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "from_file")) files += entry.path().extension() == ".csv";
  CHECK(files == 4);

  write_text(dir / "bad.cfg", "n = 64\nsmoothness_typo = 3\n");
  CHECK(run_cli({"--config", (dir / "bad.cfg").string(), "--out", (dir / "x").string(), "prior-gallery"}) == 1);
  CHECK(run_cli({"prior-gallery", "--no-such-flag"}) == 1);
  CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("prior gallery: coupled cells share the noise and runs are reproducible") {
  const fs::path dir = scratch("gallery");
  for (const char* sub : {"a", "b"}) {
    CHECK(run_cli({"--seed", "5", "--out", (dir / sub).string(), "prior-gallery", "--n", "128", "--couple"}) == 0);
  }
  for (const char* cell : {"tau_low_s_low", "tau_high_s_low", "tau_high_s_high", "tau_ramp_s_low"}) {
    const std::string f = std::string("prior_") + cell + ".csv";
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  CHECK(slurp(dir / "a" / "manifest") != "");
  const Table low = read_table_csv((dir / "a" / "prior_tau_low_s_low.csv").string());
  CHECK(low.columns() == std::vector<std::string>{"node", "x", "y", "theta", "tau", "value"});
  CHECK(low.rows().size() == 128);
}

TEST_CASE("run: regression pipeline against the conjugate posterior") {
  const fs::path dir = scratch("run");
  Rng rng(8);
  const Vector angles = sample_circle_angles(50, rng);
  std::ostringstream f, l;
  for (Index i = 0; i < 50; ++i) f << format_double(std::cos(angles[i])) << ',' << format_double(std::sin(angles[i])) << '\n';
  std::normal_distribution<double> normal;
  for (Index i = 0; i < 10; ++i) l << i * 5 << ',' << format_double(std::sin(angles[i * 5]) + 0.1 * normal(rng)) << '\n';
  write_text(dir / "f.csv", f.str());
  write_text(dir / "l.csv", l.str());
  const std::vector<std::string> base = {"--out", (dir / "out").string(), "run", "--features", (dir / "f.csv").string(),
                                         "--labels", (dir / "l.csv").string(), "--noise-std", "0.1",
                                         "--weight-scale", "6.283185307179586", "--connectivity", "0.8",
                                         "--iters", "60000", "--oracle", "--map", "--chains", "4"};
  CHECK(run_cli(base) == 0);
  const auto m = manifest(dir / "out");
  CHECK(m.count("r_hat") == 1);
  const Table summary = read_table_csv((dir / "out" / "summary.csv").string());
  const Table oracle_post = read_table_csv((dir / "out" / "oracle.csv").string());
  const Table map = read_table_csv((dir / "out" / "map.csv").string());
  REQUIRE(summary.rows().size() == 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(std::abs(summary.rows()[i][1] - oracle_post.rows()[i][1]) < 0.05);
    CHECK(std::abs(map.rows()[i][1] - oracle_post.rows()[i][1]) < 1e-8);
  }
  const Table trace = read_table_csv((dir / "out" / "trace.csv").string());
  CHECK(trace.rows().size() == 4 * 60000);
  CHECK(trace.columns() == std::vector<std::string>{"chain", "iteration", "log_likelihood", "accepted"});
}

TEST_CASE("run: errors and exit codes") {
  const fs::path dir = scratch("run_errors");
  write_text(dir / "f.csv", "0,0\n1,0\n0,1\n");
  write_text(dir / "l.csv", "0,1\n5,0\n");
  write_text(dir / "bad.csv", "0,1\n1,zz\n");
  const std::string out = (dir / "out").string();
  CHECK(run_cli({"--out", out, "run", "--features", (dir / "f.csv").string(), "--labels",
                 (dir / "missing.csv").string(), "--noise-std", "0.1"}) == 1);
  CHECK(run_cli({"--out", out, "run", "--features", (dir / "f.csv").string(), "--labels", (dir / "l.csv").string(),
                 "--noise-std", "0.1"}) == 1);
  CHECK(run_cli({"--out", out, "run", "--features", (dir / "bad.csv").string(), "--labels",
                 (dir / "l.csv").string(), "--noise-std", "0.1"}) == 1);

  // A per-node tau with non-integer s above N = 512 is an unsupported configuration.
  std::ostringstream f, t;
  for (int i = 0; i < 600; ++i) {
    f << std::cos(2 * M_PI * i / 600.0) << ',' << std::sin(2 * M_PI * i / 600.0) << '\n';
    t << 1.0 << '\n';
  }
  write_text(dir / "big.csv", f.str());
  write_text(dir / "tau.csv", t.str());
  write_text(dir / "one.csv", "0,1\n");
  CHECK(run_cli({"--out", out, "run", "--features", (dir / "big.csv").string(), "--labels",
                 (dir / "one.csv").string(), "--noise-std", "0.1", "--tau-file", (dir / "tau.csv").string(), "--s",
                 "1.5", "--iters", "10"}) == 2);
}

TEST_CASE("two-moons command writes its files and is reproducible") {
  const fs::path dir = scratch("moons");
  for (const char* sub : {"a", "b"}) {
    CHECK(run_cli({"--seed", "3", "--out", (dir / sub).string(), "two-moons", "--iters", "20000"}) == 0);
  }
  CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
  CHECK(slurp(dir / "a" / "labels.csv") == slurp(dir / "b" / "labels.csv"));
  const auto m = manifest(dir / "a");
  CHECK(m.count("geometry") == 1);
  CHECK(std::stod(m.at("accuracy_unlabeled")) >= 0.9);
  CHECK(run_cli({"--format", "gnuplot", "--out", (dir / "g").string(), "two-moons", "--iters", "2000"}) == 0);
  CHECK(fs::exists(dir / "g" / "summary.dat"));
}

TEST_CASE("study commands produce their tables") {
  const fs::path dir = scratch("studies");
  CHECK(run_cli({"--out", (dir / "acc").string(), "acceptance-study", "--n-list", "100,200", "--iters", "2000"}) == 0);
  CHECK(read_table_csv((dir / "acc" / "acceptance.csv").string()).rows().size() == 2);
  CHECK(run_cli({"--out", (dir / "pc").string(), "prior-convergence", "--n-list", "32,64", "--trials", "2", "--grid",
                 "256"}) == 0);
  CHECK(read_table_csv((dir / "pc" / "discrepancy.csv").string()).rows().size() == 2);
  CHECK(run_cli({"--out", (dir / "sc").string(), "spectrum-check", "--n", "300", "--k", "5"}) == 0);
  CHECK(read_table_csv((dir / "sc" / "spectrum_check.csv").string()).rows().size() == 5);
  CHECK(run_cli({"--out", (dir / "cs").string(), "contraction-study", "--n-list", "10,12", "--trials", "1"}) == 0);
  CHECK(read_table_csv((dir / "cs" / "contraction.csv").string()).rows().size() == 2);
  CHECK(run_cli({"--out", (dir / "x").string(), "contraction-study", "--n-list", "10,abc"}) == 1);
}

}  // TEST_SUITE

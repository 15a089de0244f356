#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "linfilter/cli.hpp"
#include "linfilter/csv.hpp"
#include "linfilter/example.hpp"
#include "test_support.hpp"

using namespace linfilter;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() /
             ("linfilter_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path_of(const std::string& name) {
  return (temp_dir() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string strip_timing(const std::string& report) {
  return std::regex_replace(report, std::regex("\"timing_ms\": [^,\n]*"),
                            "\"timing_ms\": 0");
}

// paired sample files drawn from the closed-form model
void write_sample_files(Index n_est, Index k, std::uint64_t seed,
                        const std::string& f_path, const std::string& g_path) {
  const example::ExampleModel model(n_est);
  SplitMix64 rng(seed);
  Matrix f(model.n_obs, k), g(model.n_est, k);
  for (Index t = 0; t < k; ++t) {
    const auto o = example::sample_outcome(model, rng);
    const auto r = example::realize(model, o, example::TailConvention::full);
    f.col(t) = r.f;
    g.col(t) = r.g;
  }
  csv::write_matrix_file(f_path, f);
  csv::write_matrix_file(g_path, g);
}

}  // namespace

TEST_CASE("csv round trip is bit exact") {
  SplitMix64 rng(12345);
  for (int trial = 0; trial < 20; ++trial) {
    const Index rows = 1 + static_cast<Index>(rng.next_u64() % 8);
    const Index cols = 1 + static_cast<Index>(rng.next_u64() % 8);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) {
        // wide range of magnitudes, including exact small integers
        const double scale = std::pow(10.0, 30.0 * rng.next_symmetric());
        m(i, j) = (rng.next_u64() % 5 == 0)
                      ? static_cast<double>(rng.next_u64() % 7)
                      : rng.next_symmetric() * scale;
      }
    std::stringstream ss;
    csv::write_matrix(ss, m);
    const Matrix back = csv::read_matrix(ss, "roundtrip");
    REQUIRE(back.rows() == rows);
    REQUIRE(back.cols() == cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) REQUIRE(back(i, j) == m(i, j));
  }
}

TEST_CASE("format_double uses shortest round-trip form") {
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(1.0) == "1");
  CHECK(csv::format_double(-2.5) == "-2.5");
  CHECK(csv::format_double(1.0 / 3.0) == "0.3333333333333333");
}

TEST_CASE("read_matrix accepts comments, blanks, CRLF, and a size header") {
  std::stringstream ss(
      "# leading comment\r\n"
      "2,3\n"
      "1, 2 ,3\r\n"
      "\n"
      "   # indented comment\n"
      "4,5,6\n");
  const Matrix m = csv::read_matrix(ss, "test");
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 3);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 2) == 6.0);
}

TEST_CASE("a two-field numeric line is data unless it matches as a header") {
  std::stringstream ss("3,4\n");
  const Matrix m = csv::read_matrix(ss, "test");
  REQUIRE(m.rows() == 1);
  CHECK(m(0, 1) == 4.0);
}

TEST_CASE("read_matrix reports parse failures with position") {
  std::stringstream bad("1,2\n3,oops\n");
  try {
    csv::read_matrix(bad, "bad.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 2);
    CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
  }

  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(csv::read_matrix(ragged, "ragged"), ParseError);

  std::stringstream empty("");
  try {
    csv::read_matrix(empty, "empty.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
  }

  CHECK_THROWS_AS(csv::read_matrix_file(path_of("does_not_exist.csv")),
                  ParseError);
}

TEST_CASE("estimate end to end") {
  write_sample_files(4, 2000, 77, path_of("f.csv"), path_of("g.csv"));

  cli::RunConfig c;
  c.command = "estimate";
  c.f_samples = path_of("f.csv");
  c.g_samples = path_of("g.csv");
  c.out_path = path_of("filter.csv");
  c.report_path = path_of("estimate.json");
  c.check_example = true;
  c.n_trunc = 4;
  REQUIRE(cli::run(c) == 0);

  const Matrix x = csv::read_matrix_file(c.out_path);
  CHECK(x.rows() == 4);
  CHECK(x.cols() == 8);

  const auto report = nlohmann::json::parse(slurp(c.report_path));
  CHECK(report.at("command") == "estimate");
  CHECK(report.at("realizations") == 2000);
  CHECK(report.at("example_consistent") == true);
  CHECK(report.at("truncation_diagnostics").size() == 5);
  for (const auto& check : report.at("checks"))
    CHECK(check.at("pass") == true);
  // trailing eigenvalue sums shrink as n grows
  const auto& diag = report.at("truncation_diagnostics");
  double prev = 1e100;
  for (const auto& entry : diag) {
    const double err = entry.at("observation_error");
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("apply end to end") {
  const example::ExampleModel model(4);
  const auto triple =
      example::build_triple(model, example::TailConvention::proximate);
  const auto sol = solve(triple);
  csv::write_matrix_file(path_of("x.csv"), sol.x);

  SplitMix64 rng(5);
  Matrix obs(model.n_obs, 3), truth(model.n_est, 3);
  for (Index t = 0; t < 3; ++t) {
    const auto o = example::sample_outcome(model, rng);
    const auto r = example::realize(model, o, example::TailConvention::proximate);
    obs.col(t) = r.f;
    truth.col(t) = r.g;
  }
  csv::write_matrix_file(path_of("obs.csv"), obs);

  cli::RunConfig c;
  c.command = "apply";
  c.filter_path = path_of("x.csv");
  c.obs_path = path_of("obs.csv");
  c.out_path = path_of("ghat.csv");
  c.report_path = path_of("apply.json");
  REQUIRE(cli::run(c) == 0);

  const Matrix ghat = csv::read_matrix_file(c.out_path);
  CHECK((ghat - truth).cwiseAbs().maxCoeff() < 1e-9);
  const auto report = nlohmann::json::parse(slurp(c.report_path));
  CHECK(report.at("columns_processed") == 3);
}

TEST_CASE("example command passes and is deterministic") {
  cli::RunConfig c;
  c.command = "example";
  c.trials = 5;
  c.report_path = path_of("example1.json");
  REQUIRE(cli::run(c) == 0);
  c.report_path = path_of("example2.json");
  REQUIRE(cli::run(c) == 0);

  const std::string a = strip_timing(slurp(path_of("example1.json")));
  const std::string b = strip_timing(slurp(path_of("example2.json")));
  CHECK(a == b);

  const auto report = nlohmann::json::parse(a);
  CHECK(report.at("seed") == 42);
  CHECK(report.at("retained_rank") == 8);
  REQUIRE(report.at("checks").size() == 6);
  for (const auto& check : report.at("checks")) CHECK(check.at("pass") == true);
  CHECK(report.at("trial_errors").size() == 9);  // 4 reference + 5 seeded
}

TEST_CASE("verify end to end with a projection") {
  const auto triple = example::build_triple(example::ExampleModel(4));
  csv::write_matrix_file(path_of("eff.csv"), triple.e_ff);
  csv::write_matrix_file(path_of("egf.csv"), triple.e_gf);
  csv::write_matrix_file(path_of("egg.csv"), triple.e_gg);
  csv::write_matrix_file(path_of("proj.csv"), coordinate_projection(8, {0, 2}));

  cli::RunConfig c;
  c.command = "verify";
  c.e_ff_path = path_of("eff.csv");
  c.e_gf_path = path_of("egf.csv");
  c.e_gg_path = path_of("egg.csv");
  c.projection_path = path_of("proj.csv");
  c.report_path = path_of("verify.json");
  REQUIRE(cli::run(c) == 0);

  const auto report = nlohmann::json::parse(slurp(c.report_path));
  REQUIRE(report.at("checks").size() == 8);
  for (const auto& check : report.at("checks")) CHECK(check.at("pass") == true);
  const double restricted = report.at("restricted_error");
  const double full = report.at("full_error");
  const double cross = report.at("cross_term");
  CHECK(restricted == Catch::Approx(full + cross).margin(1e-8));
  CHECK(cross > 0.0);
}

TEST_CASE("exit codes map to failure classes") {
  cli::RunConfig c;

  // 2: unreadable input
  c.command = "apply";
  c.filter_path = path_of("missing.csv");
  c.obs_path = path_of("missing.csv");
  CHECK(cli::run(c) == 2);

  // 3: non-conformable inputs
  csv::write_matrix_file(path_of("x23.csv"), Matrix::Zero(2, 3));
  csv::write_matrix_file(path_of("obs2.csv"), Matrix::Zero(2, 1));
  c.filter_path = path_of("x23.csv");
  c.obs_path = path_of("obs2.csv");
  CHECK(cli::run(c) == 3);

  // unrealizable triple: correlation with a deterministic direction
  Matrix e_ff = Matrix::Zero(2, 2);
  e_ff(0, 0) = 1.0;
  Matrix e_gf(1, 2);
  e_gf << 0, 1;
  csv::write_matrix_file(path_of("bad_eff.csv"), e_ff);
  csv::write_matrix_file(path_of("bad_egf.csv"), e_gf);
  csv::write_matrix_file(path_of("one.csv"), Matrix::Identity(1, 1));

  cli::RunConfig v;
  v.command = "verify";
  v.e_ff_path = path_of("bad_eff.csv");
  v.e_gf_path = path_of("bad_egf.csv");
  v.e_gg_path = path_of("one.csv");
  // 5: invariant checks fail
  CHECK(cli::run(v) == 5);
  // 4: the restricted solve refuses the inconsistent model outright
  csv::write_matrix_file(path_of("proj2.csv"), Matrix::Identity(2, 2));
  v.projection_path = path_of("proj2.csv");
  CHECK(cli::run(v) == 4);
}

TEST_CASE("installed binary smoke test") {
  const std::string exe = LINFILTER_CLI_PATH;
  const std::string quiet = " > " + path_of("stdout.txt") + " 2>&1";

  int status = std::system((exe + " example --trials 2" + quiet).c_str());
  CHECK(WEXITSTATUS(status) == 0);

  status = std::system((exe + " --help" + quiet).c_str());
  CHECK(WEXITSTATUS(status) == 0);

  status = std::system((exe + " estimate" + quiet).c_str());  // missing args
  CHECK(WEXITSTATUS(status) != 0);
}

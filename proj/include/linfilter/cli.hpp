#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "linfilter/csv.hpp"
#include "linfilter/example.hpp"
#include "linfilter/ldl.hpp"
#include "linfilter/series.hpp"

namespace linfilter {
namespace cli {

using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string f_samples;
  std::string g_samples;
  std::string filter_path;
  std::string obs_path;
  std::string e_ff_path;
  std::string e_gf_path;
  std::string e_gg_path;
  std::string projection_path;
  std::string out_path;
  std::string report_path;  // empty = stdout only
  std::optional<double> tolerance;
  std::optional<Index> n_trunc;
  std::uint64_t seed = 42;
  Index trials = 10;
  bool center = false;
  bool check_example = false;
};

inline RankPolicy policy_of(const RunConfig& c) {
  return c.tolerance ? RankPolicy::absolute_cutoff(*c.tolerance)
                     : RankPolicy::relative_default();
}

namespace detail {

struct Check {
  std::string name;
  double residual;
  double threshold;
  bool pass;
};

inline json to_json(const std::vector<Check>& checks, bool& all_pass) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"residual", c.residual},
                   {"threshold", c.threshold},
                   {"pass", c.pass}});
    all_pass = all_pass && c.pass;
  }
  return arr;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// timing goes last so that reports are byte-identical up to the final line.
inline void emit(const RunConfig& c, json& report, const Timer& timer) {
  report["timing_ms"] = timer.ms();
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!c.report_path.empty()) {
    std::ofstream out(c.report_path);
    if (!out) throw ParseError(c.report_path, 0, 0, "cannot open for writing");
    out << text;
  }
}

// Standard-error matrix for the entries of (1/k) A B^T under iid sampling.
inline Matrix entrywise_se(const Matrix& a, const Matrix& b) {
  const Index k = a.cols();
  Matrix mean = (a * b.transpose()) / static_cast<double>(k);
  Matrix sq = Matrix::Zero(a.rows(), b.rows());
  for (Index t = 0; t < k; ++t)
    sq += (a.col(t) * b.col(t).transpose()).array().square().matrix();
  sq /= static_cast<double>(k);
  const Matrix var = sq - mean.array().square().matrix();
  return (var.array().max(0.0) / static_cast<double>(k)).sqrt();
}

}  // namespace detail

inline int cmd_estimate(const RunConfig& c) {
  detail::Timer timer;
  SampleSet samples{csv::read_matrix_file(c.f_samples),
                    csv::read_matrix_file(c.g_samples)};
  const CovarianceTriple triple = from_samples(samples, c.center);
  const FilterSolution sol = solve(triple, policy_of(c));

  if (!c.out_path.empty()) csv::write_matrix_file(c.out_path, sol.x);

  std::vector<detail::Check> checks;
  const auto nc = null_space_containment(triple, policy_of(c));
  checks.push_back({"null_containment", nc.max_violation, nc.threshold, nc.pass});
  const double res_tol = 1e-9 * std::max(1.0, triple.e_gf.norm());
  checks.push_back({"normal_equation", sol.normal_residual, res_tol,
                    sol.normal_residual <= res_tol});

  bool all_pass = true;
  json report = {
      {"schema", 1},
      {"command", "estimate"},
      {"filter_rows", sol.x.rows()},
      {"filter_cols", sol.x.cols()},
      {"realizations", samples.realizations()},
      {"retained_rank", sol.retained_rank},
      {"tolerance_used", sol.tolerance_used},
      {"expected_error", sol.expected_error},
  };
  report["checks"] = detail::to_json(checks, all_pass);

  if (c.n_trunc) {
    // Observation error estimate E||f_n - f||^2 = sum of trailing eigenvalues.
    const auto d = symmetric_eig(triple.e_ff);
    json diag = json::array();
    for (Index n = 0; n <= *c.n_trunc && n <= d.source_dim; ++n) {
      double tail = 0.0;
      for (Index j = d.source_dim - 1; j >= n; --j) tail += d.eigenvalues[j];
      diag.push_back({{"n", n}, {"observation_error", tail}});
    }
    report["truncation_diagnostics"] = diag;
  }

  if (c.check_example) {
    // Entrywise comparison against the closed-form model at 3 standard errors.
    const Index n_est = triple.e_gg.rows();
    const example::ExampleModel model(n_est);
    const auto closed = example::build_triple(model, example::TailConvention::full);
    bool consistent = triple.e_ff.rows() == closed.e_ff.rows();
    if (consistent) {
      const Matrix se_ff = detail::entrywise_se(samples.f_samples, samples.f_samples);
      const Matrix se_gf = detail::entrywise_se(samples.g_samples, samples.f_samples);
      const Matrix se_gg = detail::entrywise_se(samples.g_samples, samples.g_samples);
      consistent =
          ((triple.e_ff - closed.e_ff).cwiseAbs().array() <=
           3.0 * se_ff.array() + 1e-12).all() &&
          ((triple.e_gf - closed.e_gf).cwiseAbs().array() <=
           3.0 * se_gf.array() + 1e-12).all() &&
          ((triple.e_gg - closed.e_gg).cwiseAbs().array() <=
           3.0 * se_gg.array() + 1e-12).all();
    }
    report["example_consistent"] = consistent;
    all_pass = all_pass && consistent;
  }

  detail::emit(c, report, timer);
  return all_pass ? 0 : static_cast<int>(ErrorCode::check_failure);
}

inline int cmd_apply(const RunConfig& c) {
  detail::Timer timer;
  const Matrix x = csv::read_matrix_file(c.filter_path);
  const Matrix obs = csv::read_matrix_file(c.obs_path);
  if (x.cols() != obs.rows())
    throw DimensionMismatch("filter cols " + std::to_string(x.cols()) +
                            " != observation rows " + std::to_string(obs.rows()));
  Matrix estimates(x.rows(), obs.cols());
  for (Index t = 0; t < obs.cols(); ++t)
    estimates.col(t) = apply(x, obs.col(t));
  if (!c.out_path.empty()) csv::write_matrix_file(c.out_path, estimates);

  json report = {{"schema", 1},
                 {"command", "apply"},
                 {"filter_rows", x.rows()},
                 {"filter_cols", x.cols()},
                 {"columns_processed", obs.cols()}};
  detail::emit(c, report, timer);
  return 0;
}

inline int cmd_example(const RunConfig& c) {
  detail::Timer timer;
  const example::ExampleModel model(8);
  std::vector<detail::Check> checks;

  // Trace partial sum converges to pi^2/12 from below.
  const double pi = 3.14159265358979323846;
  const double target = pi * pi / 12.0;
  const double partial = example::trace_partial_sum(1000000);
  checks.push_back({"trace_pi2_over_12", target - partial, 4e-7,
                    partial <= target && target - partial <= 4e-7});

  // Reduction diagonal on the 10x10 auto-covariance.
  {
    const auto triple10 =
        example::build_triple(example::ExampleModel(5), example::TailConvention::full);
    const auto red = ldl_reduce(triple10.e_ff);
    const std::vector<double> want = {2.0 / 3, 1.0 / 18, 4.0 / 225, 5.0 / 588,
                                      2.0 / 405};
    double dev = 0.0;
    for (size_t i = 0; i < want.size(); ++i)
      dev = std::max(dev, std::abs(red.diag[i] - want[i]));
    checks.push_back({"ldl_diagonal", dev, 1e-12, dev <= 1e-12});
  }

  const auto triple =
      example::build_triple(model, example::TailConvention::proximate);
  const FilterSolution sol = solve(triple, policy_of(c));

  // Filter block against the closed form.
  {
    double dev = 0.0;
    for (Index i = 1; i <= model.n_est; ++i)
      for (Index col = 1; col <= model.n_obs; ++col) {
        const double want = (col % 2 == 1)
                                ? example::closed_form_filter_entry(i, (col + 1) / 2)
                                : 0.0;
        dev = std::max(dev, std::abs(sol.x(i - 1, col - 1) - want));
      }
    checks.push_back({"filter_block", dev, 1e-8, dev <= 1e-8});
  }

  checks.push_back({"zero_error", sol.expected_error, 1e-9,
                    sol.expected_error <= 1e-9});

  json trials_json = json::array();
  {
    const auto reports =
        example::run_trials(model, example::reference_trial_outcomes());
    double worst = 0.0;
    for (size_t i = 0; i < reports.size(); ++i) {
      worst = std::max(worst, reports[i].max_abs_err);
      trials_json.push_back({{"trial", "reference_" + std::to_string(i + 1)},
                             {"max_abs_err", reports[i].max_abs_err}});
    }
    checks.push_back({"reference_trials", worst, 1e-10, worst <= 1e-10});
  }

  if (c.trials > 0) {
    SplitMix64 rng(c.seed);
    std::vector<example::Outcome> outcomes;
    for (Index t = 0; t < c.trials; ++t) {
      auto o = example::sample_outcome(model, rng);
      o.seed = c.seed;
      outcomes.push_back(std::move(o));
    }
    const auto reports = example::run_trials(model, outcomes);
    double worst = 0.0;
    for (size_t i = 0; i < reports.size(); ++i) {
      worst = std::max(worst, reports[i].max_abs_err);
      trials_json.push_back({{"trial", "seeded_" + std::to_string(i + 1)},
                             {"max_abs_err", reports[i].max_abs_err}});
    }
    checks.push_back({"seeded_trials", worst, 1e-9, worst <= 1e-9});
  }

  bool all_pass = true;
  json report = {{"schema", 1},
                 {"command", "example"},
                 {"n_est", model.n_est},
                 {"n_obs", model.n_obs},
                 {"seed", c.seed},
                 {"trials", c.trials},
                 {"retained_rank", sol.retained_rank},
                 {"expected_error", sol.expected_error}};
  report["checks"] = detail::to_json(checks, all_pass);
  report["trial_errors"] = trials_json;
  detail::emit(c, report, timer);
  return all_pass ? 0 : static_cast<int>(ErrorCode::check_failure);
}

inline int cmd_verify(const RunConfig& c) {
  detail::Timer timer;
  CovarianceTriple triple{csv::read_matrix_file(c.e_ff_path),
                          csv::read_matrix_file(c.e_gf_path),
                          csv::read_matrix_file(c.e_gg_path)};
  triple.validate();
  const PseudoInverse p = pinv(triple.e_ff, policy_of(c));

  std::vector<detail::Check> checks;
  const double lambda_max =
      p.source.source_dim > 0 ? std::max(p.source.eigenvalues[0], 0.0) : 0.0;
  const double mp_tol = 1e-9 * std::max(1.0, lambda_max);
  const auto mp = mp_property_check(triple.e_ff, p.dagger);
  checks.push_back({"mp_ada_minus_a", mp.ada_minus_a, mp_tol, mp.ada_minus_a <= mp_tol});
  checks.push_back({"mp_dad_minus_d", mp.dad_minus_d, mp_tol, mp.dad_minus_d <= mp_tol});
  checks.push_back({"mp_ad_symmetry", mp.ad_asymmetry, mp_tol, mp.ad_asymmetry <= mp_tol});
  checks.push_back({"mp_da_symmetry", mp.da_asymmetry, mp_tol, mp.da_asymmetry <= mp_tol});

  const auto nc = null_space_containment(triple, policy_of(c));
  checks.push_back({"null_containment", nc.max_violation, nc.threshold, nc.pass});

  const double ci = consistency_identity(triple, p.dagger);
  const double ci_tol = 1e-9 * std::max(1.0, triple.e_gf.norm());
  checks.push_back({"cross_covariance_identity", ci, ci_tol, ci <= ci_tol});

  json report = {{"schema", 1},
                 {"command", "verify"},
                 {"obs_dim", triple.obs_dim()},
                 {"est_dim", triple.est_dim()},
                 {"retained_rank", p.retained_rank}};

  if (!c.projection_path.empty()) {
    const Matrix proj = csv::read_matrix_file(c.projection_path);
    const auto part = partitioned_solve(triple, proj, policy_of(c));
    const double lhs = part.restricted_error;
    const double rhs = part.full_error + part.cross_term;
    const double dev = std::abs(lhs - rhs);
    const double dec_tol = 1e-8 * std::max(1.0, part.restricted_error);
    checks.push_back({"error_decomposition", dev, dec_tol, dev <= dec_tol});
    checks.push_back({"uncorrelated_components", part.uncorrelated_residual,
                      1e-9, part.uncorrelated_residual <= 1e-9});
    report["restricted_error"] = part.restricted_error;
    report["full_error"] = part.full_error;
    report["cross_term"] = part.cross_term;
  }

  bool all_pass = true;
  report["checks"] = detail::to_json(checks, all_pass);
  detail::emit(c, report, timer);
  return all_pass ? 0 : static_cast<int>(ErrorCode::check_failure);
}

inline int run(const RunConfig& c) {
  try {
    if (c.command == "estimate") return cmd_estimate(c);
    if (c.command == "apply") return cmd_apply(c);
    if (c.command == "example") return cmd_example(c);
    if (c.command == "verify") return cmd_verify(c);
    std::cerr << "unknown command: " << c.command << "\n";
    return static_cast<int>(ErrorCode::check_failure);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::check_failure);
  }
}

}  // namespace cli
}  // namespace linfilter

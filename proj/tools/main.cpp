#include <CLI11.hpp>

#include "linfilter/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Optimal linear least-squares filter for zero-mean random "
               "functions: covariance estimation, spectral generalized "
               "inverses, and restricted estimation"};
  app.require_subcommand(1);

  linfilter::cli::RunConfig cfg;
  double tol = 0.0;
  long long n_trunc = 0;
  long long trials = 10;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_path, "Output file (CSV)");
    sub->add_option("--report", cfg.report_path, "Write the JSON report here");
    sub->add_option("--tol", tol, "Absolute eigenvalue cutoff override");
  };

  auto* estimate = app.add_subcommand(
      "estimate", "Fit the optimal filter from paired sample files");
  estimate->add_option("--f-samples", cfg.f_samples, "Observable samples, m x k CSV")
      ->required();
  estimate->add_option("--g-samples", cfg.g_samples, "Estimand samples, n x k CSV")
      ->required();
  estimate->add_flag("--center", cfg.center, "Subtract sample means before fitting");
  estimate->add_flag("--check-example", cfg.check_example,
                     "Compare the fitted triple against the closed-form model");
  estimate->add_option("--n-trunc", n_trunc,
                       "Report observation-error diagnostics up to this order");
  add_common(estimate);

  auto* apply = app.add_subcommand("apply", "Apply a filter to observations");
  apply->add_option("--filter", cfg.filter_path, "Filter matrix CSV")->required();
  apply->add_option("--obs", cfg.obs_path, "Observations, m x t CSV")->required();
  add_common(apply);

  auto* example = app.add_subcommand(
      "example", "Reproduce the closed-form input-retrieval example");
  example->add_option("--seed", cfg.seed, "Seed for the extra trials");
  example->add_option("--trials", trials, "Number of seeded trials (0 = structural only)");
  add_common(example);

  auto* verify = app.add_subcommand(
      "verify", "Run the invariant checks on user-supplied covariance files");
  verify->add_option("--e-ff", cfg.e_ff_path, "Auto-covariance CSV")->required();
  verify->add_option("--e-gf", cfg.e_gf_path, "Cross-covariance CSV")->required();
  verify->add_option("--e-gg", cfg.e_gg_path, "Estimand auto-covariance CSV")->required();
  verify->add_option("--projection", cfg.projection_path,
                     "Orthogonal projection CSV for the restricted-error check");
  add_common(verify);

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  if (sub->count("--tol")) cfg.tolerance = tol;
  if (sub == estimate && estimate->count("--n-trunc"))
    cfg.n_trunc = static_cast<linfilter::Index>(n_trunc);
  if (sub == example) cfg.trials = static_cast<linfilter::Index>(trials);
  return linfilter::cli::run(cfg);
}

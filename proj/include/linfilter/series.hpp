#pragma once

#include <cmath>
#include <vector>

#include "linfilter/errors.hpp"

namespace linfilter {

// Diagnostic sequence kappa_j = lambda_j / sqrt(rho_j), rho_j = sum_{k>=j}
// lambda_k, for a positive non-increasing summable sequence.  The kappa
// series converges more slowly than the lambda series yet its sum is bounded
// by 2*sqrt(rho_1); kappa_j/lambda_j = 1/sqrt(rho_j) is strictly increasing.
struct SlowSeries {
  std::vector<double> kappas;
  double bound = 0.0;        // 2*sqrt(rho_1)
  double kappa_sum = 0.0;
};

// `lambdas` is a finite prefix; `tail_sum` is the exact (or closed-form) sum
// of the remaining terms.
inline SlowSeries slow_series(const std::vector<double>& lambdas,
                              double tail_sum = 0.0) {
  if (tail_sum < 0.0) throw NonPositive("tail_sum must be >= 0");
  for (size_t j = 0; j < lambdas.size(); ++j) {
    if (!(lambdas[j] > 0.0))
      throw NonPositive("lambda_" + std::to_string(j + 1) + " must be > 0");
    if (j > 0 && lambdas[j] > lambdas[j - 1])
      throw NonDecreasing("lambda sequence increases at index " +
                          std::to_string(j + 1));
  }

  const size_t n = lambdas.size();
  // Backward partial sums keep rho accurate for long decaying sequences.
  std::vector<double> rho(n);
  double acc = tail_sum;
  for (size_t j = n; j-- > 0;) {
    acc += lambdas[j];
    rho[j] = acc;
  }

  SlowSeries s;
  s.kappas.resize(n);
  for (size_t j = 0; j < n; ++j) {
    s.kappas[j] = lambdas[j] / std::sqrt(rho[j]);
    s.kappa_sum += s.kappas[j];
  }
  s.bound = n > 0 ? 2.0 * std::sqrt(rho[0]) : 2.0 * std::sqrt(tail_sum);
  return s;
}

}  // namespace linfilter

#pragma once

#include <limits>
#include <optional>

#include "linfilter/spectral.hpp"

namespace linfilter {

// Eigenvalue cutoff for the generalized inverse.  The default relative rule
// is dim * machine-epsilon * lambda_max; an absolute cutoff can be supplied
// instead.
struct RankPolicy {
  std::optional<double> absolute;

  static RankPolicy relative_default() { return {}; }
  static RankPolicy absolute_cutoff(double tol) { return {tol}; }

  double resolve(Index dim, double lambda_max) const {
    if (absolute) return *absolute;
    return static_cast<double>(dim) *
           std::numeric_limits<double>::epsilon() * std::max(lambda_max, 0.0);
  }
};

struct PseudoInverse {
  SpectralDecomposition source;
  Index retained_rank = 0;
  double tolerance = 0.0;  // cutoff actually applied
  Matrix dagger;
};

// Spectral generalized inverse of a symmetric PSD matrix: reciprocal of the
// retained eigenvalues, zero on the numerical null space.  Negative
// eigenvalues within 10*tolerance of zero are treated as rounding and
// discarded; anything more negative signals an invalid covariance.
inline PseudoInverse pinv(const Matrix& a,
                          RankPolicy policy = RankPolicy::relative_default()) {
  PseudoInverse p;
  p.source = symmetric_eig(a);
  const Index n = p.source.source_dim;
  const double lambda_max = n > 0 ? p.source.eigenvalues[0] : 0.0;
  p.tolerance = policy.resolve(n, lambda_max);

  const double min_eig = n > 0 ? p.source.eigenvalues[n - 1] : 0.0;
  if (min_eig < -10.0 * p.tolerance)
    throw NegativeEigenvalueBeyondTolerance(
        "eigenvalue " + std::to_string(min_eig) +
        " below -10*tolerance; input is not a valid covariance");

  p.dagger = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const double lambda = p.source.eigenvalues[j];
    if (lambda > p.tolerance) {
      ++p.retained_rank;
      const auto v = p.source.eigenvectors.col(j);
      p.dagger.noalias() += (1.0 / lambda) * v * v.transpose();
    }
  }
  p.dagger = symmetrize(p.dagger);
  return p;
}

// Frobenius residuals of the four defining generalized-inverse properties of
// the pair (A, D).  The caller decides pass/fail.
struct MpPropertyReport {
  double ada_minus_a;      // ||A D A - A||
  double dad_minus_d;      // ||D A D - D||
  double ad_asymmetry;     // ||(A D)^T - A D||
  double da_asymmetry;     // ||(D A)^T - D A||

  double max() const {
    return std::max(std::max(ada_minus_a, dad_minus_d),
                    std::max(ad_asymmetry, da_asymmetry));
  }
};

inline MpPropertyReport mp_property_check(const Matrix& a, const Matrix& d) {
  if (a.cols() != d.rows() || d.cols() != a.rows())
    throw DimensionMismatch("mp_property_check: non-conformable matrices");
  const Matrix ad = a * d;
  const Matrix da = d * a;
  MpPropertyReport r;
  r.ada_minus_a = (ad * a - a).norm();
  r.dad_minus_d = (da * d - d).norm();
  r.ad_asymmetry = (ad.transpose() - ad).norm();
  r.da_asymmetry = (da.transpose() - da).norm();
  return r;
}

}  // namespace linfilter

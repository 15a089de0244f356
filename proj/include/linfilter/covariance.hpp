#pragma once

#include "linfilter/pinv.hpp"

namespace linfilter {

// Paired realizations: column j of each block is the outcome of experiment j.
struct SampleSet {
  Matrix f_samples;  // m x k
  Matrix g_samples;  // n x k

  Index realizations() const { return f_samples.cols(); }

  void validate() const {
    if (f_samples.cols() != g_samples.cols())
      throw DimensionMismatch("f and g sample blocks disagree on k");
    if (f_samples.cols() < 1) throw EmptySampleSet("need at least one realization");
    require_finite(f_samples, "f_samples");
    require_finite(g_samples, "g_samples");
  }
};

// Full second-moment model of the pair (f, g).
struct CovarianceTriple {
  Matrix e_ff;  // m x m, symmetric PSD
  Matrix e_gf;  // n x m
  Matrix e_gg;  // n x n, symmetric PSD

  Index obs_dim() const { return e_ff.rows(); }
  Index est_dim() const { return e_gg.rows(); }

  void validate() const {
    require_symmetric(e_ff, "e_ff", 1e-10);
    require_symmetric(e_gg, "e_gg", 1e-10);
    if (e_gf.rows() != e_gg.rows() || e_gf.cols() != e_ff.rows())
      throw DimensionMismatch("e_gf shape does not match e_ff/e_gg");
    require_finite(e_gf, "e_gf");
  }

  // Minimum eigenvalue of the joint block matrix [[e_ff, e_gf^T],[e_gf, e_gg]],
  // relative to its largest eigenvalue.  Realizable (sample-built) triples are
  // PSD up to rounding.
  double joint_min_eigenvalue() const {
    const Index m = obs_dim(), n = est_dim();
    Matrix block(m + n, m + n);
    block.topLeftCorner(m, m) = e_ff;
    block.topRightCorner(m, n) = e_gf.transpose();
    block.bottomLeftCorner(n, m) = e_gf;
    block.bottomRightCorner(n, n) = e_gg;
    const auto d = symmetric_eig(symmetrize(block));
    return d.eigenvalues[d.source_dim - 1];
  }

  bool joint_psd(double rel_tol = 1e-10) const {
    const Index m = obs_dim(), n = est_dim();
    if (m + n == 0) return true;
    const double lo = joint_min_eigenvalue();
    const double scale = std::max({1.0, e_ff.cwiseAbs().maxCoeff(),
                                   e_gg.cwiseAbs().maxCoeff()});
    return lo >= -rel_tol * scale;
  }
};

// Second-moment estimators (1/k) F F^T etc.  The model is zero-mean, so no
// mean is subtracted by default; `center` subtracts sample means for real
// data, which deviates from the zero-mean estimator.
inline CovarianceTriple from_samples(const SampleSet& s, bool center = false) {
  s.validate();
  Matrix f = s.f_samples;
  Matrix g = s.g_samples;
  const double k = static_cast<double>(s.realizations());
  if (center) {
    f.colwise() -= f.rowwise().mean().eval();
    g.colwise() -= g.rowwise().mean().eval();
  }
  CovarianceTriple t;
  t.e_ff = symmetrize((f * f.transpose()) / k);
  t.e_gf = (g * f.transpose()) / k;
  t.e_gg = symmetrize((g * g.transpose()) / k);
  return t;
}

// Auto-covariance of the transformed function T f: T E_ff T^T.
inline Matrix transform_covariance(const Matrix& t, const Matrix& e_ff) {
  if (t.cols() != e_ff.rows())
    throw DimensionMismatch("transform_covariance: T cols != e_ff rows");
  require_symmetric(e_ff, "e_ff", 1e-10);
  return symmetrize(t * e_ff * t.transpose());
}

// Covariances of the filtered function k = T E_ff^dag f, using the identity
// E_kk = T E_ff^dag E_ff E_ff^dag T^T = T E_ff^dag T^T.
struct FilteredCovariances {
  Matrix e_kk;
  Matrix e_gk;
  Matrix e_kg;
};

inline FilteredCovariances filtered_covariances(const Matrix& t,
                                                const CovarianceTriple& triple,
                                                const Matrix& dagger) {
  if (t.cols() != dagger.rows() || dagger.cols() != triple.e_ff.rows())
    throw DimensionMismatch("filtered_covariances: non-conformable inputs");
  FilteredCovariances fc;
  fc.e_kk = symmetrize(t * dagger * t.transpose());
  fc.e_gk = triple.e_gf * dagger * t.transpose();
  fc.e_kg = fc.e_gk.transpose();
  return fc;
}

// Numerical check of null(E_ff) <= null(E_gf): the cross-covariance must
// annihilate every numerical null vector of the auto-covariance.
struct NullContainmentReport {
  double max_violation = 0.0;  // max_j ||e_gf u_j|| over null vectors u_j
  Index null_dim = 0;
  double threshold = 0.0;
  bool pass = true;
};

inline NullContainmentReport null_space_containment(
    const CovarianceTriple& triple,
    RankPolicy policy = RankPolicy::relative_default()) {
  const auto d = symmetric_eig(triple.e_ff);
  const Index n = d.source_dim;
  const double lambda_max = n > 0 ? d.eigenvalues[0] : 0.0;
  const double tol = policy.resolve(n, lambda_max);

  NullContainmentReport r;
  r.threshold = 1e-9 * std::max(1.0, triple.e_gf.norm());
  for (Index j = 0; j < n; ++j) {
    if (d.eigenvalues[j] > tol) continue;
    ++r.null_dim;
    const double v = (triple.e_gf * d.eigenvectors.col(j)).norm();
    r.max_violation = std::max(r.max_violation, v);
  }
  r.pass = r.max_violation <= r.threshold;
  return r;
}

// Frobenius residual of the realizability identity E_gf = E_gf E_ff^dag E_ff.
inline double consistency_identity(const CovarianceTriple& triple,
                                   const Matrix& dagger) {
  if (dagger.rows() != triple.e_ff.rows() ||
      dagger.cols() != triple.e_ff.cols())
    throw DimensionMismatch("consistency_identity: dagger shape mismatch");
  return (triple.e_gf - triple.e_gf * dagger * triple.e_ff).norm();
}

}  // namespace linfilter

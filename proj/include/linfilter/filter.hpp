#pragma once

#include <vector>

#include "linfilter/covariance.hpp"

namespace linfilter {

// Optimal filter X = E_gf E_ff^dag together with its expected mean-square
// estimation error tr(E_gg - E_gf E_ff^dag E_fg).  The free term
// B (I - E_ff E_ff^dag) of the general solution is fixed to B = 0, so x is
// the minimum-norm solution of the normal equation X E_ff = E_gf.
struct FilterSolution {
  Matrix x;
  Index retained_rank = 0;
  double expected_error = 0.0;
  double tolerance_used = 0.0;
  double normal_residual = 0.0;     // ||x e_ff - e_gf||
  bool consistency_warning = false; // residual failed but containment held
};

inline double expected_error_of(const Matrix& x, const CovarianceTriple& triple);

inline FilterSolution solve(const CovarianceTriple& triple,
                            RankPolicy policy = RankPolicy::relative_default()) {
  triple.validate();
  const PseudoInverse p = pinv(triple.e_ff, policy);

  FilterSolution s;
  s.x = triple.e_gf * p.dagger;
  s.retained_rank = p.retained_rank;
  s.tolerance_used = p.tolerance;
  s.normal_residual = (s.x * triple.e_ff - triple.e_gf).norm();

  const double residual_tol = 1e-9 * std::max(1.0, triple.e_gf.norm());
  if (s.normal_residual > residual_tol) {
    const auto nc = null_space_containment(triple, policy);
    if (!nc.pass)
      throw InconsistentTriple(
          "normal-equation residual " + std::to_string(s.normal_residual) +
          " with null-containment violation " +
          std::to_string(nc.max_violation) + "; model is not realizable");
    s.consistency_warning = true;
  }

  s.expected_error =
      linfilter::trace(triple.e_gg - triple.e_gf * p.dagger * triple.e_gf.transpose());
  const double band = 1e-9 * std::max(1.0, linfilter::trace(triple.e_gg));
  if (s.expected_error < -band)
    throw NegativeErrorBeyondTolerance("expected error " +
                                       std::to_string(s.expected_error));
  if (s.expected_error < 0.0) s.expected_error = 0.0;
  return s;
}

// Mean-square error of an arbitrary filter x:
// tr(x E_ff x^T - E_gf x^T - x E_fg + E_gg).
inline double expected_error_of(const Matrix& x, const CovarianceTriple& triple) {
  if (x.cols() != triple.e_ff.rows() || x.rows() != triple.e_gg.rows())
    throw DimensionMismatch("expected_error_of: filter shape mismatch");
  const Matrix cross = triple.e_gf * x.transpose();
  return linfilter::trace(x * triple.e_ff * x.transpose() - cross -
                          cross.transpose() + triple.e_gg);
}

inline Vector apply(const Matrix& x, const Vector& f_obs) {
  if (x.cols() != f_obs.size())
    throw DimensionMismatch("apply: observation length " +
                            std::to_string(f_obs.size()) + " != filter cols " +
                            std::to_string(x.cols()));
  return x * f_obs;
}

// Projection of an observation onto the top-n eigenvectors of e_ff.  The
// result lies in the numerical range of e_ff, the finite analogue of
// membership in the domain of the generalized inverse.
inline Vector truncate_observation(const Vector& f_obs,
                                   const SpectralDecomposition& basis,
                                   Index n) {
  if (basis.source_dim != f_obs.size())
    throw DimensionMismatch("truncate_observation: length mismatch");
  const double lambda_max = basis.source_dim > 0 ? basis.eigenvalues[0] : 0.0;
  const double tol = RankPolicy::relative_default().resolve(basis.source_dim,
                                                            lambda_max);
  Index retained = 0;
  while (retained < basis.source_dim && basis.eigenvalues[retained] > tol)
    ++retained;
  if (n > retained)
    throw RankExceeded("n = " + std::to_string(n) + " exceeds retained rank " +
                       std::to_string(retained));
  Vector out = Vector::Zero(f_obs.size());
  for (Index j = 0; j < n; ++j) {
    const auto v = basis.eigenvectors.col(j);
    out += v.dot(f_obs) * v;
  }
  return out;
}

// Restricted estimation when only the projected component p = P f is
// observable.  E_rr is the Schur complement of the observed block, and the
// excess error of the restricted estimate is tr(E_gr E_rr^dag E_rg).
struct PartitionedSolution {
  Matrix y;
  Matrix z;
  Matrix e_rr;
  double restricted_error = 0.0;
  double full_error = 0.0;
  double cross_term = 0.0;          // tr(E_gr E_rr^dag E_rg)
  double uncorrelated_residual = 0.0;  // ||E_pr||
};

inline PartitionedSolution partitioned_solve(
    const CovarianceTriple& triple, const Matrix& p,
    RankPolicy policy = RankPolicy::relative_default()) {
  triple.validate();
  if (p.rows() != triple.e_ff.rows() || p.cols() != triple.e_ff.rows())
    throw DimensionMismatch("partitioned_solve: projection shape mismatch");
  const double p_scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  if ((p * p - p).cwiseAbs().maxCoeff() > 1e-12 * p_scale ||
      asymmetry(p) > 1e-12 * p_scale)
    throw NotAProjection("P is not an orthogonal projection within 1e-12");

  const Index m = triple.e_ff.rows();
  const Matrix q = Matrix::Identity(m, m) - p;
  const Matrix e_pp = symmetrize(p * triple.e_ff * p);
  const Matrix e_qp = q * triple.e_ff * p;
  const Matrix e_qq = symmetrize(q * triple.e_ff * q);
  const Matrix e_gp = triple.e_gf * p;
  const Matrix e_gq = triple.e_gf * q;

  const PseudoInverse pp_dag = pinv(e_pp, policy);
  PartitionedSolution s;
  s.e_rr = symmetrize(e_qq - e_qp * pp_dag.dagger * e_qp.transpose());
  const Matrix e_gr = e_gq - e_gp * pp_dag.dagger * e_qp.transpose();
  const PseudoInverse rr_dag = pinv(s.e_rr, policy);

  s.z = e_gr * rr_dag.dagger;
  s.y = (e_gp - s.z * e_qp) * pp_dag.dagger;
  s.restricted_error =
      linfilter::trace(triple.e_gg - e_gp * pp_dag.dagger * e_gp.transpose());
  s.full_error = solve(triple, policy).expected_error;
  s.cross_term = linfilter::trace(s.z * e_gr.transpose());
  // E_pr = E_pq - E_pp E_pp^dag E_pq vanishes for realizable triples.
  const Matrix e_pq = e_qp.transpose();
  s.uncorrelated_residual =
      (e_pq - e_pp * pp_dag.dagger * e_pq).norm();
  return s;
}

// Orthogonal projection onto a coordinate subset (1-based indices not used;
// pass 0-based coordinates).
inline Matrix coordinate_projection(Index dim, const std::vector<Index>& coords) {
  Matrix p = Matrix::Zero(dim, dim);
  for (Index c : coords) {
    if (c < 0 || c >= dim)
      throw DimensionMismatch("coordinate_projection: index out of range");
    p(c, c) = 1.0;
  }
  return p;
}

}  // namespace linfilter

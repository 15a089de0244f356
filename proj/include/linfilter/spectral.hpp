#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>

#include "linfilter/matrix.hpp"

namespace linfilter {

// Eigendecomposition of a symmetric matrix with a fixed presentation:
// eigenvalues sorted descending, and each eigenvector scaled so that its
// largest-magnitude component is positive (ties broken by lowest index).
// The fixed presentation makes downstream filter matrices reproducible
// bit-for-bit across runs.
struct SpectralDecomposition {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // columns, same order
  Index source_dim = 0;

  Matrix reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }
};

namespace detail {

inline void fix_eigenvector_sign(Eigen::Ref<Vector> v) {
  Index pivot = 0;
  double best = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    if (m > best) {  // strict: ties keep the lowest index
      best = m;
      pivot = i;
    }
  }
  if (v[pivot] < 0.0) v = -v;
}

}  // namespace detail

inline SpectralDecomposition symmetric_eig(const Matrix& a) {
  require_finite(a, "symmetric_eig input");
  require_symmetric(a, "symmetric_eig input");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(a));
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::check_failure, "eigendecomposition failed");

  const Index n = a.rows();
  SpectralDecomposition d;
  d.source_dim = n;
  d.eigenvalues = Vector(n);
  d.eigenvectors = Matrix(n, n);
  // Eigen returns ascending order; present descending.
  for (Index j = 0; j < n; ++j) {
    d.eigenvalues[j] = solver.eigenvalues()[n - 1 - j];
    d.eigenvectors.col(j) = solver.eigenvectors().col(n - 1 - j);
    detail::fix_eigenvector_sign(d.eigenvectors.col(j));
  }
  return d;
}

}  // namespace linfilter

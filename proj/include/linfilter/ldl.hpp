#pragma once

#include <vector>

#include "linfilter/matrix.hpp"

namespace linfilter {

// Outer-product reduction of a symmetric matrix whose only off-diagonal
// entries couple consecutive odd indices (1,3), (3,5), ...  The matrix is
// written as a sum of rank-one terms c c^T where each c has support on one
// odd pair, giving the recursion
//
//   d_k = a(2k+1,2k+1) - a(2k+1,2k-1)^2 / d_{k-1}
//   m_k = a(2k+1,2k-1) / sqrt(d_{k-1})
//
// over the odd chain.  Even indices carry no couplings; their diagonal
// entries pass through unchanged.
struct LdlReduction {
  std::vector<double> diag;         // d_k = c_{2k-1,2k-1}^2, odd chain in order
  std::vector<double> multipliers;  // m_k = c_{2k+1,2k-1}
  std::vector<double> even_diag;    // untouched even-index diagonal entries
  Index dim = 0;

  // Rebuild the input from the bidiagonal factor C (diag sqrt(d_k),
  // sub-diagonal m_k on the odd chain) plus the even diagonal.
  Matrix reassemble() const {
    Matrix a = Matrix::Zero(dim, dim);
    const Index odd_count = static_cast<Index>(diag.size());
    for (Index j = 0; j < odd_count; ++j) {
      Vector c = Vector::Zero(dim);
      c[2 * j] = std::sqrt(std::max(diag[static_cast<size_t>(j)], 0.0));
      if (2 * j + 2 < dim && static_cast<size_t>(j) < multipliers.size())
        c[2 * j + 2] = multipliers[static_cast<size_t>(j)];
      a.noalias() += c * c.transpose();
    }
    for (size_t j = 0; j < even_diag.size(); ++j)
      a(2 * static_cast<Index>(j) + 1, 2 * static_cast<Index>(j) + 1) +=
          even_diag[j];
    return a;
  }
};

inline LdlReduction ldl_reduce(const Matrix& a, double pivot_floor = 1e-14) {
  require_finite(a, "ldl_reduce input");
  require_symmetric(a, "ldl_reduce input");
  const Index n = a.rows();

  // Off-diagonal entries are allowed only between consecutive odd indices.
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const bool odd_pair = (i % 2 == 0) && (j == i + 2);
      if (!odd_pair && a(i, j) != 0.0)
        throw SparsityViolation("unexpected nonzero at (" +
                                std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ")");
    }

  LdlReduction r;
  r.dim = n;
  double prev = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (i % 2 == 1) {
      r.even_diag.push_back(a(i, i));
      continue;
    }
    double d = a(i, i);
    if (i >= 2) {
      const double coupling = a(i, i - 2);
      if (coupling != 0.0 && prev <= pivot_floor)
        throw DegeneratePivot("pivot " + std::to_string(prev) +
                              " too small at odd index " + std::to_string(i - 1));
      const double m = coupling == 0.0 ? 0.0 : coupling / std::sqrt(prev);
      r.multipliers.push_back(m);
      d -= m * m;
    }
    if (d < -1e-12)
      throw DegeneratePivot("negative reduced diagonal " + std::to_string(d));
    r.diag.push_back(d);
    prev = d;
  }
  return r;
}

}  // namespace linfilter

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "linfilter/errors.hpp"

namespace linfilter {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

inline void require_finite(const Matrix& a, const std::string& name) {
  if (!a.allFinite()) throw NonFinite(name + " contains NaN or Inf");
}

inline void require_square(const Matrix& a, const std::string& name) {
  if (a.rows() != a.cols())
    throw NotSquare(name + " is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()));
}

// Relative symmetry test: max |A - A^T| against max(1, max |A|).
inline double asymmetry(const Matrix& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

inline void require_symmetric(const Matrix& a, const std::string& name,
                              double rel_tol = 1e-12) {
  require_square(a, name);
  if (a.size() == 0) return;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (asymmetry(a) > rel_tol * scale)
    throw NonSymmetric(name + " is not symmetric within tolerance");
}

inline Matrix symmetrize(const Matrix& a) {
  return 0.5 * (a + a.transpose());
}

inline double trace(const Matrix& a) {
  require_square(a, "trace argument");
  return a.trace();
}

}  // namespace linfilter

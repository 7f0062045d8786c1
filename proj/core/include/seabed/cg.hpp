#pragma once

#include <span>
#include <vector>

#include "seabed/sparse.hpp"

namespace seabed {

struct CgResult {
  int iterations = 0;
  /// Final relative residual ||A x - rhs|| / ||rhs|| (recursive estimate).
  double residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for SPD `a`. `x` holds the
/// starting vector on entry and the solution on return. Stops once
/// ||A x - rhs|| <= tol ||rhs||; throws ConvergenceError after max_iter.
/// `inv_diag` may be empty, in which case it is computed from `a`.
CgResult cg_solve(const CsrMatrix& a, std::span<const double> rhs, std::span<double> x,
                  double tol, int max_iter, std::span<const double> inv_diag = {});

/// Convenience overload starting from zero.
std::vector<double> cg_solve(const CsrMatrix& a, std::span<const double> rhs, double tol,
                             int max_iter);

}  // namespace seabed

#include "seabed/cg.hpp"

#include <cmath>
#include <string>

#include "seabed/error.hpp"

namespace seabed {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CgResult cg_solve(const CsrMatrix& a, std::span<const double> rhs, std::span<double> x,
                  double tol, int max_iter, std::span<const double> inv_diag) {
  const auto n = static_cast<std::size_t>(a.rows());
  require(a.rows() == a.cols(), ErrorKind::shape, "cg_solve needs a square matrix");
  require(rhs.size() == n && x.size() == n, ErrorKind::shape, "cg_solve dimension mismatch");
  require(tol > 0.0 && tol < 1.0, ErrorKind::config, "cg tolerance must lie in (0, 1)");
  require(inv_diag.empty() || inv_diag.size() == n, ErrorKind::shape,
          "preconditioner size mismatch");

  std::vector<double> own_diag;
  if (inv_diag.empty()) {
    own_diag = a.diagonal();
    for (double& d : own_diag) {
      require(d > 0.0, ErrorKind::domain, "cg_solve needs a positive diagonal");
      d = 1.0 / d;
    }
    inv_diag = own_diag;
  }

  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (rhs_norm == 0.0) {
    for (double& xi : x) xi = 0.0;
    return {0, 0.0};
  }
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(rhs[i]), ErrorKind::domain, "cg_solve right-hand side not finite");
  }

  thread_local std::vector<double> r, z, p, q;
  r.resize(n);
  z.resize(n);
  p.resize(n);
  q.resize(n);

  a.multiply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  double res = std::sqrt(dot(r, r)) / rhs_norm;
  if (res <= tol) return {0, res};

  for (std::size_t i = 0; i < n; ++i) {
    z[i] = inv_diag[i] * r[i];
    p[i] = z[i];
  }
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    a.multiply(p, q);
    const double pq = dot(p, q);
    require(pq > 0.0, ErrorKind::domain, "cg_solve: matrix is not positive definite");
    const double alpha = rz / pq;
    double rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      rr += r[i] * r[i];
    }
    res = std::sqrt(rr) / rhs_norm;
    if (res <= tol) return {it, res};
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = inv_diag[i] * r[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw ConvergenceError("convergence error: cg_solve reached " + std::to_string(max_iter) +
                             " iterations with relative residual " + std::to_string(res),
                         res, max_iter);
}

std::vector<double> cg_solve(const CsrMatrix& a, std::span<const double> rhs, double tol,
                             int max_iter) {
  std::vector<double> x(rhs.size(), 0.0);
  cg_solve(a, rhs, x, tol, max_iter);
  return x;
}

}  // namespace seabed

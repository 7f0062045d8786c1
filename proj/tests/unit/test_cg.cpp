#include <Eigen/Dense>

#include "doctest.h"
#include "seabed/cg.hpp"
#include "seabed/error.hpp"
#include "seabed/kl_prior.hpp"
#include "support.hpp"

using namespace seabed;

namespace {

CsrMatrix from_dense(const Eigen::MatrixXd& a) {
  std::vector<Triplet> t;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (a(r, c) != 0.0) t.push_back({r, c, a(r, c)});
  return CsrMatrix(static_cast<int>(a.rows()), static_cast<int>(a.cols()), std::move(t));
}

}  // namespace

TEST_CASE("identity converges in one iteration") {
  const auto id = from_dense(Eigen::MatrixXd::Identity(6, 6));
  const std::vector<double> rhs{1, -2, 3, 0.5, 0, 7};
  std::vector<double> x(6, 0.0);
  const auto res = cg_solve(id, rhs, x, 1e-12, 10);
  CHECK(res.iterations == 1);
  CHECK(testing::max_abs_diff(x, rhs) < 1e-15);
}

TEST_CASE("zero right-hand side gives zero") {
  const auto id = from_dense(Eigen::MatrixXd::Identity(4, 4) * 3.0);
  std::vector<double> x{1, 2, 3, 4};
  const auto res = cg_solve(id, std::vector<double>(4, 0.0), x, 1e-10, 10);
  CHECK(res.iterations == 0);
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("random SPD system matches a dense Cholesky solve") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto vals = standard_normal(rng, 100);
    Eigen::MatrixXd b(10, 10);
    for (int i = 0; i < 100; ++i) b(i / 10, i % 10) = vals[i];
    const Eigen::MatrixXd a = b * b.transpose() + 0.5 * Eigen::MatrixXd::Identity(10, 10);
    const auto rhs = standard_normal(rng, 10);
    const Eigen::VectorXd oracle = a.llt().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), 10));
    const auto x = cg_solve(from_dense(a), rhs, 1e-12, 200);
    for (int i = 0; i < 10; ++i) CHECK(x[i] == doctest::Approx(oracle(i)).epsilon(1e-10).scale(oracle.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("residual criterion holds on return") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(30, 30);
  for (int i = 0; i < 30; ++i) {
    a(i, i) = 2.0 + 0.1 * i;
    if (i + 1 < 30) a(i, i + 1) = a(i + 1, i) = -1.0;
  }
  const auto m = from_dense(a);
  std::vector<double> rhs(30);
  for (int i = 0; i < 30; ++i) rhs[i] = std::sin(i);
  std::vector<double> x(30, 0.0);
  cg_solve(m, rhs, x, 1e-9, 500);
  const auto ax = m * x;
  double rn = 0.0, bn = 0.0;
  for (int i = 0; i < 30; ++i) {
    rn += (ax[i] - rhs[i]) * (ax[i] - rhs[i]);
    bn += rhs[i] * rhs[i];
  }
  CHECK(std::sqrt(rn) <= 1.01e-9 * std::sqrt(bn));

  // Starting from the solution needs no iterations.
  const auto again = cg_solve(m, rhs, x, 1e-9, 500);
  CHECK(again.iterations == 0);
}

TEST_CASE("iteration cap raises a convergence error with the residual") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(20, 20);
  for (int i = 0; i < 20; ++i) {
    a(i, i) = 2.0;
    if (i + 1 < 20) a(i, i + 1) = a(i + 1, i) = -1.0;
  }
  std::vector<double> rhs(20, 1.0);
  std::vector<double> x(20, 0.0);
  try {
    cg_solve(from_dense(a), rhs, x, 1e-12, 2);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.kind() == ErrorKind::convergence);
    CHECK(e.iterations() == 2);
    CHECK(e.residual() > 1e-12);
  }
}

TEST_CASE("argument checks") {
  const auto id = from_dense(Eigen::MatrixXd::Identity(3, 3));
  std::vector<double> x(2);
  CHECK_THROWS_AS(cg_solve(id, std::vector<double>(3, 1.0), x, 1e-8, 5), Error);
  std::vector<double> y(3);
  CHECK_THROWS_AS(cg_solve(id, std::vector<double>(3, 1.0), y, 0.0, 5), Error);
  CHECK_THROWS_AS(cg_solve(id, std::vector<double>(3, 1.0), y, 1.0, 5), Error);
}

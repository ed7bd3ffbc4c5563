#include <gtest/gtest.h>

#include <cmath>

#include "fevolve/elliptic.hpp"
#include "fevolve/error.hpp"
#include "helpers.hpp"

using namespace fevolve;
using fevolve::testing::discretize;
using fevolve::testing::kPi;

namespace {
Nonlinearity poisson_f() {
  Nonlinearity f;
  f.f = [](double u) { return -(1.0 + u * u); };
  f.lipschitz = [](double r) { return 2.0 * r; };
  f.sup_bound = [](double r) { return 1.0 + r * r; };
  return f;
}
}  // namespace

TEST(Green, MatchesDenseSolve) {
  const auto d = discretize(2, 0.125);
  const GreenOperator G(d.S, d.mass);
  const Vec f = Vec::LinSpaced(d.S.rows(), -1.0, 2.0);
  const Vec ref = Mat(d.S).ldlt().solve(Mat(d.mass.matrix()) * f);
  EXPECT_LT((G.apply(f) - ref).norm(), 1e-12 * ref.norm());
  EXPECT_LT((green_apply(d.S, d.mass, f) - ref).norm(), 1e-12 * ref.norm());
}

TEST(Green, OneDimensionalMatchesTridiagonalSolve) {
  // (1/h) tridiag(-1, 2, -1) u = M f solved by the Thomas algorithm.
  const double h = 0.125;
  const auto d = discretize(1, h);
  const Eigen::Index n = d.S.rows();
  const Vec f = Vec::LinSpaced(n, 1.0, 2.0);
  Vec rhs = d.mass.matrix() * f;
  Vec c(n);
  Vec diag = Vec::Constant(n, 2.0 / h);
  const double off = -1.0 / h;
  for (Eigen::Index i = 1; i < n; ++i) {
    const double w = off / diag[i - 1];
    diag[i] -= w * off;
    rhs[i] -= w * rhs[i - 1];
  }
  c[n - 1] = rhs[n - 1] / diag[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) c[i] = (rhs[i] - off * c[i + 1]) / diag[i];
  EXPECT_LT((green_apply(d.S, d.mass, f) - c).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Green, NodallyExactForExactLoad) {
  // -u'' = 1 with the load integral(phi_i) = h: linear elements are nodally exact in 1D.
  const double h = 0.125;
  const auto d = discretize(1, h);
  const Vec load = Vec::Constant(d.S.rows(), h);
  const Vec u = green_apply(d.S, d.mass, d.mass.solve(load));
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double x = (i + 1) * h;
    EXPECT_NEAR(u[i], 0.5 * x * (1.0 - x), 1e-13);
  }
}

TEST(Green, SingularStiffnessIsRejected) {
  const auto d = discretize(1, 0.25, BoundaryCondition::none);
  try {
    GreenOperator G(d.S, d.mass);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularOperator);
  }
}

TEST(Semilinear, PoissonConvergesWithAnalyticRatio) {
  const auto d = discretize(2, 1.0 / 16);
  const SemilinearProblem p = make_semilinear_problem(d.fo, poisson_f(), 1.0, 2.0 * kPi * kPi, "poisson");
  const Vec u0 = Vec::Zero(d.S.rows());
  const SemilinearSolution s = semilinear_solve(p, u0);
  EXPECT_TRUE(s.report.converged);
  EXPECT_NEAR(s.certificate.K, 1.0 / (kPi * kPi), 1e-15);
  EXPECT_LE(s.report.max_ratio, s.certificate.K + 1e-3);
  EXPECT_LE(s.certificate.residual, 1e-10);
  EXPECT_TRUE(s.report.bounds_dominate(1e-12));
  EXPECT_TRUE(s.certificate.confined);
  // Fixed point residual checked independently.
  const Vec fu = s.u.unaryExpr([](double v) { return -(1.0 + v * v); });
  EXPECT_LT((d.S * s.u - d.mass.matrix() * fu).norm(), 1e-10);
  // The solution of Laplace(u) = 1 + u^2 with zero data is negative.
  EXPECT_LT(s.u.maxCoeff(), 0.0);
}

TEST(Semilinear, CoercivityDefaultsToSpectralLambdaMin) {
  const double h = 1.0 / 8;
  const auto d = discretize(1, h);
  const SemilinearProblem p = make_semilinear_problem(d.fo, poisson_f(), 1.0);
  EXPECT_NEAR(p.m, fevolve::testing::lambda_min_1d(h), 1e-9);
  EXPECT_EQ(p.m_source, "spectral");
}

TEST(Semilinear, DistinctStartsReachSameFixedPoint) {
  const auto d = discretize(2, 1.0 / 16);
  const SemilinearProblem p = make_semilinear_problem(d.fo, poisson_f(), 1.0, 2.0 * kPi * kPi);
  const double tol = 1e-12;
  const Vec a = semilinear_solve(p, Vec::Zero(d.S.rows()), tol).u;
  const Vec b = semilinear_solve(p, Vec::Constant(d.S.rows(), -0.9), tol).u;
  EXPECT_LE(discrete_norm(Vec(a - b), d.mass), 2 * tol);
}

TEST(Semilinear, LargeRadiusViolatesContraction) {
  const auto d = discretize(2, 1.0 / 8);
  const SemilinearProblem p = make_semilinear_problem(d.fo, poisson_f(), 10.0, 2.0 * kPi * kPi);
  try {
    (void)semilinear_solve(p, Vec::Zero(d.S.rows()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContractionConditionViolated);
    EXPECT_EQ(e.module(), "elliptic");
  }
}

TEST(Semilinear, SmallBallIsEscaped) {
  const auto d = discretize(2, 1.0 / 8);
  const SemilinearProblem p = make_semilinear_problem(d.fo, poisson_f(), 0.01, 2.0 * kPi * kPi);
  try {
    (void)semilinear_solve(p, Vec::Zero(d.S.rows()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BallEscape);
  }
}

TEST(Semilinear, AprioriBoundFormula) {
  const SemilinearConstants c{2.0, 20.0, 1.0, 2.0, 0.5};
  const double b = semilinear_apriori_bound(c, 3, 0.1, 2.0, 100.0, 4.0);
  EXPECT_DOUBLE_EQ(b, 4.0 * 0.01 + std::pow(0.1, 3) / 18.0 * 102.0 * 0.5);
  EXPECT_LT(semilinear_apriori_bound(c, 4, 0.1, 2.0, 100.0, 0.0), semilinear_apriori_bound(c, 3, 0.1, 2.0, 100.0, 0.0));
  EXPECT_THROW((void)semilinear_apriori_bound(SemilinearConstants{30.0, 20.0, 1.0, 2.0, 0.5}, 1, 0.1, 2.0, 1.0, 0.0),
               Error);
}

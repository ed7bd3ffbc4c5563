#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fevolve/linalg.hpp"
#include "helpers.hpp"

using namespace fevolve;

namespace {
Mat random_spd(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Mat B(n, n);
  for (auto& v : B.reshaped()) v = nd(rng);
  return B * B.transpose() + n * Mat::Identity(n, n);
}
}  // namespace

TEST(Lanczos, MatchesDenseLargestEigenvalue) {
  const Mat A = random_spd(40, 1);
  const double ref = Eigen::SelfAdjointEigenSolver<Mat>(A).eigenvalues().maxCoeff();
  const auto est = lanczos_max_eigenvalue([&](const Vec& x) -> Vec { return A * x; }, 40);
  EXPECT_TRUE(est.converged);
  EXPECT_NEAR(est.value, ref, 1e-10 * ref);
}

TEST(Lanczos, IsDeterministic) {
  const Mat A = random_spd(30, 2);
  auto apply = [&](const Vec& x) -> Vec { return A * x; };
  EXPECT_EQ(lanczos_max_eigenvalue(apply, 30).value, lanczos_max_eigenvalue(apply, 30).value);
}

TEST(GeneralizedEigen, IterativeAgreesWithDense) {
  const auto d = fevolve::testing::discretize(1, 1.0 / 32);
  const Mat S = Mat(d.S);
  const Mat M = Mat(d.mass.matrix());
  const EigenRange dense = generalized_extremal_dense(S, M);
  const EigenRange iter = generalized_extremal_iterative(d.S, d.mass.matrix());
  EXPECT_NEAR(dense.lambda_min, fevolve::testing::lambda_min_1d(1.0 / 32), 1e-9);
  EXPECT_NEAR(dense.lambda_max, fevolve::testing::lambda_max_1d(1.0 / 32), 1e-6);
  EXPECT_NEAR(iter.lambda_min, dense.lambda_min, 1e-9 * dense.lambda_min);
  EXPECT_NEAR(iter.lambda_max, dense.lambda_max, 1e-9 * dense.lambda_max);
}

TEST(LogSlope, RecoversPowerLaw) {
  const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> e;
  for (double v : h) e.push_back(3.0 * std::pow(v, 2.5));
  EXPECT_NEAR(fit_log_slope(h, e), 2.5, 1e-12);
  const std::vector<double> z(4, 0.0);
  EXPECT_TRUE(std::isinf(fit_log_slope(h, z)));
}

TEST(Symmetry, ResidualDetectsAsymmetry) {
  Mat A = random_spd(5, 4);
  EXPECT_EQ(symmetry_residual(A), 0.0);
  A(0, 1) += 1e-3 * A.cwiseAbs().maxCoeff();
  EXPECT_NEAR(symmetry_residual(A), 1e-3, 1e-12);
  EXPECT_NEAR(symmetry_residual(SpMat(A.sparseView())), 1e-3, 1e-12);
}

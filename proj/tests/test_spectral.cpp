#include <gtest/gtest.h>

#include <cmath>

#include "fevolve/error.hpp"
#include "fevolve/spectral.hpp"
#include "helpers.hpp"

using namespace fevolve;
using fevolve::testing::discretize;
using fevolve::testing::kPi;

TEST(Spectral, LambdaMinMatchesDiscreteSineMode) {
  for (double h : {1.0 / 4, 1.0 / 16, 1.0 / 64}) {
    const auto d = discretize(1, h);
    const SpectralReport r = spectral_bracketing(d.S, d.mass, SpectralBracket{kPi * kPi}, h);
    EXPECT_NEAR(r.lambda_min, fevolve::testing::lambda_min_1d(h), 1e-9 * r.lambda_min);
    EXPECT_NEAR(r.lambda_max, fevolve::testing::lambda_max_1d(h), 1e-9 * r.lambda_max);
    EXPECT_TRUE(r.bracketing_ok);
    EXPECT_NEAR(r.norm_Ainv, 1.0 / r.lambda_min, 1e-15);
  }
}

TEST(Spectral, IterativeRouteAgreesWithDense) {
  const double h = 1.0 / 32;
  const auto d = discretize(2, h);
  const SpectralReport dense = spectral_bracketing(d.S, d.mass, SpectralBracket{2 * kPi * kPi}, h);
  const SpectralReport iter = spectral_bracketing(d.S, d.mass, SpectralBracket{2 * kPi * kPi}, h, 100);
  EXPECT_NEAR(iter.lambda_min, dense.lambda_min, 1e-9 * dense.lambda_min);
  EXPECT_NEAR(iter.lambda_max, dense.lambda_max, 1e-9 * dense.lambda_max);
  // 2D: lambda_min is twice the 1D value on a tensor grid.
  EXPECT_NEAR(dense.lambda_min, 2.0 * fevolve::testing::lambda_min_1d(h), 1e-9);
}

TEST(Spectral, BracketViolationIsFlagged) {
  const auto d = discretize(1, 0.125);
  const SpectralReport r = spectral_bracketing(d.S, d.mass, SpectralBracket{20.0}, 0.125);
  EXPECT_FALSE(r.bracketing_ok);
}

TEST(Spectral, RejectsNonSymmetric) {
  const auto d = discretize(1, 0.125);
  SpMat S = d.S;
  S.coeffRef(0, 1) += 1.0;
  try {
    (void)spectral_bracketing(S, d.mass, {}, 0.125);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSymmetric);
  }
}

TEST(Spectral, NormConvergenceStudyIsMonotoneAndExtrapolates) {
  std::vector<FamilyMember> fam;
  for (double h : {1.0 / 64, 1.0 / 8, 1.0 / 32, 1.0 / 16}) {
    const auto d = discretize(1, h);
    fam.push_back({h, d.S, d.mass});
  }
  const NormConvergenceStudy s = norm_convergence_study(fam, SpectralBracket{kPi * kPi});
  ASSERT_EQ(s.rows.size(), 4u);
  EXPECT_GT(s.rows.front().h, s.rows.back().h);
  EXPECT_TRUE(s.lambda_min_nonincreasing);
  EXPECT_TRUE(s.norm_inverse_nondecreasing);
  EXPECT_NEAR(s.extrapolated_lambda_min, kPi * kPi, 1e-4 * kPi * kPi);
  EXPECT_NEAR(s.extrapolated_norm_inverse, 1.0 / (kPi * kPi), 1e-4 / (kPi * kPi));
}

TEST(Spectral, RichardsonRemovesLeadingTerm) {
  auto q = [](double h) { return 5.0 + 3.0 * h * h; };
  EXPECT_NEAR(richardson_limit(0.1, q(0.1), 0.05, q(0.05), 2.0), 5.0, 1e-13);
}

TEST(Spectral, StabilityAndInverseNorm) {
  std::vector<DiscreteOperator> fam;
  for (double h : {1.0 / 4, 1.0 / 8, 1.0 / 16}) {
    const auto d = discretize(1, h);
    fam.push_back(coefficient_operator(d.S, d.mass, "A"));
  }
  const StabilityResult s = h_stability_check(fam);
  EXPECT_TRUE(s.stable);
  EXPECT_LE(s.sup_inv_norm, 1.0 / (kPi * kPi) + 1e-12);
  EXPECT_NEAR(inverse_norm(fam.back()), 1.0 / fevolve::testing::lambda_min_1d(1.0 / 16), 1e-10);

  DiscreteOperator singular{Mat::Zero(2, 2), GramMatrix::identity(2), GramMatrix::identity(2), "0"};
  EXPECT_TRUE(std::isinf(inverse_norm(singular)));
}

TEST(Spectral, HeatGeneratorIsDissipativeAndItsNegativeIsNot) {
  const auto d = discretize(1, 1.0 / 16);
  DiscreteOperator A = coefficient_operator(d.S, d.mass, "A");
  A.matrix = -A.matrix;
  const DissipativityResult r = dissipativity_check(A);
  EXPECT_TRUE(r.dissipative);
  EXPECT_LE(r.max_re, -fevolve::testing::lambda_min_1d(1.0 / 16) * (1 - 1e-9));
  A.matrix = -A.matrix;
  EXPECT_FALSE(dissipativity_check(A).dissipative);
}

TEST(Spectral, CsvHasHeaderAndRows) {
  const auto d = discretize(1, 0.25);
  const std::vector<SpectralReport> rows{spectral_bracketing(d.S, d.mass, SpectralBracket{kPi * kPi}, 0.25)};
  const std::string csv = spectral_csv(rows);
  EXPECT_EQ(csv.rfind("h,lambda_min,lambda_max,norm_A,norm_Ainv,bracketing_ok,stable\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

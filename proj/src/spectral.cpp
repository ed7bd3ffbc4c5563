#include "fevolve/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "fevolve/error.hpp"
#include "fevolve/linalg.hpp"

namespace fevolve {

namespace {
constexpr std::string_view kModule = "spectral";
constexpr double kSymmetryTol = 1e-12;
constexpr double kBracketSlack = 1e-8;
constexpr double kMonotoneSlack = 1e-10;
}  // namespace

SpectralReport spectral_bracketing(const SpMat& S, const GramMatrix& mass,
                                   std::optional<SpectralBracket> bracket, double h,
                                   Eigen::Index dense_limit) {
  if (S.rows() != S.cols() || S.rows() != mass.size()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "stiffness and mass sizes differ");
  }
  if (symmetry_residual(S) > kSymmetryTol) {
    throw Error(ErrorCode::NotSymmetric, kModule, "operator is not symmetric");
  }
  EigenRange range;
  if (S.rows() <= dense_limit) {
    range = generalized_extremal_dense(Mat(S), Mat(mass.matrix()));
  } else {
    range = generalized_extremal_iterative(S, mass.matrix());
    if (!range.converged) {
      throw Error(ErrorCode::EigensolveFailure, kModule, "Lanczos did not converge");
    }
  }

  SpectralReport r;
  r.h = h;
  r.lambda_min = range.lambda_min;
  r.lambda_max = range.lambda_max;
  r.norm_A = std::max(std::abs(range.lambda_min), std::abs(range.lambda_max));
  r.norm_Ainv = range.lambda_min > 0.0 ? 1.0 / range.lambda_min
                                       : std::numeric_limits<double>::infinity();
  r.stability_ok = std::isfinite(r.norm_Ainv);
  r.bracket = bracket;
  if (bracket) {
    r.bracketing_ok = bracket->lower - kBracketSlack <= r.lambda_min &&
                      r.lambda_max <= bracket->upper + kBracketSlack;
  }
  return r;
}

SpectralReport spectral_bracketing(const DiscreteOperator& S, const GramMatrix& mass,
                                   std::optional<SpectralBracket> bracket, double h) {
  if (symmetry_residual(S.matrix) > kSymmetryTol) {
    throw Error(ErrorCode::NotSymmetric, kModule, "operator is not symmetric");
  }
  return spectral_bracketing(SpMat(S.matrix.sparseView()), mass, bracket, h);
}

double richardson_limit(double h_coarse, double q_coarse, double h_fine, double q_fine, double order) {
  const double ratio = std::pow(h_coarse / h_fine, order);
  return q_fine + (q_fine - q_coarse) / (ratio - 1.0);
}

NormConvergenceStudy norm_convergence_study(std::span<const FamilyMember> family,
                                            std::optional<SpectralBracket> bracket, double order) {
  if (family.size() < 2) {
    throw Error(ErrorCode::InconsistentFamily, kModule, "a convergence study needs at least 2 members");
  }
  std::vector<const FamilyMember*> sorted;
  for (const auto& m : family) sorted.push_back(&m);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->h > b->h; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i]->h < sorted[i - 1]->h) || sorted[i]->S.rows() < sorted[i - 1]->S.rows()) {
      throw Error(ErrorCode::InconsistentFamily, kModule, "family spacings must be distinct and nested");
    }
  }

  NormConvergenceStudy study;
  for (const auto* m : sorted) study.rows.push_back(spectral_bracketing(m->S, m->mass, bracket, m->h));

  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    const auto& c = study.rows[i - 1];
    const auto& f = study.rows[i];
    const double s_min = kMonotoneSlack * std::abs(c.lambda_min);
    const double s_max = kMonotoneSlack * std::abs(c.lambda_max);
    if (f.lambda_min > c.lambda_min + s_min) study.lambda_min_nonincreasing = false;
    if (f.lambda_max < c.lambda_max - s_max) study.lambda_max_nondecreasing = false;
    if (f.norm_Ainv < c.norm_Ainv - kMonotoneSlack * c.norm_Ainv) study.norm_inverse_nondecreasing = false;
  }
  const auto& c = study.rows[study.rows.size() - 2];
  const auto& f = study.rows.back();
  study.extrapolated_lambda_min = richardson_limit(c.h, c.lambda_min, f.h, f.lambda_min, order);
  study.extrapolated_norm_inverse = richardson_limit(c.h, c.norm_Ainv, f.h, f.norm_Ainv, order);
  return study;
}

double inverse_norm(const DiscreteOperator& B) {
  if (B.rows() != B.cols()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "inverse norm needs a square operator");
  }
  if (B.rows() == 0) return 0.0;
  const Mat Ry = B.codomain.dense_root();
  const Mat Rx = B.domain.dense_root();
  const Mat BRinv = Rx.transpose().triangularView<Eigen::Lower>().solve(B.matrix.transpose()).transpose();
  const Mat X = Ry * BRinv;
  Eigen::JacobiSVD<Mat> svd(X);
  const auto& sv = svd.singularValues();
  const double smax = sv[0];
  const double smin = sv[sv.size() - 1];
  const double eps = std::numeric_limits<double>::epsilon();
  if (smax == 0.0 || smin <= eps * static_cast<double>(X.rows()) * smax) {
    return std::numeric_limits<double>::infinity();
  }
  return 1.0 / smin;
}

StabilityResult h_stability_check(std::span<const DiscreteOperator> family, double threshold) {
  StabilityResult out;
  for (const auto& B : family) {
    const double v = inverse_norm(B);
    out.inv_norms.push_back(v);
    out.sup_inv_norm = std::max(out.sup_inv_norm, v);
  }
  out.stable = std::isfinite(out.sup_inv_norm) && out.sup_inv_norm < threshold;
  return out;
}

DissipativityResult dissipativity_check(const DiscreteOperator& B, int samples, std::uint64_t seed) {
  if (B.rows() != B.cols()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "dissipativity needs a square operator");
  }
  const Eigen::Index n = B.rows();
  DissipativityResult out;
  if (n == 0) return out;

  // Re<Bx,x>_M over unit x equals the Rayleigh quotient of the symmetric
  // part of X = m B m^{-1} at z = m x.
  const Mat Ry = B.codomain.dense_root();
  const Mat Rx = B.domain.dense_root();
  const Mat X = Ry * Rx.transpose().triangularView<Eigen::Lower>().solve(B.matrix.transpose()).transpose();
  const Mat H = 0.5 * (X + X.transpose());

  double best = -std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  for (int s = 0; s < samples; ++s) {
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = dist(rng);
    x /= discrete_norm(x, B.domain);
    best = std::max(best, sesquilinear_eval(B, x, x));
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const Vec z = es.eigenvectors().col(n - 1);
  const Vec x = B.domain.apply_root_inverse(z);
  best = std::max(best, sesquilinear_eval(B, x, x) / discrete_inner(x, x, B.domain));
  out.max_re = best;
  out.dissipative = best <= 1e-10;
  return out;
}

std::string spectral_csv(std::span<const SpectralReport> rows) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "h,lambda_min,lambda_max,norm_A,norm_Ainv,bracketing_ok,stable\n";
  for (const auto& r : rows) {
    os << r.h << ',' << r.lambda_min << ',' << r.lambda_max << ',' << r.norm_A << ',' << r.norm_Ainv
       << ',' << (r.bracketing_ok ? 1 : 0) << ',' << (r.stability_ok ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace fevolve

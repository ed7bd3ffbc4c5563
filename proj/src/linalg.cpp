#include "fevolve/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "fevolve/error.hpp"

namespace fevolve {

namespace {
constexpr std::string_view kModule = "linalg";
}

ExtremalEstimate lanczos_max_eigenvalue(const SymmetricAction& apply, Eigen::Index n,
                                        double rel_tol, int max_steps, std::uint64_t seed) {
  ExtremalEstimate out;
  if (n == 0) return out;
  if (n == 1) {
    Vec e = Vec::Ones(1);
    out.value = apply(e)[0];
    out.iterations = 1;
    out.converged = true;
    return out;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = dist(rng);
  q.normalize();

  const int steps = static_cast<int>(std::min<Eigen::Index>(n, max_steps));
  Mat Q(n, steps);
  std::vector<double> alpha;
  std::vector<double> beta;
  double previous = -std::numeric_limits<double>::infinity();

  for (int j = 0; j < steps; ++j) {
    Q.col(j) = q;
    Vec w = apply(q);
    const double a = q.dot(w);
    alpha.push_back(a);
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
    }
    const double b = w.norm();

    const int m = j + 1;
    Mat T = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(T);
    const double theta = es.eigenvalues()[m - 1];
    const double residual = std::abs(b * es.eigenvectors()(m - 1, m - 1));
    out.value = theta;
    out.iterations = m;

    const double scale = std::max(std::abs(theta), std::numeric_limits<double>::min());
    if (residual <= rel_tol * scale || b <= 1e-14 * scale ||
        (m > 3 && std::abs(theta - previous) <= 1e-3 * rel_tol * scale &&
         residual <= 1e-6 * scale)) {
      out.converged = true;
      return out;
    }
    previous = theta;
    beta.push_back(b);
    q = w / b;
  }
  out.converged = steps == n;
  return out;
}

EigenRange generalized_extremal_dense(const Mat& S, const Mat& M) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(S, M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolveFailure, kModule, "dense generalized eigensolve failed");
  }
  const auto& ev = es.eigenvalues();
  return EigenRange{ev[0], ev[ev.size() - 1], true};
}

EigenRange generalized_extremal_iterative(const SpMat& S, const SpMat& M) {
  using Chol = Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>>;
  Chol mchol(M);
  if (mchol.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolveFailure, kModule, "mass factorization failed");
  }
  Chol schol(S);
  if (schol.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolveFailure, kModule, "stiffness factorization failed");
  }
  const SpMat L = mchol.matrixL();
  const SpMat Lt = L.transpose();

  // C = L^{-1} S L^{-T}
  auto apply_c = [&](const Vec& x) -> Vec {
    Vec y = Lt.triangularView<Eigen::Upper>().solve(x);
    Vec z = S * y;
    return L.triangularView<Eigen::Lower>().solve(z);
  };
  // C^{-1} = L^T S^{-1} L
  auto apply_cinv = [&](const Vec& x) -> Vec {
    Vec y = L * x;
    Vec z = schol.solve(y);
    return Lt * z;
  };

  const auto n = S.rows();
  const auto top = lanczos_max_eigenvalue(apply_c, n);
  const auto inv = lanczos_max_eigenvalue(apply_cinv, n);
  return EigenRange{1.0 / inv.value, top.value, top.converged && inv.converged};
}

double fit_log_slope(std::span<const double> h, std::span<const double> err, double zero_tol) {
  if (h.size() != err.size()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "h and error lists differ in length");
  }
  if (std::all_of(err.begin(), err.end(), [&](double e) { return std::abs(e) <= zero_tol; })) {
    return std::numeric_limits<double>::infinity();
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(std::max(std::abs(err[i]), std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double symmetry_residual(const SpMat& A) {
  const SpMat At = A.transpose();
  const SpMat D = A - At;
  double dmax = 0.0;
  for (int k = 0; k < D.outerSize(); ++k) {
    for (SpMat::InnerIterator it(D, k); it; ++it) dmax = std::max(dmax, std::abs(it.value()));
  }
  double amax = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) amax = std::max(amax, std::abs(it.value()));
  }
  return amax > 0.0 ? dmax / amax : 0.0;
}

double symmetry_residual(const Mat& A) {
  const double amax = A.cwiseAbs().maxCoeff();
  return amax > 0.0 ? (A - A.transpose()).cwiseAbs().maxCoeff() / amax : 0.0;
}

}  // namespace fevolve

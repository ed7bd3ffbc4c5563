#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "fevolve/types.hpp"

namespace fevolve {

/// Symmetric linear action y = A x on R^n.
using SymmetricAction = std::function<Vec(const Vec&)>;

struct ExtremalEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of a symmetric operator by Lanczos with full
/// reorthogonalization. The start vector is drawn from a fixed seed.
ExtremalEstimate lanczos_max_eigenvalue(const SymmetricAction& apply, Eigen::Index n,
                                        double rel_tol = 1e-12, int max_steps = 400,
                                        std::uint64_t seed = 20240607);

/// Extremal eigenvalues of the symmetric pencil S x = lambda M x.
struct EigenRange {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool converged = true;
};

/// Dense route (generalized self-adjoint eigensolver).
EigenRange generalized_extremal_dense(const Mat& S, const Mat& M);

/// Iterative route: Lanczos on L^{-1} S L^{-T} for the top, shift-invert on
/// the same pencil for the bottom. Requires S and M SPD.
EigenRange generalized_extremal_iterative(const SpMat& S, const SpMat& M);

/// Least-squares slope of log(err) against log(h). Returns +inf when every
/// error is below `zero_tol`.
double fit_log_slope(std::span<const double> h, std::span<const double> err,
                     double zero_tol = 1e-14);

/// Largest relative asymmetry max|A - A^T| / max|A|.
double symmetry_residual(const SpMat& A);
double symmetry_residual(const Mat& A);

}  // namespace fevolve

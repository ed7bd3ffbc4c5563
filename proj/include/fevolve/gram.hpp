#pragma once

#include <memory>
#include <span>
#include <string>

#include "fevolve/mesh.hpp"
#include "fevolve/types.hpp"

namespace fevolve {

/// SPD inner-product (mass) matrix of a basis together with its lower
/// Cholesky factor L (M = L L^T). Discrete norms are ||x|| = ||L^T x||_2.
///
/// Immutable; copies share the factorization.
class GramMatrix {
 public:
  GramMatrix() = default;

  /// Factorizes `M`. Throws FactorizationFailed on a nonpositive pivot.
  static GramMatrix from_matrix(SpMat M, std::string id = {});
  static GramMatrix identity(Eigen::Index n);

  [[nodiscard]] Eigen::Index size() const;
  [[nodiscard]] const SpMat& matrix() const;
  [[nodiscard]] const SpMat& factor() const;
  [[nodiscard]] const std::string& id() const;

  /// 2-norm condition number of M.
  [[nodiscard]] double kappa() const;
  /// Discrete norm of the all-ones coefficient vector.
  [[nodiscard]] double volume() const;
  [[nodiscard]] double symmetry_residual() const;

  /// m x = L^T x
  [[nodiscard]] Vec apply_root(const Vec& x) const;
  [[nodiscard]] CVec apply_root(const CVec& x) const;
  /// m^{-1} z = L^{-T} z
  [[nodiscard]] Vec apply_root_inverse(const Vec& z) const;
  /// m^{-T} x = L^{-1} x
  [[nodiscard]] Vec apply_root_inverse_transpose(const Vec& x) const;
  /// M^{-1} b
  [[nodiscard]] Vec solve(const Vec& b) const;
  [[nodiscard]] CVec solve(const CVec& b) const;

  /// Dense L^T (small problems only).
  [[nodiscard]] Mat dense_root() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Mass matrix of the projector's hat basis, integrated per cell with a
/// 2-point-per-axis Gauss rule (exact for the bilinear integrand).
GramMatrix assemble_gram(const Projector& proj);

double discrete_inner(const Vec& x, const Vec& y, const GramMatrix& g);
Complex discrete_inner(const CVec& x, const CVec& y, const GramMatrix& g);
double discrete_norm(const Vec& x, const GramMatrix& g);
double discrete_norm(const CVec& x, const GramMatrix& g);

/// ||u - P u||_{L2} by a 5-point-per-axis Gauss rule on every cell.
double interpolation_error_l2(const Projector& proj, const ScalarField& u);

/// Fitted exponent of ||P_h u - u||_{L2} against h over a projector family
/// (at least 3 members). Returns +inf when u is reproduced exactly.
double projection_order_estimate(std::span<const Projector> family, const ScalarField& u);

}  // namespace fevolve

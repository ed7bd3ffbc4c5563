#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "fevolve/gram.hpp"
#include "fevolve/mesh.hpp"
#include "fevolve/types.hpp"

namespace fevolve {

/// Diffusion tensor model D(.) sampled at quadrature points.
class DiffusionModel {
 public:
  enum class Kind { identity, constant_spd, state_dependent };
  using TensorFn = std::function<Mat(double value)>;

  static DiffusionModel identity();
  static DiffusionModel constant(Mat K);
  /// `lipschitz` (c_D) and `bound` (M_D) hold on the ball the caller works in.
  /// The callback must be reentrant.
  static DiffusionModel state_dependent(TensorFn tensor, double lipschitz, double bound);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const Mat& constant_tensor() const { return K_; }
  [[nodiscard]] const TensorFn& tensor_fn() const { return tensor_; }
  /// M_D: sup ||D(v)||_2 (1 for identity, ||K||_2 for constant).
  [[nodiscard]] double bound() const { return bound_; }
  /// c_D: Lipschitz constant of D (0 unless state dependent).
  [[nodiscard]] double lipschitz() const { return lipschitz_; }
  [[nodiscard]] std::string name() const;

  /// Tensor at a sampled value for dimension `dim`.
  [[nodiscard]] Mat tensor(double value, int dim) const;

 private:
  Kind kind_ = Kind::identity;
  Mat K_;
  TensorFn tensor_;
  double lipschitz_ = 0.0;
  double bound_ = 1.0;
};

/// Exactly factorizable operator A[v] = a^T W D(v) a.
///
/// `a` maps dof coefficients to gradient components at every quadrature point
/// (row q*dim + c), `W` holds the quadrature weights times the cell measure,
/// `b` maps coefficients to field values at the same points (used to sample
/// state-dependent tensors).
class FactoredOperator {
 public:
  [[nodiscard]] const SpMat& gradient_factor() const { return a_; }
  [[nodiscard]] const SpMat& value_factor() const { return b_; }
  [[nodiscard]] const Vec& weights() const { return w_; }
  [[nodiscard]] const Projector& projector() const { return proj_; }
  [[nodiscard]] const GramMatrix& mass() const { return mass_; }
  [[nodiscard]] const DiffusionModel& diffusion() const { return D_; }
  [[nodiscard]] int dim() const { return proj_.grid().dim(); }
  [[nodiscard]] Eigen::Index sample_count() const { return w_.size(); }

  /// mu(A[I]) = ||a|| ||a^dagger|| in the weighted norms, i.e. the largest
  /// eigenvalue of (a^T W a, M).
  [[nodiscard]] double mu_identity() const { return mu_ai_; }
  /// K_a = h^2 mu(A[I]), so that ||a||^2 <= K_a / h^2.
  [[nodiscard]] double inv_estimate() const { return mu_ai_ * h_ * h_; }

  [[nodiscard]] FactoredOperator with_diffusion(DiffusionModel D) const;

  friend FactoredOperator build_difference_factor(const Projector&, const GramMatrix&);

 private:
  Projector proj_;
  GramMatrix mass_;
  SpMat a_;
  SpMat b_;
  Vec w_;
  DiffusionModel D_;
  double mu_ai_ = 0.0;
  double h_ = 0.0;
};

/// Gradient factor at per-cell Gauss points: the midpoint in 1D, 2^dim points
/// otherwise. a^T W a is the -Laplacian stiffness with the projector's BC.
FactoredOperator build_difference_factor(const Projector& proj, const GramMatrix& mass);

/// Coefficient-space operator B together with the Grams of its domain and
/// codomain.
struct DiscreteOperator {
  Mat matrix;
  GramMatrix domain;
  GramMatrix codomain;
  std::string label;

  [[nodiscard]] Eigen::Index rows() const { return matrix.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return matrix.cols(); }
};

/// S[v] = a^T W D(v_samples) a (sparse). `state` is required iff D is state dependent.
SpMat assemble_stiffness(const FactoredOperator& fo, const Vec* state = nullptr,
                         bool parallel = true);

/// Dense wrapper of the stiffness form: matrix S[v], label "stiffness".
DiscreteOperator assemble_operator(const FactoredOperator& fo, const std::optional<Vec>& state = {});

/// Coefficient operator M^{-1} S (maps coefficients to coefficients).
DiscreteOperator coefficient_operator(const SpMat& S, const GramMatrix& mass, std::string label);

using FieldAction = std::function<ScalarField(const ScalarField&)>;

/// Column j = projY.decompose(action(projX.expand(e_j))).
DiscreteOperator particular_representation(const FieldAction& action, const Projector& projX,
                                           const GramMatrix& gramX, const Projector& projY,
                                           const GramMatrix& gramY, std::string label = {});

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// ||m_Y B m_X^{-1}||_2 by power iteration on X^T X from the normalized
/// all-ones vector (relative tolerance 1e-10, cap 10000).
NormEstimate operator_norm(const DiscreteOperator& B, double rel_tol = 1e-10, int max_iter = 10000);

/// ||m B m^{-1}||_inf. Requires a square B with matching Grams.
double gershgorin_bound(const DiscreteOperator& B);

/// Sesquilinear form A[x](y) = <B x, y> in the codomain Gram.
double sesquilinear_eval(const DiscreteOperator& B, const Vec& x, const Vec& y);
Complex sesquilinear_eval(const DiscreteOperator& B, const CVec& x, const CVec& y);

/// One member of a representation family: B_h acting on p^dagger u, against
/// q^dagger (B u) supplied by `reference_field`.
struct RepresentationSample {
  Projector projector;
  DiscreteOperator representation;
};

/// Fitted nu of ||B_h p^dagger u - q^dagger B u|| (codomain norm) against h.
/// Returns +inf when every error vanishes.
double approximation_order_estimate(std::span<const RepresentationSample> family,
                                    const ScalarField& reference_field, const ScalarField& u);

}  // namespace fevolve

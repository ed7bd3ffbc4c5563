#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fevolve/gram.hpp"
#include "fevolve/operator_factory.hpp"

namespace fevolve {

/// Continuum bounds m <= sigma(A) <= M used to bracket discrete spectra.
struct SpectralBracket {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

struct SpectralReport {
  double h = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double norm_A = 0.0;
  double norm_Ainv = 0.0;
  std::optional<SpectralBracket> bracket;
  bool bracketing_ok = true;
  bool stability_ok = true;
};

/// Extremal eigenvalues of S x = lambda M x: dense below `dense_limit` dofs,
/// Lanczos (top) and shift-invert Lanczos (bottom) above.
SpectralReport spectral_bracketing(const SpMat& S, const GramMatrix& mass,
                                   std::optional<SpectralBracket> bracket = {}, double h = 0.0,
                                   Eigen::Index dense_limit = 2000);
SpectralReport spectral_bracketing(const DiscreteOperator& S, const GramMatrix& mass,
                                   std::optional<SpectralBracket> bracket = {}, double h = 0.0);

struct FamilyMember {
  double h = 0.0;
  SpMat S;
  GramMatrix mass;
};

struct NormConvergenceStudy {
  std::vector<SpectralReport> rows;  ///< sorted by decreasing h
  bool lambda_min_nonincreasing = true;
  bool lambda_max_nondecreasing = true;
  bool norm_inverse_nondecreasing = true;
  double extrapolated_lambda_min = 0.0;
  double extrapolated_norm_inverse = 0.0;
};

/// Richardson limit of a quantity observed at two spacings, error ~ h^order.
double richardson_limit(double h_coarse, double q_coarse, double h_fine, double q_fine, double order);

/// Spectra for a refinement family with monotonicity verdicts (1e-10
/// relative slack) and a Richardson limit of order `order` from the two
/// finest members.
NormConvergenceStudy norm_convergence_study(std::span<const FamilyMember> family,
                                            std::optional<SpectralBracket> bracket = {},
                                            double order = 2.0);

struct StabilityResult {
  bool stable = true;
  double sup_inv_norm = 0.0;
  std::vector<double> inv_norms;  ///< per member, +inf when singular
};

/// Weighted ||A_h^{-1}|| for each member; stable iff all finite and the
/// supremum stays below `threshold`.
StabilityResult h_stability_check(std::span<const DiscreteOperator> family, double threshold = 1e12);

/// Weighted ||B^{-1}|| = 1 / sigma_min(m B m^{-1}); +inf for singular B.
double inverse_norm(const DiscreteOperator& B);

struct DissipativityResult {
  bool dissipative = true;
  double max_re = 0.0;
};

/// max Re <B x, x> over `samples` random unit vectors and the top
/// eigenvector of the symmetric part; dissipative iff max_re <= 1e-10.
DissipativityResult dissipativity_check(const DiscreteOperator& B, int samples = 64,
                                        std::uint64_t seed = 7);

/// CSV rows: h,lambda_min,lambda_max,norm_A,norm_Ainv,bracketing_ok,stable
std::string spectral_csv(std::span<const SpectralReport> rows);

}  // namespace fevolve

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fevolve/contraction.hpp"
#include "fevolve/gram.hpp"
#include "fevolve/operator_factory.hpp"

namespace fevolve {

/// Discrete Green operator f -> u solving S u = M f, with the SPD
/// factorization of S cached and shared read-only between copies.
class GreenOperator {
 public:
  GreenOperator(SpMat S, GramMatrix mass);

  [[nodiscard]] Vec apply(const Vec& f) const;
  [[nodiscard]] const SpMat& stiffness() const;
  [[nodiscard]] const GramMatrix& mass() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// One-shot Green application (factorizes S).
Vec green_apply(const SpMat& S, const GramMatrix& mass, const Vec& f_coeffs);

/// Nodal nonlinearity with its Lipschitz and sup-bound models on B_r(0).
struct Nonlinearity {
  std::function<double(double)> f;
  std::function<double(double)> lipschitz;  ///< c_f(r)
  std::function<double(double)> sup_bound;  ///< M_f(r)
};

/// S u = M f(u) with homogeneous Dirichlet data.
struct SemilinearProblem {
  FactoredOperator fo;
  SpMat S;
  GramMatrix mass;
  Nonlinearity f;
  double r = 1.0;
  double m = 0.0;  ///< coercivity constant
  std::string m_source = "spectral";
  std::string label;

  [[nodiscard]] double c_f() const { return f.lipschitz(r); }
  [[nodiscard]] double M_f() const { return f.sup_bound(r); }
  [[nodiscard]] Vec apply_f(const Vec& u) const;
};

/// Wires a problem; m defaults to lambda_min(S, M) from spectral bracketing.
SemilinearProblem make_semilinear_problem(FactoredOperator fo, Nonlinearity f, double r,
                                          std::optional<double> m_override = {}, std::string label = {});

struct EllipticCertificate {
  double K = 0.0;
  double c_f = 0.0;
  double m = 0.0;
  std::string m_source;
  double max_inf_norm = 0.0;  ///< largest nodal |u_k| over all iterates
  bool confined = true;
  double residual = 0.0;      ///< ||S u - M f(u)||_2
  double mu_G = 0.0;
};

struct SemilinearSolution {
  Vec u;
  ContractionReport report;
  EllipticCertificate certificate;
};

/// u_{k+1} = G f(u_k) through the contraction engine with K = c_f(r)/m.
/// Throws ContractionConditionViolated when c_f(r) >= m and BallEscape when
/// u0 or an iterate leaves the nodal ball of radius r.
SemilinearSolution semilinear_solve(const SemilinearProblem& p, const Vec& u0, double tol = 1e-12,
                                    int max_iter = 500);

struct SemilinearConstants {
  double c_f = 0.0;
  double m = 0.0;
  double r = 0.0;
  double M_f = 0.0;
  double mu_G = 1.0;
};

/// c_u h^nu + ((c_f/m)^k / (m - c_f)) (r ||A_h|| + M_f) mu(G).
double semilinear_apriori_bound(const SemilinearConstants& c, int k, double h, double nu,
                                double norm_Ah, double c_u);
double elliptic_apriori_bound(const SemilinearProblem& p, int k, double h, double norm_Ah, double c_u,
                              double nu = 2.0);

}  // namespace fevolve

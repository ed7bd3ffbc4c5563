#include "fevolve/elliptic.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

#include "fevolve/error.hpp"
#include "fevolve/spectral.hpp"

namespace fevolve {

namespace {
constexpr std::string_view kModule = "elliptic";
using Chol = Eigen::SimplicialLLT<SpMat>;
}  // namespace

struct GreenOperator::Impl {
  SpMat S;
  GramMatrix mass;
  Chol chol;
};

GreenOperator::GreenOperator(SpMat S, GramMatrix mass) {
  if (S.rows() != S.cols() || S.rows() != mass.size()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "stiffness and mass sizes differ");
  }
  auto impl = std::make_shared<Impl>();
  impl->chol.compute(S);
  if (impl->chol.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularOperator, kModule, "stiffness is not positive definite");
  }
  impl->S = std::move(S);
  impl->mass = std::move(mass);
  impl_ = std::move(impl);
}

Vec GreenOperator::apply(const Vec& f) const {
  if (f.size() != impl_->S.rows()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "load vector size does not match operator");
  }
  const Vec rhs = impl_->mass.matrix() * f;
  Vec u = impl_->chol.solve(rhs);
  const double res = (impl_->S * u - rhs).norm();
  const double scale = rhs.norm();
  if (!std::isfinite(res) || res > 1e-10 * scale) {
    throw Error(ErrorCode::SingularOperator, kModule,
                "Green solve residual " + std::to_string(res) + " exceeds 1e-10 relative");
  }
  return u;
}

const SpMat& GreenOperator::stiffness() const { return impl_->S; }
const GramMatrix& GreenOperator::mass() const { return impl_->mass; }

Vec green_apply(const SpMat& S, const GramMatrix& mass, const Vec& f_coeffs) {
  return GreenOperator(S, mass).apply(f_coeffs);
}

Vec SemilinearProblem::apply_f(const Vec& u) const { return u.unaryExpr(f.f); }

SemilinearProblem make_semilinear_problem(FactoredOperator fo, Nonlinearity f, double r,
                                          std::optional<double> m_override, std::string label) {
  if (!f.f || !f.lipschitz || !f.sup_bound) {
    throw Error(ErrorCode::InvalidConstants, kModule, "nonlinearity needs f, c_f and M_f models");
  }
  SemilinearProblem p;
  p.S = assemble_stiffness(fo);
  p.mass = fo.mass();
  p.fo = std::move(fo);
  p.f = std::move(f);
  p.r = r;
  if (m_override) {
    p.m = *m_override;
    p.m_source = "analytic";
  } else {
    p.m = spectral_bracketing(p.S, p.mass).lambda_min;
    p.m_source = "spectral";
  }
  p.label = std::move(label);
  if (!(p.r > 0.0) || !(p.m > 0.0) || p.c_f() < 0.0 || p.M_f() < 0.0) {
    throw Error(ErrorCode::InvalidConstants, kModule, "need r > 0, m > 0, c_f >= 0, M_f >= 0");
  }
  return p;
}

SemilinearSolution semilinear_solve(const SemilinearProblem& p, const Vec& u0, double tol, int max_iter) {
  const double cf = p.c_f();
  if (!(cf < p.m)) {
    throw Error(ErrorCode::ContractionConditionViolated, kModule,
                "c_f(r)=" + std::to_string(cf) + " >= m=" + std::to_string(p.m) + " (r=" +
                    std::to_string(p.r) + ")");
  }
  if (u0.size() != p.S.rows()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "initial guess size does not match dofs");
  }
  const double ball = p.r * (1.0 + 1e-12);
  EllipticCertificate cert;
  cert.max_inf_norm = u0.size() ? u0.cwiseAbs().maxCoeff() : 0.0;
  if (cert.max_inf_norm > ball) {
    throw Error(ErrorCode::BallEscape, kModule, "initial guess leaves the ball of radius r");
  }

  const GreenOperator green(p.S, p.mass);
  ContractionOptions opt;
  opt.K_hint = cf / p.m;
  opt.tol = tol;
  opt.max_iter = max_iter;

  auto T = [&](const Vec& u) -> Vec { return green.apply(p.apply_f(u)); };
  auto norm = [&](const Vec& v) { return discrete_norm(v, p.mass); };
  std::function<void(const Vec&, int)> observe = [&](const Vec& u, int k) {
    const double inf = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
    cert.max_inf_norm = std::max(cert.max_inf_norm, inf);
    if (inf > ball) {
      cert.confined = false;
      throw Error(ErrorCode::BallEscape, kModule,
                  "iterate " + std::to_string(k) + " has nodal max " + std::to_string(inf) + " > r");
    }
  };

  auto result = fixed_point_iterate(T, u0, norm, opt, observe);
  cert.K = *opt.K_hint;
  cert.c_f = cf;
  cert.m = p.m;
  cert.m_source = p.m_source;
  cert.mu_G = p.mass.volume();
  cert.residual = (p.S * result.x - p.mass.matrix() * p.apply_f(result.x)).norm();
  return SemilinearSolution{std::move(result.x), std::move(result.report), cert};
}

double semilinear_apriori_bound(const SemilinearConstants& c, int k, double h, double nu,
                                double norm_Ah, double c_u) {
  if (!(c.c_f >= 0.0 && c.c_f < c.m) || !(c.r > 0.0) || c.M_f < 0.0 || c.mu_G < 0.0 || k < 0) {
    throw Error(ErrorCode::InvalidConstants, kModule, "bound needs 0 <= c_f < m, r > 0, k >= 0");
  }
  const double K = c.c_f / c.m;
  const double floor_term = c_u * std::pow(h, nu);
  return floor_term + std::pow(K, k) / (c.m - c.c_f) * (c.r * norm_Ah + c.M_f) * c.mu_G;
}

double elliptic_apriori_bound(const SemilinearProblem& p, int k, double h, double norm_Ah, double c_u,
                              double nu) {
  return semilinear_apriori_bound(SemilinearConstants{p.c_f(), p.m, p.r, p.M_f(), p.mass.volume()}, k, h,
                                  nu, norm_Ah, c_u);
}

}  // namespace fevolve

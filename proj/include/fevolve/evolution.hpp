#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fevolve/gram.hpp"
#include "fevolve/kernels.hpp"
#include "fevolve/operator_factory.hpp"

namespace fevolve {

/// Nodal nonlinearity of an evolution problem. An empty `f` means f = 0.
struct EvolutionNonlinearity {
  std::function<Complex(Complex)> f;
  std::function<double(double)> lipschitz;  ///< c_f(r), in the norm the constants use
  std::function<double(double)> sup_bound;  ///< M_f(r)
};

/// u' = scale * (-M^{-1} S[u] u + f(u)), homogeneous Dirichlet data.
/// scale = 1 gives diffusion, scale = i gives the Schroedinger form.
struct EvolutionProblem {
  FactoredOperator fo;
  GramMatrix mass;
  SpMat S;  ///< S[.] for state-independent tensors
  EvolutionNonlinearity f;
  double r = 1.0;
  Complex scale{1.0, 0.0};
  std::string label;

  [[nodiscard]] bool state_dependent() const {
    return fo.diffusion().kind() == DiffusionModel::Kind::state_dependent;
  }
  /// g(v). State-dependent tensors are sampled from Re v. Reentrant.
  [[nodiscard]] CVec rhs(const CVec& v) const;
  /// Dense generator scale * (-M^{-1} S) of a linear problem (real scale, f = 0).
  [[nodiscard]] Mat generator() const;
};

EvolutionProblem make_evolution_problem(FactoredOperator fo, EvolutionNonlinearity f, double r,
                                        Complex scale = {1.0, 0.0}, std::string label = {});

struct LipschitzConstants {
  double c_g = 0.0;
  double M_g = 0.0;
  double M_D = 1.0;
  double c_D = 0.0;
  double mu_AI = 0.0;
  double c_f = 0.0;
  double M_f = 0.0;
  double r = 0.0;
};

/// c_g = (M_D + c_D r) mu(A[I]) + c_f(r), M_g = r M_D mu(A[I]) + M_f(r).
/// The identity tensor counts as M_D = 1, c_D = 0; a constant tensor K as
/// M_D = ||K||_2, c_D = 0.
LipschitzConstants lipschitz_constants(const EvolutionProblem& p);
LipschitzConstants lipschitz_constants(double M_D, double c_D, double mu_AI, double c_f, double M_f,
                                       double r);

struct ExistenceInterval {
  double delta = 0.0;    ///< certified half-width min{r/M_g, 1/c_g}; +inf when g == 0
  double window = 0.0;   ///< safety * delta, the admissible integration half-width
  double safety = 0.9;
  bool unbounded = false;
};

ExistenceInterval delta_existence(const LipschitzConstants& c, double safety = 0.9);
ExistenceInterval delta_existence(const EvolutionProblem& p, double safety = 0.9);

/// (c_g delta)^k / (1 - c_g delta) * M_g delta. Throws NotContractive when
/// c_g delta >= 1.
double picard_error_bound(int k, double c_g, double M_g, double delta);
/// Adds the discretization floor c_u h^nu.
double picard_error_bound(int k, double c_g, double M_g, double delta, double c_u, double h, double nu);

/// Autonomous system x' = rhs(x) with the norm and constants of its certificate.
struct PicardSystem {
  kernels::StateFn rhs;
  GramMatrix gram;
  double r = 1.0;
  LipschitzConstants constants;
};

PicardSystem picard_system(const EvolutionProblem& p);

struct LocalSolution {
  ExistenceInterval delta;
  double dt = 0.0;
  std::vector<double> time_grid;    ///< t_n = t0 + n dt, n = 0..N (N even)
  std::vector<CVec> trajectory;     ///< y_k(t_n)
  std::vector<CVec> integrand;      ///< g(y_k(t_n)), used by the discrete semigroup
  int picard_depth = 0;
  LipschitzConstants constants;
  std::vector<double> sweep_increments;  ///< sup_n ||y_{j+1}(t_n) - y_j(t_n)||, j = 0..k-1
  double max_inf_norm = 0.0;

  [[nodiscard]] std::size_t steps() const { return time_grid.empty() ? 0 : time_grid.size() - 1; }
  [[nodiscard]] double window_length() const {
    return time_grid.empty() ? 0.0 : time_grid.back() - time_grid.front();
  }
};

struct PicardOptions {
  int k = 8;
  double dt = 1e-3;
  double t0 = 0.0;
  double t1 = 0.0;
  bool parallel = true;
};

/// k Picard sweeps y_{j+1}(t_n) = u0 + int_{t0}^{t_n} g(y_j) on the uniform
/// time grid, the integral by piecewise-quadratic (Simpson) panels. Throws
/// WindowExceedsDelta when [t0, t1] leaves the safety window and BallEscape
/// (naming the first offending t_n) when a sweep leaves the nodal ball.
LocalSolution picard_solve(const PicardSystem& sys, const CVec& u0, const ExistenceInterval& delta,
                           const PicardOptions& opt);
LocalSolution picard_solve(const EvolutionProblem& p, const CVec& u0, const PicardOptions& opt,
                           double safety = 0.9);

/// int_{t_from}^{t_to} of sampled values by Simpson half-panels; additive
/// over any split point, exact for quadratics. N must be even.
CVec panel_integral(std::span<const CVec> values, double dt, std::size_t from, std::size_t to);

/// S_n[x] = y_k(t0) + int_{t0}^{t_n} g(y_k(s)) ds.
CVec semigroup_step(const LocalSolution& sol, std::size_t n);
/// S_m o S_n[x] = S_n[x] + int_{t_n}^{t_{n+m}} g(y_k(s)) ds.
CVec semigroup_step_compose(const LocalSolution& sol, std::size_t m, std::size_t n);

/// max_n | ||y_k(t_n)||_M - ||y_k(t_0)||_M | / ||y_k(t_0)||_M
double mass_drift(const LocalSolution& sol, const GramMatrix& mass);

/// e^{tA} by scaling and squaring of the Taylor series. Throws
/// SeriesOverflow when ||tA||_1 exceeds 1e12.
Mat matrix_exponential(const Mat& A, double t);

/// e^{tA} v0 + int_0^t e^{(t-s)A} f(s) ds (Duhamel, composite Simpson with
/// `panels` panels; forcing optional).
Vec semigroup_reference(const Mat& A, const Vec& v0, double t,
                        const std::function<Vec(double)>& forcing = {}, int panels = 64);

struct SemigroupCheck {
  double decay_excess = 0.0;   ///< max_t ||e^{tA}v|| - e^{-m t}||v|| (S1)
  bool s1_ok = true;
  double s2_residual = 0.0;    ///< max ||e^{(s+t)A}v - e^{sA}e^{tA}v|| / ||v||
  bool s2_ok = true;
  double s3_modulus = 0.0;     ///< max ||e^{(t+eps)A}v - e^{tA}v|| / ||v||, eps = 1e-9
  bool s3_ok = true;
};

/// Contractive-semigroup conditions on sampled times in the weighted norm.
SemigroupCheck check_semigroup_conditions(const Mat& A, const GramMatrix& mass, const Vec& v0,
                                          std::span<const double> times, double decay_rate);

}  // namespace fevolve

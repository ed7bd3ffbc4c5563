#include "fevolve/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fevolve/error.hpp"

namespace fevolve {

namespace {
constexpr std::string_view kModule = "evolution";
constexpr double kBallSlack = 1e-12;

double inf_norm(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
}  // namespace

// --- problem ------------------------------------------------------------------

CVec EvolutionProblem::rhs(const CVec& v) const {
  CVec Sv(v.size());
  if (state_dependent()) {
    const Vec re = v.real();
    const SpMat Sx = assemble_stiffness(fo, &re, /*parallel=*/false);
    Sv.real() = Sx * Vec(v.real());
    Sv.imag() = Sx * Vec(v.imag());
  } else {
    Sv.real() = S * Vec(v.real());
    Sv.imag() = S * Vec(v.imag());
  }
  CVec out = -mass.solve(Sv);
  if (f.f) out += v.unaryExpr(f.f);
  return scale * out;
}

Mat EvolutionProblem::generator() const {
  if (state_dependent() || f.f || scale.imag() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, kModule, "generator requires a linear real problem");
  }
  return scale.real() * -coefficient_operator(S, mass, "A").matrix;
}

EvolutionProblem make_evolution_problem(FactoredOperator fo, EvolutionNonlinearity f, double r,
                                        Complex scale, std::string label) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidConstants, kModule, "ball radius must be positive");
  if (std::abs(std::abs(scale) - 1.0) > 1e-14) {
    throw Error(ErrorCode::InvalidArgument, kModule, "scale must be a complex unit");
  }
  if (f.f && (!f.lipschitz || !f.sup_bound)) {
    throw Error(ErrorCode::MissingConstants, kModule, "nonlinearity without c_f / M_f models");
  }
  EvolutionProblem p;
  p.mass = fo.mass();
  if (fo.diffusion().kind() != DiffusionModel::Kind::state_dependent) p.S = assemble_stiffness(fo);
  p.fo = std::move(fo);
  p.f = std::move(f);
  p.r = r;
  p.scale = scale;
  p.label = std::move(label);
  return p;
}

// --- constants ------------------------------------------------------------------

LipschitzConstants lipschitz_constants(double M_D, double c_D, double mu_AI, double c_f, double M_f,
                                       double r) {
  for (double v : {M_D, c_D, mu_AI, c_f, M_f, r}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::MissingConstants, kModule, "constants must be finite and nonnegative");
    }
  }
  LipschitzConstants c;
  c.M_D = M_D;
  c.c_D = c_D;
  c.mu_AI = mu_AI;
  c.c_f = c_f;
  c.M_f = M_f;
  c.r = r;
  c.c_g = (M_D + c_D * r) * mu_AI + c_f;
  c.M_g = r * M_D * mu_AI + M_f;
  return c;
}

LipschitzConstants lipschitz_constants(const EvolutionProblem& p) {
  const auto& D = p.fo.diffusion();
  double c_f = 0.0;
  double M_f = 0.0;
  if (p.f.f) {
    if (!p.f.lipschitz || !p.f.sup_bound) {
      throw Error(ErrorCode::MissingConstants, kModule, "nonlinearity without c_f / M_f models");
    }
    c_f = p.f.lipschitz(p.r);
    M_f = p.f.sup_bound(p.r);
  }
  return lipschitz_constants(D.bound(), D.lipschitz(), p.fo.mu_identity(), c_f, M_f, p.r);
}

ExistenceInterval delta_existence(const LipschitzConstants& c, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, kModule, "safety factor must lie in (0, 1]");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double a = c.M_g > 0.0 ? c.r / c.M_g : inf;
  const double b = c.c_g > 0.0 ? 1.0 / c.c_g : inf;
  ExistenceInterval d;
  d.delta = std::min(a, b);
  d.unbounded = std::isinf(d.delta);
  d.safety = safety;
  d.window = safety * d.delta;
  return d;
}

ExistenceInterval delta_existence(const EvolutionProblem& p, double safety) {
  return delta_existence(lipschitz_constants(p), safety);
}

double picard_error_bound(int k, double c_g, double M_g, double delta) {
  const double q = c_g * delta;
  if (!(q < 1.0)) {
    throw Error(ErrorCode::NotContractive, kModule, "c_g * delta = " + std::to_string(q) + " >= 1");
  }
  if (k < 0) throw Error(ErrorCode::InvalidArgument, kModule, "Picard depth must be >= 0");
  return std::pow(q, k) / (1.0 - q) * M_g * delta;
}

double picard_error_bound(int k, double c_g, double M_g, double delta, double c_u, double h, double nu) {
  return c_u * std::pow(h, nu) + picard_error_bound(k, c_g, M_g, delta);
}

// --- Picard -----------------------------------------------------------------------

PicardSystem picard_system(const EvolutionProblem& p) {
  PicardSystem sys;
  sys.rhs = [&p](const CVec& v) { return p.rhs(v); };
  sys.gram = p.mass;
  sys.r = p.r;
  sys.constants = lipschitz_constants(p);
  return sys;
}

CVec panel_integral(std::span<const CVec> values, double dt, std::size_t from, std::size_t to) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, kModule, "no samples to integrate");
  CVec acc = CVec::Zero(values.front().size());
  if (to <= from) return acc;
  // Half-panel i covers [t_i, t_{i+1}] inside panel [t_{2p}, t_{2p+2}].
  for (std::size_t i = from; i < to; ++i) {
    const std::size_t p0 = i - (i % 2);
    const CVec& f0 = values[p0];
    const CVec& f1 = values[p0 + 1];
    const CVec& f2 = values[p0 + 2];
    if (i % 2 == 0) {
      acc += (dt / 12.0) * (5.0 * f0 + 8.0 * f1 - f2);
    } else {
      acc += (dt / 12.0) * (-f0 + 8.0 * f1 + 5.0 * f2);
    }
  }
  return acc;
}

LocalSolution picard_solve(const PicardSystem& sys, const CVec& u0, const ExistenceInterval& delta,
                           const PicardOptions& opt) {
  if (opt.k < 0) throw Error(ErrorCode::InvalidArgument, kModule, "Picard depth must be >= 0");
  if (!(opt.dt > 0.0) || !(opt.t1 > opt.t0)) {
    throw Error(ErrorCode::InvalidArgument, kModule, "need dt > 0 and t1 > t0");
  }
  const double lim = delta.window;
  if (!delta.unbounded && (std::abs(opt.t0) > lim || std::abs(opt.t1) > lim)) {
    std::ostringstream os;
    os << "window [" << opt.t0 << ", " << opt.t1 << "] not inside [-" << lim << ", " << lim << "]";
    throw Error(ErrorCode::WindowExceedsDelta, kModule, os.str());
  }
  if (u0.size() != sys.gram.size()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "initial state size does not match Gram");
  }
  const double ball = sys.r * (1.0 + kBallSlack);
  if (inf_norm(u0) > ball) throw Error(ErrorCode::BallEscape, kModule, "initial state leaves the ball");

  auto N = static_cast<std::size_t>(std::ceil((opt.t1 - opt.t0) / opt.dt - 1e-9));
  N = std::max<std::size_t>(N + (N % 2), 2);

  LocalSolution sol;
  sol.delta = delta;
  sol.picard_depth = opt.k;
  sol.constants = sys.constants;
  sol.dt = (opt.t1 - opt.t0) / static_cast<double>(N);
  sol.time_grid.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) sol.time_grid[n] = opt.t0 + static_cast<double>(n) * sol.dt;
  sol.time_grid[N] = opt.t1;
  sol.max_inf_norm = inf_norm(u0);

  std::vector<CVec> y(N + 1, u0);
  std::vector<CVec> g(N + 1);
  auto evaluate = [&](const std::vector<CVec>& states) {
    if (opt.parallel) {
      kernels::evaluate_nodes_parallel(sys.rhs, states, g);
    } else {
      kernels::evaluate_nodes_serial(sys.rhs, states, g);
    }
  };

  for (int j = 0; j < opt.k; ++j) {
    evaluate(y);
    std::vector<CVec> next(N + 1);
    next[0] = u0;
    CVec acc = CVec::Zero(u0.size());
    double sup_inc = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      acc += panel_integral(g, sol.dt, n, n + 1);
      next[n + 1] = u0 + acc;
    }
    for (std::size_t n = 0; n <= N; ++n) {
      sup_inc = std::max(sup_inc, discrete_norm(CVec(next[n] - y[n]), sys.gram));
      const double inf = inf_norm(next[n]);
      sol.max_inf_norm = std::max(sol.max_inf_norm, inf);
      if (inf > ball) {
        std::ostringstream os;
        os << "sweep " << j + 1 << " leaves the ball of radius " << sys.r << " at t=" << sol.time_grid[n]
           << " (nodal max " << inf << ")";
        throw Error(ErrorCode::BallEscape, kModule, os.str());
      }
    }
    sol.sweep_increments.push_back(sup_inc);
    y = std::move(next);
  }
  evaluate(y);
  sol.trajectory = std::move(y);
  sol.integrand = std::move(g);
  return sol;
}

LocalSolution picard_solve(const EvolutionProblem& p, const CVec& u0, const PicardOptions& opt,
                           double safety) {
  const PicardSystem sys = picard_system(p);
  return picard_solve(sys, u0, delta_existence(sys.constants, safety), opt);
}

CVec semigroup_step(const LocalSolution& sol, std::size_t n) {
  if (n > sol.steps()) {
    throw Error(ErrorCode::IndexOutOfWindow, kModule, "step index beyond the stored time grid");
  }
  return sol.trajectory.front() + panel_integral(sol.integrand, sol.dt, 0, n);
}

CVec semigroup_step_compose(const LocalSolution& sol, std::size_t m, std::size_t n) {
  if (m + n > sol.steps()) {
    throw Error(ErrorCode::IndexOutOfWindow, kModule, "m + n beyond the stored time grid");
  }
  const CVec inner = semigroup_step(sol, n);
  return inner + panel_integral(sol.integrand, sol.dt, n, n + m);
}

double mass_drift(const LocalSolution& sol, const GramMatrix& mass) {
  if (sol.trajectory.empty()) return 0.0;
  const double n0 = discrete_norm(sol.trajectory.front(), mass);
  double drift = 0.0;
  for (const auto& u : sol.trajectory) drift = std::max(drift, std::abs(discrete_norm(u, mass) - n0));
  return n0 > 0.0 ? drift / n0 : drift;
}

// --- reference semigroup --------------------------------------------------------

Mat matrix_exponential(const Mat& A, double t) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::DimensionMismatch, kModule, "generator must be square");
  const Eigen::Index n = A.rows();
  const Mat X = t * A;
  const double norm1 = n ? X.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
  if (!std::isfinite(norm1) || norm1 > 1e12) {
    throw Error(ErrorCode::SeriesOverflow, kModule, "||tA||_1 too large; split t");
  }
  int s = 0;
  if (norm1 > 0.5) s = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Mat Y = X / std::ldexp(1.0, s);

  Mat sum = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int j = 1; j <= 40; ++j) {
    term = term * Y / static_cast<double>(j);
    sum += term;
    const double tn = term.cwiseAbs().colwise().sum().maxCoeff();
    const double sn = sum.cwiseAbs().colwise().sum().maxCoeff();
    if (tn <= std::numeric_limits<double>::epsilon() * sn) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  if (!sum.allFinite()) throw Error(ErrorCode::SeriesOverflow, kModule, "exponential overflowed");
  return sum;
}

Vec semigroup_reference(const Mat& A, const Vec& v0, double t, const std::function<Vec(double)>& forcing,
                        int panels) {
  Vec u = matrix_exponential(A, t) * v0;
  if (!forcing || t == 0.0) return u;
  if (panels < 2) panels = 2;
  panels += panels % 2;
  const double ds = t / panels;
  const Mat step = matrix_exponential(A, ds);
  // Node j sits at s_j = j ds and is weighted by e^{(t - s_j)A}; walk j from
  // the top so the propagator grows by one factor per node.
  Mat prop = Mat::Identity(A.rows(), A.cols());
  Vec integral = Vec::Zero(v0.size());
  for (int j = panels; j >= 0; --j) {
    const double w = (j == 0 || j == panels) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    integral += w * (prop * forcing(j * ds));
    prop = step * prop;
  }
  return u + (ds / 3.0) * integral;
}

SemigroupCheck check_semigroup_conditions(const Mat& A, const GramMatrix& mass, const Vec& v0,
                                          std::span<const double> times, double decay_rate) {
  SemigroupCheck out;
  const double vn = discrete_norm(v0, mass);
  const double scale = vn > 0.0 ? vn : 1.0;
  constexpr double eps = 1e-9;
  for (double t : times) {
    const Vec et = matrix_exponential(A, t) * v0;
    out.decay_excess = std::max(out.decay_excess, discrete_norm(et, mass) - std::exp(-decay_rate * t) * vn);
    const Vec et2 = matrix_exponential(A, t + eps) * v0;
    out.s3_modulus = std::max(out.s3_modulus, discrete_norm(Vec(et2 - et), mass) / scale);
    for (double s : times) {
      const Vec lhs = matrix_exponential(A, s + t) * v0;
      const Vec rhs = matrix_exponential(A, s) * et;
      out.s2_residual = std::max(out.s2_residual, discrete_norm(Vec(lhs - rhs), mass) / scale);
    }
  }
  out.s1_ok = out.decay_excess <= 1e-8;
  out.s2_ok = out.s2_residual <= 1e-10;
  out.s3_ok = out.s3_modulus <= 1e-6;
  return out;
}

}  // namespace fevolve

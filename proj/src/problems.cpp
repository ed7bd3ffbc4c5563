#include "fevolve/problems.hpp"

#include <cmath>
#include <numbers>

#include "fevolve/error.hpp"
#include "fevolve/gram.hpp"
#include "fevolve/mesh.hpp"

namespace fevolve {

namespace {
constexpr std::string_view kModule = "problems";
constexpr double kPi = std::numbers::pi;

struct Setup {
  Projector proj;
  GramMatrix mass;
  FactoredOperator fo;
};

Setup setup(int dim, double h) {
  std::vector<Interval> bounds(static_cast<std::size_t>(dim), Interval{0.0, 1.0});
  Grid grid = build_tensor_grid(bounds, {h}, BoundaryCondition::dirichlet);
  Projector proj = build_projector(grid, BoundaryCondition::dirichlet);
  GramMatrix mass = assemble_gram(proj);
  FactoredOperator fo = build_difference_factor(proj, mass);
  return {std::move(proj), std::move(mass), std::move(fo)};
}

Vec sine_bump(const Projector& proj, double amplitude) {
  const ScalarField u = [amplitude](const Point& x) { return amplitude * std::sin(kPi * x[0]); };
  return proj.decompose(u);
}
}  // namespace

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = {
      {"semilinear_poisson_2d", "elliptic", "Laplace(u) = 1 + u^2 on (0,1)^2, u = 0 on the boundary", 2,
       1.0 / 32.0, 1.0},
      {"nls_1d", "evolution", "-u_xx + |u|^2 u = i u_t on (0,1), u(0) = u(1) = 0", 1, 1.0 / 16.0, 1.0},
      {"nonlinear_diffusion_1d", "evolution", "u_t = (u^2 u_x)_x on (0,1), u(0) = u(1) = 0", 1, 1.0 / 16.0,
       1.0},
      {"heat_1d", "evolution", "u_t = u_xx on (0,1), u(0) = u(1) = 0", 1, 1.0 / 16.0, 1.0},
  };
  return catalog;
}

const PresetInfo& preset_info(const std::string& name) {
  for (const auto& p : preset_catalog()) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::UnknownPreset, kModule, "no preset named '" + name + "'");
}

PresetConstants recompute_constants(const std::string& name, double h, double r, double K_a, double mu_G,
                                    std::optional<double> m_override) {
  preset_info(name);
  PresetConstants c;
  c.h = h;
  c.r = r;
  c.K_a = K_a;
  c.mu_G = mu_G;
  if (name == "semilinear_poisson_2d") {
    c.m = m_override.value_or(2.0 * kPi * kPi);
    c.c_f = 2.0 * r;
    c.c_f_nodal = 2.0 * r;
    c.M_f = 1.0 + r * r;
  } else if (name == "nls_1d") {
    c.c_f = 3.0 * r * r * mu_G;
    c.c_f_nodal = 3.0 * r * r;
    c.M_f = r * r * r;
  } else if (name == "nonlinear_diffusion_1d") {
    c.M_D = r * r;
    c.c_D = 2.0 * r;
  }
  return c;
}

Complex preset_nonlinearity(const std::string& name, Complex u) {
  preset_info(name);
  if (name == "semilinear_poisson_2d") return -(1.0 + u * u);
  if (name == "nls_1d") return -std::norm(u) * u;
  return 0.0;
}

PresetInstance instantiate(const std::string& name, double h, double r, const PresetOverrides& overrides) {
  const PresetInfo& info = preset_info(name);
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidConstants, kModule, "ball radius must be positive");
  Setup s = setup(info.dim, h);
  const PresetConstants c = recompute_constants(name, h, r, s.fo.inv_estimate(), s.mass.volume(), overrides.m);

  if (info.kind == "elliptic") {
    Nonlinearity f;
    f.f = [](double u) { return -(1.0 + u * u); };
    f.lipschitz = [](double rr) { return 2.0 * rr; };
    f.sup_bound = [](double rr) { return 1.0 + rr * rr; };
    EllipticPreset out{info, c, make_semilinear_problem(s.fo, std::move(f), r, c.m, name),
                       Vec::Zero(static_cast<Eigen::Index>(s.proj.dof_count()))};
    out.problem.m_source = overrides.m ? "override" : "analytic";
    return out;
  }

  EvolutionNonlinearity f;
  Complex scale{1.0, 0.0};
  FactoredOperator fo = s.fo;
  if (name == "nls_1d") {
    const double mu_G = c.mu_G;
    f.f = [](Complex u) { return -std::norm(u) * u; };
    f.lipschitz = [mu_G](double rr) { return 3.0 * rr * rr * mu_G; };
    f.sup_bound = [](double rr) { return rr * rr * rr; };
    scale = Complex{0.0, 1.0};
  } else if (name == "nonlinear_diffusion_1d") {
    fo = fo.with_diffusion(DiffusionModel::state_dependent(
        [](double u) { return Mat::Identity(1, 1) * (u * u); }, c.c_D, c.M_D));
  }
  EvolutionProblem p = make_evolution_problem(std::move(fo), std::move(f), r, scale, name);
  CVec u0 = sine_bump(s.proj, 0.5 * r).cast<Complex>();
  return EvolutionPreset{info, c, std::move(p), std::move(u0)};
}

nlohmann::json presets_json() {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : preset_catalog()) {
    const PresetConstants c = recompute_constants(p.name, p.default_h, p.default_r, 0.0, 1.0);
    nlohmann::json constants = {{"r", c.r}, {"M_D", c.M_D}, {"c_D", c.c_D}};
    if (p.name == "semilinear_poisson_2d") {
      constants["m"] = c.m;
      constants["c_f"] = "2 r";
      constants["M_f"] = "1 + r^2";
    } else if (p.name == "nls_1d") {
      constants["c_f"] = "3 r^2 mu(G)";
      constants["c_f_nodal"] = "3 r^2";
      constants["M_f"] = "r^3";
      constants["scale"] = "i";
    } else if (p.name == "nonlinear_diffusion_1d") {
      constants["M_D"] = "r^2";
      constants["c_D"] = "2 r";
    }
    arr.push_back({{"name", p.name},
                   {"kind", p.kind},
                   {"equation", p.equation},
                   {"dim", p.dim},
                   {"default_h", p.default_h},
                   {"constants", constants}});
  }
  return arr;
}

}  // namespace fevolve

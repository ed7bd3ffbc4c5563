#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fevolve/error.hpp"
#include "fevolve/problems.hpp"
#include "fevolve/spectral.hpp"
#include "helpers.hpp"

using namespace fevolve;
using fevolve::testing::kPi;

namespace {
bool close_ulps(double a, double b, double rel = 4e-16) { return std::abs(a - b) <= rel * std::abs(b); }
}  // namespace

TEST(Presets, CatalogHasFourEntries) {
  EXPECT_EQ(preset_catalog().size(), 4u);
  EXPECT_EQ(presets_json().size(), 4u);
  for (const auto& p : preset_catalog()) EXPECT_EQ(preset_info(p.name).name, p.name);
}

TEST(Presets, UnknownAndNonConforming) {
  try {
    (void)instantiate("vorticity_2d", 0.125, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownPreset);
  }
  try {
    (void)instantiate("heat_1d", 0.3, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConformingSpacing);
  }
}

TEST(Presets, StoredConstantsAreReproducible) {
  for (const auto& info : preset_catalog()) {
    const double h = info.dim == 2 ? 1.0 / 8 : 1.0 / 16;
    const auto inst = instantiate(info.name, h, 0.8);
    const PresetConstants c = std::visit([](const auto& p) { return p.constants; }, inst);
    const PresetConstants d = recompute_constants(info.name, h, 0.8, c.K_a, c.mu_G);
    EXPECT_EQ(c.m, d.m);
    EXPECT_EQ(c.c_f, d.c_f);
    EXPECT_EQ(c.c_f_nodal, d.c_f_nodal);
    EXPECT_EQ(c.M_f, d.M_f);
    EXPECT_EQ(c.M_D, d.M_D);
    EXPECT_EQ(c.c_D, d.c_D);
  }
}

TEST(Presets, PoissonRatioAtUnitRadius) {
  const auto inst = instantiate("semilinear_poisson_2d", 1.0 / 8, 1.0);
  const auto& e = std::get<EllipticPreset>(inst);
  EXPECT_DOUBLE_EQ(e.problem.m, 2.0 * kPi * kPi);
  EXPECT_NEAR(e.problem.c_f() / e.problem.m, 0.10132, 1e-5);
  EXPECT_DOUBLE_EQ(e.problem.M_f(), 2.0);
}

TEST(Presets, DiffusionDeltaMatchesClosedForm) {
  for (double r : {1.0, 0.6}) {
    const double h = 1.0 / 16;
    const auto e = fevolve::testing::evolution_preset("nonlinear_diffusion_1d", h, r);
    const ExistenceInterval d = delta_existence(e.problem);
    const double K_a = e.problem.fo.inv_estimate();
    EXPECT_TRUE(close_ulps(d.delta, h * h / (3 * r * r * K_a))) << d.delta;
  }
}

TEST(Presets, NlsDeltaMatchesClosedForm) {
  const double h = 1.0 / 16;
  const double r = 0.9;
  const auto e = fevolve::testing::evolution_preset("nls_1d", h, r);
  const double K_a = e.problem.fo.inv_estimate();
  const double mu = e.constants.mu_G;
  const double expect = std::min(1.0 / (K_a / (h * h) + 3 * r * r * mu), 1.0 / (K_a / (h * h) + r * r));
  EXPECT_TRUE(close_ulps(delta_existence(e.problem).delta, expect));
  EXPECT_EQ(e.problem.scale, Complex(0.0, 1.0));
}

TEST(Presets, NonlinearityLipschitzHoldsOnRandomPairs) {
  std::mt19937 rng(2024);
  const double r = 1.3;
  std::uniform_real_distribution<double> ur(-r, r);
  std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
  std::uniform_real_distribution<double> rad(0.0, r);
  for (const char* name : {"semilinear_poisson_2d", "nls_1d"}) {
    const PresetConstants c = recompute_constants(name, 0.125, r, 1.0, 1.0);
    const bool complex_values = std::string(name) == "nls_1d";
    for (int i = 0; i < 200; ++i) {
      Complex u;
      Complex v;
      if (complex_values) {
        u = std::polar(rad(rng), ang(rng));
        v = std::polar(rad(rng), ang(rng));
      } else {
        u = ur(rng);
        v = ur(rng);
      }
      const double lhs = std::abs(preset_nonlinearity(name, u) - preset_nonlinearity(name, v));
      EXPECT_LE(lhs, c.c_f_nodal * std::abs(u - v) * (1 + 1e-14)) << name;
    }
  }
  // Diffusion tensor u^2: |u^2 - v^2| <= 2r |u - v| on the ball.
  const PresetConstants c = recompute_constants("nonlinear_diffusion_1d", 0.125, r, 1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double u = ur(rng);
    const double v = ur(rng);
    EXPECT_LE(std::abs(u * u - v * v), c.c_D * std::abs(u - v) * (1 + 1e-14));
    EXPECT_LE(u * u, c.M_D);
  }
}

TEST(Presets, HeatIsDissipativeWithBracketedDecay) {
  const double h = 1.0 / 16;
  const auto e = fevolve::testing::evolution_preset("heat_1d", h, 1.0);
  const Mat A = e.problem.generator();
  const DiscreteOperator op{A, e.problem.mass, e.problem.mass, "generator"};
  EXPECT_TRUE(dissipativity_check(op).dissipative);
  const SpectralReport s = spectral_bracketing(e.problem.S, e.problem.mass, SpectralBracket{kPi * kPi}, h);
  const Vec v0 = e.u0.real();
  for (double t : {0.01, 0.05, 0.1}) {
    const double ratio = discrete_norm(Vec(matrix_exponential(A, t) * v0), e.problem.mass) /
                         discrete_norm(v0, e.problem.mass);
    EXPECT_LE(ratio, std::exp(-s.lambda_min * t) * (1 + 1e-10));
    EXPECT_GE(ratio, std::exp(-s.lambda_max * t));
  }
}

TEST(Presets, InitialDataLiesInsideBall) {
  for (const char* name : {"nls_1d", "nonlinear_diffusion_1d", "heat_1d"}) {
    const auto e = fevolve::testing::evolution_preset(name, 1.0 / 16, 0.7);
    EXPECT_LE(e.u0.cwiseAbs().maxCoeff(), 0.7);
  }
}

TEST(Presets, EvolutionPresetsStayConfinedInWindow) {
  for (const char* name : {"nls_1d", "nonlinear_diffusion_1d", "heat_1d"}) {
    const auto e = fevolve::testing::evolution_preset(name, 1.0 / 16, 1.0);
    PicardOptions opt;
    const ExistenceInterval d = delta_existence(e.problem);
    opt.t1 = d.window;
    opt.dt = d.window / 100;
    const LocalSolution sol = picard_solve(e.problem, e.u0, opt);
    EXPECT_LE(sol.max_inf_norm, 1.0) << name;
  }
}

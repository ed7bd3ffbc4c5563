#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "fevolve/gram.hpp"
#include "fevolve/mesh.hpp"
#include "fevolve/operator_factory.hpp"
#include "fevolve/problems.hpp"

namespace fevolve::testing {

inline constexpr double kPi = std::numbers::pi;

struct Discretization {
  Projector proj;
  GramMatrix mass;
  FactoredOperator fo;
  SpMat S;
};

inline Projector unit_projector(int dim, double h, BoundaryCondition bc = BoundaryCondition::dirichlet) {
  return build_projector(unit_grid(dim, h, bc), bc);
}

inline Discretization discretize(int dim, double h, BoundaryCondition bc = BoundaryCondition::dirichlet) {
  Projector proj = unit_projector(dim, h, bc);
  GramMatrix mass = assemble_gram(proj);
  FactoredOperator fo = build_difference_factor(proj, mass);
  SpMat S = assemble_stiffness(fo);
  return {std::move(proj), std::move(mass), std::move(fo), std::move(S)};
}

/// Smallest eigenvalue of the 1D Dirichlet hat-basis pencil (stiffness, mass)
/// from the discrete sine modes.
inline double lambda_min_1d(double h) {
  const double c = std::cos(kPi * h);
  return 6.0 * (1.0 - c) / (h * h * (2.0 + c));
}

inline double lambda_max_1d(double h) {
  const int n = static_cast<int>(std::lround(1.0 / h));
  const double c = std::cos(kPi * (n - 1) * h);
  return 6.0 * (1.0 - c) / (h * h * (2.0 + c));
}

inline double sine_field(const Point& x, int dim) {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= std::sin(kPi * x[static_cast<std::size_t>(a)]);
  return v;
}

inline EvolutionPreset evolution_preset(const std::string& name, double h, double r) {
  return std::get<EvolutionPreset>(instantiate(name, h, r));
}

inline EllipticPreset elliptic_preset(const std::string& name, double h, double r) {
  return std::get<EllipticPreset>(instantiate(name, h, r));
}

}  // namespace fevolve::testing

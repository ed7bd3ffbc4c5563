#include <gtest/gtest.h>

#include <cmath>

#include "fevolve/error.hpp"
#include "fevolve/mesh.hpp"
#include "helpers.hpp"

using namespace fevolve;
using fevolve::testing::kPi;

TEST(Grid, CountsAndNumbering) {
  const Grid g = build_tensor_grid({{0.0, 1.0}, {0.0, 2.0}}, {0.25, 0.5}, BoundaryCondition::dirichlet);
  EXPECT_EQ(g.dim(), 2);
  EXPECT_EQ(g.counts()[0], 5);
  EXPECT_EQ(g.counts()[1], 5);
  EXPECT_EQ(g.node_count(), 25u);
  EXPECT_EQ(g.cell_count(), 16u);
  EXPECT_EQ(g.interior_count(), 9u);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.125);
  for (std::size_t k = 0; k < g.node_count(); ++k) EXPECT_EQ(g.node_index(g.multi_index(k)), k);
  const Point x = g.coordinate(g.node_index({1, 3, 0}));
  EXPECT_DOUBLE_EQ(x[0], 0.25);
  EXPECT_DOUBLE_EQ(x[1], 1.5);
  EXPECT_DOUBLE_EQ(g.coordinate(g.node_count() - 1)[1], 2.0);
}

TEST(Grid, BoundaryMaskMatchesGeometry) {
  const Grid g = unit_grid(2, 0.25, BoundaryCondition::dirichlet);
  std::size_t boundary = 0;
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const Point x = g.coordinate(k);
    const bool geometric = x[0] == 0.0 || x[0] == 1.0 || x[1] == 0.0 || x[1] == 1.0;
    EXPECT_EQ(g.is_boundary(k), geometric);
    boundary += geometric;
  }
  EXPECT_EQ(boundary, 16u);
}

TEST(Grid, RejectsNonConformingSpacing) {
  try {
    (void)build_tensor_grid({{0.0, 1.0}}, {0.3}, BoundaryCondition::dirichlet);
    FAIL() << "expected NonConformingSpacing";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConformingSpacing);
  }
}

TEST(Grid, RejectsUnsupportedDimension) {
  try {
    (void)unit_grid(4, 0.5, BoundaryCondition::dirichlet);
    FAIL() << "expected DimensionUnsupported";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionUnsupported);
  }
}

TEST(Grid, ThreeDimensionalGridIsSupported) {
  const Grid g = unit_grid(3, 0.5, BoundaryCondition::dirichlet);
  EXPECT_EQ(g.node_count(), 27u);
  EXPECT_EQ(g.interior_count(), 1u);
}

TEST(Grid, LocateFindsCellAndLocalCoordinates) {
  const Grid g = unit_grid(2, 0.25, BoundaryCondition::none);
  std::size_t cell = 0;
  Point local{};
  g.locate({0.3, 0.9, 0.0}, cell, local);
  EXPECT_NEAR(local[0], 0.2, 1e-12);
  EXPECT_NEAR(local[1], 0.6, 1e-12);
  const auto corners = g.cell_nodes(cell);
  EXPECT_DOUBLE_EQ(g.coordinate(corners[0])[0], 0.25);
  EXPECT_DOUBLE_EQ(g.coordinate(corners[0])[1], 0.75);
  EXPECT_DOUBLE_EQ(g.coordinate(corners[3])[0], 0.5);
  EXPECT_DOUBLE_EQ(g.coordinate(corners[3])[1], 1.0);
}

TEST(Projector, DirichletEliminatesBoundaryNodes) {
  const Projector p = fevolve::testing::unit_projector(1, 0.125);
  EXPECT_EQ(p.dof_count(), 7u);
  EXPECT_EQ(p.dof_of_node(0), -1);
  EXPECT_EQ(p.dof_of_node(8), -1);
  EXPECT_EQ(p.dof_of_node(1), 0);
  const Projector q = fevolve::testing::unit_projector(1, 0.125, BoundaryCondition::none);
  EXPECT_EQ(q.dof_count(), 9u);
}

TEST(Projector, DecomposeExpandIsIdempotent) {
  const Projector p = fevolve::testing::unit_projector(2, 0.125);
  const ScalarField u = [](const Point& x) { return std::sin(kPi * x[0]) * x[1] * (1.0 - x[1]) + x[0] * x[1]; };
  const Vec c = p.decompose(u);
  const Vec c2 = p.decompose(p.expand(c));
  EXPECT_EQ((c - c2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Projector, ReproducesMultilinearFieldsInside) {
  const Projector p = fevolve::testing::unit_projector(2, 0.25, BoundaryCondition::none);
  const ScalarField u = [](const Point& x) { return 1.0 + 2.0 * x[0] - x[1] + 3.0 * x[0] * x[1]; };
  const Vec c = p.decompose(u);
  for (double x : {0.1, 0.37, 0.9}) {
    for (double y : {0.05, 0.5, 0.77}) EXPECT_NEAR(p.evaluate(c, {x, y, 0.0}), u({x, y, 0.0}), 1e-13);
  }
}

TEST(Projector, BasisIsPartitionOfUnityWithoutBoundaryConditions) {
  const Projector p = fevolve::testing::unit_projector(2, 0.25, BoundaryCondition::none);
  for (const Point& x : {Point{0.13, 0.71, 0.0}, Point{0.5, 0.5, 0.0}, Point{0.99, 0.01, 0.0}}) {
    double s = 0.0;
    for (std::size_t d = 0; d < p.dof_count(); ++d) s += p.basis_value(d, x);
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
}

TEST(Projector, ComplexDecomposeSplitsIntoParts) {
  const Projector p = fevolve::testing::unit_projector(1, 0.25);
  const ComplexField u = [](const Point& x) { return Complex{x[0], -2.0 * x[0]}; };
  const CVec c = p.decompose(u);
  ASSERT_EQ(c.size(), 3);
  EXPECT_EQ(c[1], Complex(0.5, -1.0));
  EXPECT_EQ(p.evaluate(c, {0.375, 0.0, 0.0}), Complex(0.375, -0.75));
}

TEST(Quadrature, GaussRulesIntegratePolynomialsExactly) {
  for (int n = 1; n <= 5; ++n) {
    const QuadratureRule q = gauss_rule(1, n);
    double w = 0.0;
    for (double wi : q.weights) w += wi;
    EXPECT_NEAR(w, 1.0, 1e-15);
    const int deg = 2 * n - 1;
    double s = 0.0;
    for (std::size_t i = 0; i < q.points.size(); ++i) s += q.weights[i] * std::pow(q.points[i][0], deg);
    EXPECT_NEAR(s, 1.0 / (deg + 1), 1e-14) << n;
  }
  const QuadratureRule q2 = gauss_rule(2, 2);
  EXPECT_EQ(q2.points.size(), 4u);
  double s = 0.0;
  for (std::size_t i = 0; i < q2.points.size(); ++i) s += q2.weights[i] * q2.points[i][0] * q2.points[i][0] * q2.points[i][1];
  EXPECT_NEAR(s, 1.0 / 6.0, 1e-15);
}

TEST(Quadrature, ShapeGradientsMatchFiniteDifferences) {
  const Point x{0.3, 0.6, 0.2};
  for (int dim = 1; dim <= 3; ++dim) {
    for (int corner = 0; corner < (1 << dim); ++corner) {
      const Point g = shape_gradient(dim, corner, x);
      for (int a = 0; a < dim; ++a) {
        Point xp = x;
        Point xm = x;
        xp[static_cast<std::size_t>(a)] += 1e-6;
        xm[static_cast<std::size_t>(a)] -= 1e-6;
        const double fd = (shape_value(dim, corner, xp) - shape_value(dim, corner, xm)) / 2e-6;
        EXPECT_NEAR(g[static_cast<std::size_t>(a)], fd, 1e-9);
      }
    }
  }
}

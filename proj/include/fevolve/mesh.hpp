#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fevolve/types.hpp"

namespace fevolve {

enum class BoundaryCondition { dirichlet, none };

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  [[nodiscard]] double length() const { return hi - lo; }
};

using MultiIndex = std::array<int, 3>;

/// Tensor-product node set over a box. Nodes are numbered with axis 0
/// running fastest: k = i0 + n0 * (i1 + n1 * i2).
class Grid {
 public:
  Grid() = default;

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] std::span<const Interval> bounds() const { return bounds_; }
  [[nodiscard]] std::span<const double> spacing() const { return h_; }
  /// Nodes per axis.
  [[nodiscard]] std::span<const int> counts() const { return counts_; }
  [[nodiscard]] BoundaryCondition bc() const { return bc_; }

  [[nodiscard]] std::size_t node_count() const { return node_count_; }
  [[nodiscard]] std::size_t cell_count() const;
  [[nodiscard]] std::size_t interior_count() const;

  /// Smallest spacing over all axes.
  [[nodiscard]] double min_spacing() const;
  /// Measure of one grid cell.
  [[nodiscard]] double cell_volume() const;

  [[nodiscard]] MultiIndex multi_index(std::size_t node) const;
  [[nodiscard]] std::size_t node_index(const MultiIndex& idx) const;
  [[nodiscard]] Point coordinate(std::size_t node) const;
  [[nodiscard]] std::vector<Point> nodes() const;

  [[nodiscard]] bool is_boundary(std::size_t node) const { return boundary_mask_[node] != 0; }
  [[nodiscard]] const std::vector<std::uint8_t>& boundary_mask() const { return boundary_mask_; }
  [[nodiscard]] std::vector<std::uint8_t> interior_mask() const;

  /// Lower-corner multi-index of cell `c` (cells numbered like nodes, axis 0 fastest).
  [[nodiscard]] MultiIndex cell_origin(std::size_t cell) const;
  /// The 2^dim corner nodes of a cell; corner bit a set means +1 along axis a.
  [[nodiscard]] std::vector<std::size_t> cell_nodes(std::size_t cell) const;

  /// Locates the cell containing `x` and the local coordinates in [0,1]^dim.
  /// Points outside the box are clamped to it.
  void locate(const Point& x, std::size_t& cell, Point& local) const;

  friend Grid build_tensor_grid(std::vector<Interval> bounds, std::vector<double> h,
                                BoundaryCondition bc);

 private:
  int dim_ = 0;
  std::vector<Interval> bounds_;
  std::vector<double> h_;
  std::vector<int> counts_;
  BoundaryCondition bc_ = BoundaryCondition::dirichlet;
  std::size_t node_count_ = 0;
  std::vector<std::uint8_t> boundary_mask_;
};

/// Builds a uniform tensor grid. Each axis length must be an integer
/// multiple of its spacing (1e-12 relative); dim must be 1..3.
Grid build_tensor_grid(std::vector<Interval> bounds, std::vector<double> h,
                       BoundaryCondition bc);

/// Unit box [0,1]^dim with the same spacing on every axis.
Grid unit_grid(int dim, double h, BoundaryCondition bc);

enum class BasisKind { piecewise_multilinear_hat };

/// Nodal projector onto continuous piecewise-multilinear hats.
///
/// The decomposition factor samples a field at the dof nodes and the
/// expansion factor interpolates multilinearly, so decompose(expand(c)) == c.
/// With Dirichlet conditions boundary nodes are eliminated and carry zero.
class Projector {
 public:
  Projector() = default;
  Projector(Grid grid, BoundaryCondition bc);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] BoundaryCondition bc() const { return bc_; }
  [[nodiscard]] BasisKind basis_kind() const { return BasisKind::piecewise_multilinear_hat; }
  [[nodiscard]] int projection_order() const { return 2; }

  [[nodiscard]] std::size_t dof_count() const { return dof_nodes_.size(); }
  [[nodiscard]] std::span<const std::size_t> dof_nodes() const { return dof_nodes_; }
  /// Dof index of a node, or -1 when the node is eliminated.
  [[nodiscard]] std::ptrdiff_t dof_of_node(std::size_t node) const { return node_dof_[node]; }

  [[nodiscard]] Vec decompose(const ScalarField& u) const;
  [[nodiscard]] CVec decompose(const ComplexField& u) const;

  /// Value of the expanded field at x.
  [[nodiscard]] double evaluate(const Vec& coeffs, const Point& x) const;
  [[nodiscard]] Complex evaluate(const CVec& coeffs, const Point& x) const;
  [[nodiscard]] ScalarField expand(Vec coeffs) const;

  [[nodiscard]] double basis_value(std::size_t dof, const Point& x) const;

  /// Lifts dof coefficients to all grid nodes (eliminated nodes get zero).
  [[nodiscard]] Vec to_nodes(const Vec& coeffs) const;

 private:
  template <class V>
  typename V::Scalar evaluate_impl(const V& coeffs, const Point& x) const;

  Grid grid_;
  BoundaryCondition bc_ = BoundaryCondition::dirichlet;
  std::vector<std::size_t> dof_nodes_;
  std::vector<std::ptrdiff_t> node_dof_;
};

Projector build_projector(const Grid& grid, BoundaryCondition bc);

/// Tensor Gauss-Legendre rule on the reference cell [0,1]^dim; weights sum to 1.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
};

QuadratureRule gauss_rule(int dim, int points_per_axis);

/// Multilinear shape function of corner `corner` at local coordinates.
double shape_value(int dim, int corner, const Point& local);
/// Gradient in reference coordinates (divide by h per axis for physical).
Point shape_gradient(int dim, int corner, const Point& local);

}  // namespace fevolve

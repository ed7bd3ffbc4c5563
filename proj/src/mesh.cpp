#include "fevolve/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fevolve/error.hpp"

namespace fevolve {

namespace {
constexpr std::string_view kModule = "mesh_basis";
}

std::size_t Grid::cell_count() const {
  std::size_t n = 1;
  for (int c : counts_) n *= static_cast<std::size_t>(c - 1);
  return n;
}

std::size_t Grid::interior_count() const {
  return static_cast<std::size_t>(std::count(boundary_mask_.begin(), boundary_mask_.end(), 0));
}

double Grid::min_spacing() const { return *std::min_element(h_.begin(), h_.end()); }

double Grid::cell_volume() const {
  double v = 1.0;
  for (double h : h_) v *= h;
  return v;
}

MultiIndex Grid::multi_index(std::size_t node) const {
  MultiIndex idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = static_cast<int>(node % static_cast<std::size_t>(counts_[a]));
    node /= static_cast<std::size_t>(counts_[a]);
  }
  return idx;
}

std::size_t Grid::node_index(const MultiIndex& idx) const {
  std::size_t k = 0;
  for (int a = dim_ - 1; a >= 0; --a) k = k * static_cast<std::size_t>(counts_[a]) + idx[a];
  return k;
}

Point Grid::coordinate(std::size_t node) const {
  const MultiIndex idx = multi_index(node);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    // Snap the last node onto the upper bound so faces are exact.
    x[a] = idx[a] == counts_[a] - 1 ? bounds_[a].hi : bounds_[a].lo + idx[a] * h_[a];
  }
  return x;
}

std::vector<Point> Grid::nodes() const {
  std::vector<Point> out(node_count_);
  for (std::size_t k = 0; k < node_count_; ++k) out[k] = coordinate(k);
  return out;
}

std::vector<std::uint8_t> Grid::interior_mask() const {
  std::vector<std::uint8_t> m(boundary_mask_.size());
  std::transform(boundary_mask_.begin(), boundary_mask_.end(), m.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(b == 0); });
  return m;
}

MultiIndex Grid::cell_origin(std::size_t cell) const {
  MultiIndex idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    const auto cells = static_cast<std::size_t>(counts_[a] - 1);
    idx[a] = static_cast<int>(cell % cells);
    cell /= cells;
  }
  return idx;
}

std::vector<std::size_t> Grid::cell_nodes(std::size_t cell) const {
  const MultiIndex origin = cell_origin(cell);
  const int corners = 1 << dim_;
  std::vector<std::size_t> out(static_cast<std::size_t>(corners));
  for (int c = 0; c < corners; ++c) {
    MultiIndex idx = origin;
    for (int a = 0; a < dim_; ++a) idx[a] += (c >> a) & 1;
    out[static_cast<std::size_t>(c)] = node_index(idx);
  }
  return out;
}

void Grid::locate(const Point& x, std::size_t& cell, Point& local) const {
  MultiIndex origin{0, 0, 0};
  local = Point{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    const int cells = counts_[a] - 1;
    const double s = (std::clamp(x[a], bounds_[a].lo, bounds_[a].hi) - bounds_[a].lo) / h_[a];
    int i = static_cast<int>(std::floor(s));
    i = std::clamp(i, 0, cells - 1);
    origin[a] = i;
    local[a] = std::clamp(s - i, 0.0, 1.0);
  }
  std::size_t c = 0;
  for (int a = dim_ - 1; a >= 0; --a) c = c * static_cast<std::size_t>(counts_[a] - 1) + origin[a];
  cell = c;
}

Grid build_tensor_grid(std::vector<Interval> bounds, std::vector<double> h, BoundaryCondition bc) {
  const int dim = static_cast<int>(bounds.size());
  if (dim < 1 || dim > 3) {
    throw Error(ErrorCode::DimensionUnsupported, kModule,
                "grid dimension " + std::to_string(dim) + " outside 1..3");
  }
  if (h.size() == 1 && dim > 1) h.assign(static_cast<std::size_t>(dim), h.front());
  if (static_cast<int>(h.size()) != dim) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "spacing count does not match dimension");
  }

  Grid g;
  g.dim_ = dim;
  g.bc_ = bc;
  g.counts_.resize(static_cast<std::size_t>(dim));
  g.node_count_ = 1;
  for (int a = 0; a < dim; ++a) {
    const double len = bounds[a].length();
    if (!(h[a] > 0.0) || !(len > 0.0)) {
      throw Error(ErrorCode::NonConformingSpacing, kModule, "spacing and axis length must be positive");
    }
    const double ratio = len / h[a];
    const double cells = std::round(ratio);
    if (cells < 1.0 || std::abs(ratio - cells) > 1e-12 * std::max(1.0, ratio)) {
      std::ostringstream os;
      os << "axis " << a << " length " << len << " is not a multiple of h=" << h[a];
      throw Error(ErrorCode::NonConformingSpacing, kModule, os.str());
    }
    g.counts_[a] = static_cast<int>(cells) + 1;
    g.node_count_ *= static_cast<std::size_t>(g.counts_[a]);
  }
  g.bounds_ = std::move(bounds);
  g.h_ = std::move(h);

  g.boundary_mask_.assign(g.node_count_, 0);
  for (std::size_t k = 0; k < g.node_count_; ++k) {
    const MultiIndex idx = g.multi_index(k);
    for (int a = 0; a < dim; ++a) {
      if (idx[a] == 0 || idx[a] == g.counts_[a] - 1) {
        g.boundary_mask_[k] = 1;
        break;
      }
    }
  }
  return g;
}

Grid unit_grid(int dim, double h, BoundaryCondition bc) {
  if (dim < 1 || dim > 3) {
    throw Error(ErrorCode::DimensionUnsupported, kModule,
                "grid dimension " + std::to_string(dim) + " outside 1..3");
  }
  return build_tensor_grid(std::vector<Interval>(static_cast<std::size_t>(dim), Interval{0.0, 1.0}),
                           std::vector<double>(static_cast<std::size_t>(dim), h), bc);
}

// --- shape functions -------------------------------------------------------

double shape_value(int dim, int corner, const Point& local) {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= ((corner >> a) & 1) ? local[a] : 1.0 - local[a];
  return v;
}

Point shape_gradient(int dim, int corner, const Point& local) {
  Point g{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    double d = ((corner >> a) & 1) ? 1.0 : -1.0;
    for (int b = 0; b < dim; ++b) {
      if (b != a) d *= ((corner >> b) & 1) ? local[b] : 1.0 - local[b];
    }
    g[a] = d;
  }
  return g;
}

QuadratureRule gauss_rule(int dim, int points_per_axis) {
  // Gauss-Legendre nodes/weights on [-1,1].
  std::vector<double> x;
  std::vector<double> w;
  switch (points_per_axis) {
    case 1: x = {0.0}; w = {2.0}; break;
    case 2: {
      const double p = 1.0 / std::sqrt(3.0);
      x = {-p, p};
      w = {1.0, 1.0};
      break;
    }
    case 3: {
      const double p = std::sqrt(3.0 / 5.0);
      x = {-p, 0.0, p};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      x = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    case 5: {
      const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      x = {-b, -a, 0.0, a, b};
      w = {wb, wa, 128.0 / 225.0, wa, wb};
      break;
    }
    default:
      throw Error(ErrorCode::InvalidArgument, kModule, "gauss rule supports 1..5 points per axis");
  }

  QuadratureRule rule;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= x.size();
  rule.points.resize(total);
  rule.weights.resize(total);
  for (std::size_t q = 0; q < total; ++q) {
    std::size_t rem = q;
    Point p{0.0, 0.0, 0.0};
    double wt = 1.0;
    for (int a = 0; a < dim; ++a) {
      const std::size_t i = rem % x.size();
      rem /= x.size();
      p[a] = 0.5 * (x[i] + 1.0);
      wt *= 0.5 * w[i];
    }
    rule.points[q] = p;
    rule.weights[q] = wt;
  }
  return rule;
}

// --- Projector ---------------------------------------------------------------

Projector::Projector(Grid grid, BoundaryCondition bc) : grid_(std::move(grid)), bc_(bc) {
  node_dof_.assign(grid_.node_count(), -1);
  for (std::size_t k = 0; k < grid_.node_count(); ++k) {
    if (bc_ == BoundaryCondition::dirichlet && grid_.is_boundary(k)) continue;
    node_dof_[k] = static_cast<std::ptrdiff_t>(dof_nodes_.size());
    dof_nodes_.push_back(k);
  }
}

Projector build_projector(const Grid& grid, BoundaryCondition bc) { return Projector(grid, bc); }

Vec Projector::decompose(const ScalarField& u) const {
  Vec c(static_cast<Eigen::Index>(dof_count()));
  for (std::size_t i = 0; i < dof_nodes_.size(); ++i) {
    c[static_cast<Eigen::Index>(i)] = u(grid_.coordinate(dof_nodes_[i]));
  }
  return c;
}

CVec Projector::decompose(const ComplexField& u) const {
  CVec c(static_cast<Eigen::Index>(dof_count()));
  for (std::size_t i = 0; i < dof_nodes_.size(); ++i) {
    c[static_cast<Eigen::Index>(i)] = u(grid_.coordinate(dof_nodes_[i]));
  }
  return c;
}

template <class V>
typename V::Scalar Projector::evaluate_impl(const V& coeffs, const Point& x) const {
  std::size_t cell = 0;
  Point local{};
  grid_.locate(x, cell, local);
  const auto corners = grid_.cell_nodes(cell);
  typename V::Scalar value{0.0};
  for (std::size_t c = 0; c < corners.size(); ++c) {
    const auto dof = node_dof_[corners[c]];
    if (dof < 0) continue;
    value += coeffs[dof] * shape_value(grid_.dim(), static_cast<int>(c), local);
  }
  return value;
}

double Projector::evaluate(const Vec& coeffs, const Point& x) const {
  return evaluate_impl(coeffs, x);
}

Complex Projector::evaluate(const CVec& coeffs, const Point& x) const {
  return evaluate_impl(coeffs, x);
}

ScalarField Projector::expand(Vec coeffs) const {
  return [self = *this, c = std::move(coeffs)](const Point& x) { return self.evaluate(c, x); };
}

double Projector::basis_value(std::size_t dof, const Point& x) const {
  Vec e = Vec::Zero(static_cast<Eigen::Index>(dof_count()));
  e[static_cast<Eigen::Index>(dof)] = 1.0;
  return evaluate(e, x);
}

Vec Projector::to_nodes(const Vec& coeffs) const {
  Vec out = Vec::Zero(static_cast<Eigen::Index>(grid_.node_count()));
  for (std::size_t i = 0; i < dof_nodes_.size(); ++i) {
    out[static_cast<Eigen::Index>(dof_nodes_[i])] = coeffs[static_cast<Eigen::Index>(i)];
  }
  return out;
}

}  // namespace fevolve

#include "fevolve/gram.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "fevolve/error.hpp"
#include "fevolve/linalg.hpp"

namespace fevolve {

namespace {
constexpr std::string_view kModule = "mesh_basis";
constexpr Eigen::Index kDenseLimit = 600;
using Chol = Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>>;
}  // namespace

struct GramMatrix::Impl {
  SpMat M;
  SpMat L;
  SpMat Lt;
  Chol chol;
  std::string id;
  double kappa = 1.0;
  double volume = 0.0;
  double symmetry = 0.0;
};

GramMatrix GramMatrix::from_matrix(SpMat M, std::string id) {
  auto impl = std::make_shared<Impl>();
  M.makeCompressed();
  impl->symmetry = fevolve::symmetry_residual(M);
  impl->chol.compute(M);
  if (impl->chol.info() != Eigen::Success) {
    throw Error(ErrorCode::FactorizationFailed, kModule,
                "inner-product matrix '" + id + "' has a nonpositive pivot");
  }
  impl->L = impl->chol.matrixL();
  impl->Lt = impl->L.transpose();
  for (Eigen::Index i = 0; i < impl->L.rows(); ++i) {
    if (!(impl->L.coeff(i, i) > 0.0)) {
      throw Error(ErrorCode::FactorizationFailed, kModule, "factor diagonal not positive");
    }
  }

  const Eigen::Index n = M.rows();
  if (n <= kDenseLimit) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(M), Eigen::EigenvaluesOnly);
    impl->kappa = es.eigenvalues()[n - 1] / es.eigenvalues()[0];
  } else {
    const auto top = lanczos_max_eigenvalue([&](const Vec& x) -> Vec { return M * x; }, n);
    const auto inv = lanczos_max_eigenvalue(
        [&](const Vec& x) -> Vec { return impl->chol.solve(x); }, n);
    impl->kappa = top.value * inv.value;
  }

  const Vec ones = Vec::Ones(n);
  impl->volume = (impl->Lt * ones).norm();
  impl->M = std::move(M);
  impl->id = std::move(id);

  GramMatrix g;
  g.impl_ = std::move(impl);
  return g;
}

GramMatrix GramMatrix::identity(Eigen::Index n) {
  SpMat I(n, n);
  I.setIdentity();
  return from_matrix(std::move(I), "identity");
}

Eigen::Index GramMatrix::size() const { return impl_ ? impl_->M.rows() : 0; }
const SpMat& GramMatrix::matrix() const { return impl_->M; }
const SpMat& GramMatrix::factor() const { return impl_->L; }
const std::string& GramMatrix::id() const { return impl_->id; }
double GramMatrix::kappa() const { return impl_->kappa; }
double GramMatrix::volume() const { return impl_->volume; }
double GramMatrix::symmetry_residual() const { return impl_->symmetry; }

Vec GramMatrix::apply_root(const Vec& x) const { return impl_->Lt * x; }

CVec GramMatrix::apply_root(const CVec& x) const {
  CVec out(x.size());
  out.real() = impl_->Lt * x.real();
  out.imag() = impl_->Lt * x.imag();
  return out;
}

Vec GramMatrix::apply_root_inverse(const Vec& z) const {
  return impl_->Lt.triangularView<Eigen::Upper>().solve(z);
}

Vec GramMatrix::apply_root_inverse_transpose(const Vec& x) const {
  return impl_->L.triangularView<Eigen::Lower>().solve(x);
}

Vec GramMatrix::solve(const Vec& b) const { return impl_->chol.solve(b); }

CVec GramMatrix::solve(const CVec& b) const {
  CVec out(b.size());
  out.real() = impl_->chol.solve(Vec(b.real()));
  out.imag() = impl_->chol.solve(Vec(b.imag()));
  return out;
}

Mat GramMatrix::dense_root() const { return Mat(impl_->Lt); }

GramMatrix assemble_gram(const Projector& proj) {
  const Grid& grid = proj.grid();
  const int dim = grid.dim();
  const int corners = 1 << dim;
  const QuadratureRule rule = gauss_rule(dim, 2);
  const double vol = grid.cell_volume();

  // Reference element mass matrix; identical on every cell of a uniform grid.
  Mat local = Mat::Zero(corners, corners);
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    for (int i = 0; i < corners; ++i) {
      for (int j = 0; j < corners; ++j) {
        local(i, j) += rule.weights[q] * vol * shape_value(dim, i, rule.points[q]) *
                       shape_value(dim, j, rule.points[q]);
      }
    }
  }

  std::vector<Triplet> triplets;
  triplets.reserve(grid.cell_count() * static_cast<std::size_t>(corners * corners));
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const auto nodes = grid.cell_nodes(c);
    for (int i = 0; i < corners; ++i) {
      const auto di = proj.dof_of_node(nodes[static_cast<std::size_t>(i)]);
      if (di < 0) continue;
      for (int j = 0; j < corners; ++j) {
        const auto dj = proj.dof_of_node(nodes[static_cast<std::size_t>(j)]);
        if (dj < 0) continue;
        triplets.emplace_back(static_cast<int>(di), static_cast<int>(dj), local(i, j));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(proj.dof_count());
  SpMat M(n, n);
  M.setFromTriplets(triplets.begin(), triplets.end());
  return GramMatrix::from_matrix(std::move(M), "mass");
}

double discrete_inner(const Vec& x, const Vec& y, const GramMatrix& g) {
  if (x.size() != g.size() || y.size() != g.size()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "coefficient vector size does not match Gram");
  }
  return g.apply_root(y).dot(g.apply_root(x));
}

Complex discrete_inner(const CVec& x, const CVec& y, const GramMatrix& g) {
  if (x.size() != g.size() || y.size() != g.size()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "coefficient vector size does not match Gram");
  }
  // y^* M x
  return g.apply_root(y).dot(g.apply_root(x));
}

double discrete_norm(const Vec& x, const GramMatrix& g) {
  if (x.size() != g.size()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "coefficient vector size does not match Gram");
  }
  return g.apply_root(x).norm();
}

double discrete_norm(const CVec& x, const GramMatrix& g) {
  if (x.size() != g.size()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "coefficient vector size does not match Gram");
  }
  return g.apply_root(x).norm();
}

double interpolation_error_l2(const Projector& proj, const ScalarField& u) {
  const Grid& grid = proj.grid();
  const int dim = grid.dim();
  const QuadratureRule rule = gauss_rule(dim, 5);
  const double vol = grid.cell_volume();
  const Vec nodal = [&] {
    Vec c = proj.decompose(u);
    return proj.to_nodes(c);
  }();
  const int corners = 1 << dim;

  double sum = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const auto nodes = grid.cell_nodes(c);
    const MultiIndex origin = grid.cell_origin(c);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point& loc = rule.points[q];
      Point x{0.0, 0.0, 0.0};
      for (int a = 0; a < dim; ++a) x[a] = grid.bounds()[a].lo + (origin[a] + loc[a]) * grid.spacing()[a];
      double interp = 0.0;
      for (int k = 0; k < corners; ++k) {
        interp += nodal[static_cast<Eigen::Index>(nodes[static_cast<std::size_t>(k)])] *
                  shape_value(dim, k, loc);
      }
      const double diff = u(x) - interp;
      sum += rule.weights[q] * vol * diff * diff;
    }
  }
  return std::sqrt(sum);
}

double projection_order_estimate(std::span<const Projector> family, const ScalarField& u) {
  if (family.size() < 3) {
    throw Error(ErrorCode::InsufficientSamples, kModule, "projection order needs at least 3 grids");
  }
  std::vector<double> hs;
  std::vector<double> errs;
  for (const auto& p : family) {
    hs.push_back(p.grid().min_spacing());
    errs.push_back(interpolation_error_l2(p, u));
  }
  return fit_log_slope(hs, errs);
}

}  // namespace fevolve

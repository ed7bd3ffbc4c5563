#include "fevolve/operator_factory.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "fevolve/error.hpp"
#include "fevolve/kernels.hpp"
#include "fevolve/linalg.hpp"

namespace fevolve {

namespace {
constexpr std::string_view kModule = "operator_factory";
constexpr Eigen::Index kDenseLimit = 600;

void require_spd(const Mat& T, std::string_view what) {
  Eigen::SelfAdjointEigenSolver<Mat> es(T, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorCode::NonSPDTensor, kModule, std::string(what) + " has a nonpositive eigenvalue");
  }
}

double largest_generalized_eigenvalue(const SpMat& S, const GramMatrix& mass) {
  const Eigen::Index n = S.rows();
  if (n == 0) return 0.0;
  if (n <= kDenseLimit) return generalized_extremal_dense(Mat(S), Mat(mass.matrix())).lambda_max;
  auto apply = [&](const Vec& x) -> Vec {
    return mass.apply_root_inverse_transpose(S * mass.apply_root_inverse(x));
  };
  return lanczos_max_eigenvalue(apply, n).value;
}

SpMat block_diagonal(std::span<const Mat> blocks, int dim) {
  const auto n = static_cast<Eigen::Index>(blocks.size()) * dim;
  std::vector<Triplet> t;
  t.reserve(blocks.size() * static_cast<std::size_t>(dim * dim));
  for (std::size_t q = 0; q < blocks.size(); ++q) {
    const int base = static_cast<int>(q) * dim;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) t.emplace_back(base + i, base + j, blocks[q](i, j));
    }
  }
  SpMat D(n, n);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}
}  // namespace

// --- DiffusionModel -------------------------------------------------------------

DiffusionModel DiffusionModel::identity() { return DiffusionModel{}; }

DiffusionModel DiffusionModel::constant(Mat K) {
  if (K.rows() != K.cols() || K.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "constant tensor must be square");
  }
  require_spd(K, "constant diffusion tensor");
  if (symmetry_residual(K) > 1e-12) {
    throw Error(ErrorCode::NonSPDTensor, kModule, "constant diffusion tensor is not symmetric");
  }
  DiffusionModel d;
  d.kind_ = Kind::constant_spd;
  Eigen::SelfAdjointEigenSolver<Mat> es(K, Eigen::EigenvaluesOnly);
  d.bound_ = es.eigenvalues().maxCoeff();
  d.K_ = std::move(K);
  return d;
}

DiffusionModel DiffusionModel::state_dependent(TensorFn tensor, double lipschitz, double bound) {
  if (!tensor) throw Error(ErrorCode::MissingConstants, kModule, "state-dependent tensor callback is empty");
  if (!std::isfinite(lipschitz) || !std::isfinite(bound) || lipschitz < 0.0 || bound < 0.0) {
    throw Error(ErrorCode::MissingConstants, kModule, "state-dependent tensor needs finite c_D and M_D");
  }
  DiffusionModel d;
  d.kind_ = Kind::state_dependent;
  d.tensor_ = std::move(tensor);
  d.lipschitz_ = lipschitz;
  d.bound_ = bound;
  return d;
}

std::string DiffusionModel::name() const {
  switch (kind_) {
    case Kind::identity: return "identity";
    case Kind::constant_spd: return "constant_spd";
    case Kind::state_dependent: return "state_dependent";
  }
  return "unknown";
}

Mat DiffusionModel::tensor(double value, int dim) const {
  switch (kind_) {
    case Kind::identity: return Mat::Identity(dim, dim);
    case Kind::constant_spd: return K_;
    case Kind::state_dependent: return tensor_(value);
  }
  return Mat::Identity(dim, dim);
}

// --- FactoredOperator ------------------------------------------------------------

FactoredOperator FactoredOperator::with_diffusion(DiffusionModel D) const {
  if (D.kind() == DiffusionModel::Kind::constant_spd && D.constant_tensor().rows() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "constant tensor size does not match grid dimension");
  }
  FactoredOperator out = *this;
  out.D_ = std::move(D);
  return out;
}

FactoredOperator build_difference_factor(const Projector& proj, const GramMatrix& mass) {
  const Grid& grid = proj.grid();
  const int dim = grid.dim();
  if (mass.size() != static_cast<Eigen::Index>(proj.dof_count())) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "mass Gram does not match projector dofs");
  }
  const QuadratureRule rule = gauss_rule(dim, dim == 1 ? 1 : 2);
  const std::size_t nq = rule.points.size();
  const std::size_t samples = grid.cell_count() * nq;
  const int corners = 1 << dim;
  const double vol = grid.cell_volume();

  std::vector<Triplet> ta;
  std::vector<Triplet> tb;
  ta.reserve(samples * static_cast<std::size_t>(dim * corners));
  tb.reserve(samples * static_cast<std::size_t>(corners));
  Vec w(static_cast<Eigen::Index>(samples));

  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const auto nodes = grid.cell_nodes(c);
    for (std::size_t q = 0; q < nq; ++q) {
      const std::size_t s = c * nq + q;
      w[static_cast<Eigen::Index>(s)] = rule.weights[q] * vol;
      for (int k = 0; k < corners; ++k) {
        const auto dof = proj.dof_of_node(nodes[static_cast<std::size_t>(k)]);
        if (dof < 0) continue;
        const Point g = shape_gradient(dim, k, rule.points[q]);
        for (int a = 0; a < dim; ++a) {
          ta.emplace_back(static_cast<int>(s) * dim + a, static_cast<int>(dof), g[a] / grid.spacing()[a]);
        }
        tb.emplace_back(static_cast<int>(s), static_cast<int>(dof), shape_value(dim, k, rule.points[q]));
      }
    }
  }

  const auto ndofs = static_cast<Eigen::Index>(proj.dof_count());
  FactoredOperator fo;
  fo.proj_ = proj;
  fo.mass_ = mass;
  fo.a_.resize(static_cast<Eigen::Index>(samples) * dim, ndofs);
  fo.a_.setFromTriplets(ta.begin(), ta.end());
  fo.b_.resize(static_cast<Eigen::Index>(samples), ndofs);
  fo.b_.setFromTriplets(tb.begin(), tb.end());
  fo.w_ = std::move(w);
  fo.h_ = grid.min_spacing();
  fo.mu_ai_ = largest_generalized_eigenvalue(assemble_stiffness(fo), mass);
  return fo;
}

SpMat assemble_stiffness(const FactoredOperator& fo, const Vec* state, bool parallel) {
  const int dim = fo.dim();
  const SpMat& a = fo.gradient_factor();
  const Vec& w = fo.weights();
  const auto& D = fo.diffusion();

  if (D.kind() == DiffusionModel::Kind::identity) {
    Vec wd(w.size() * dim);
    for (Eigen::Index s = 0; s < w.size(); ++s) wd.segment(s * dim, dim).setConstant(w[s]);
    return SpMat(a.transpose() * wd.asDiagonal() * a);
  }

  std::vector<Mat> blocks(static_cast<std::size_t>(w.size()));
  if (D.kind() == DiffusionModel::Kind::constant_spd) {
    for (Eigen::Index s = 0; s < w.size(); ++s) blocks[static_cast<std::size_t>(s)] = w[s] * D.constant_tensor();
  } else {
    if (state == nullptr) {
      throw Error(ErrorCode::InvalidArgument, kModule, "state-dependent tensor requires a state vector");
    }
    if (state->size() != a.cols()) {
      throw Error(ErrorCode::DimensionMismatch, kModule, "state vector size does not match dofs");
    }
    const Vec samples = fo.value_factor() * (*state);
    std::vector<Mat> tensors(blocks.size());
    const std::vector<double> ones(blocks.size(), 1.0);
    auto tensor = [&](double v) { return D.tensor(v, dim); };
    std::span<const double> sv(samples.data(), static_cast<std::size_t>(samples.size()));
    if (parallel) {
      kernels::weighted_tensors_parallel(sv, ones, tensor, tensors);
    } else {
      kernels::weighted_tensors_serial(sv, ones, tensor, tensors);
    }
    for (std::size_t s = 0; s < tensors.size(); ++s) {
      if (tensors[s].rows() != dim || tensors[s].cols() != dim) {
        throw Error(ErrorCode::DimensionMismatch, kModule, "tensor callback returned wrong shape");
      }
      require_spd(tensors[s], "sampled diffusion tensor at sample " + std::to_string(s));
      blocks[s] = w[static_cast<Eigen::Index>(s)] * tensors[s];
    }
  }
  const SpMat Dw = block_diagonal(blocks, dim);
  return SpMat(a.transpose() * Dw * a);
}

DiscreteOperator assemble_operator(const FactoredOperator& fo, const std::optional<Vec>& state) {
  const SpMat S = assemble_stiffness(fo, state ? &*state : nullptr);
  return DiscreteOperator{Mat(S), fo.mass(), fo.mass(), "stiffness"};
}

DiscreteOperator coefficient_operator(const SpMat& S, const GramMatrix& mass, std::string label) {
  if (S.rows() != mass.size() || S.cols() != mass.size()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "stiffness does not match mass size");
  }
  Mat A(S.rows(), S.cols());
  const Mat Sd(S);
  for (Eigen::Index j = 0; j < S.cols(); ++j) A.col(j) = mass.solve(Vec(Sd.col(j)));
  return DiscreteOperator{std::move(A), mass, mass, std::move(label)};
}

DiscreteOperator particular_representation(const FieldAction& action, const Projector& projX,
                                           const GramMatrix& gramX, const Projector& projY,
                                           const GramMatrix& gramY, std::string label) {
  const auto nx = static_cast<Eigen::Index>(projX.dof_count());
  const auto ny = static_cast<Eigen::Index>(projY.dof_count());
  Mat B(ny, nx);
  for (Eigen::Index j = 0; j < nx; ++j) {
    Vec e = Vec::Zero(nx);
    e[j] = 1.0;
    try {
      B.col(j) = projY.decompose(action(projX.expand(std::move(e))));
    } catch (const std::exception& ex) {
      throw Error(ErrorCode::ActionFailure, kModule,
                  "column " + std::to_string(j) + ": " + ex.what());
    }
  }
  return DiscreteOperator{std::move(B), gramX, gramY, std::move(label)};
}

NormEstimate operator_norm(const DiscreteOperator& B, double rel_tol, int max_iter) {
  const Eigen::Index n = B.cols();
  NormEstimate out;
  if (n == 0 || B.rows() == 0) {
    out.converged = true;
    return out;
  }
  auto X = [&](const Vec& x) { return B.codomain.apply_root(Vec(B.matrix * B.domain.apply_root_inverse(x))); };
  // X^T y = L_X^{-1} B^T L_Y y
  auto XtY = [&](const Vec& y) {
    return B.domain.apply_root_inverse_transpose(B.matrix.transpose() * (B.codomain.factor() * y));
  };

  Vec x = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
  double prev = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vec y = X(x);
    const double sigma2 = y.squaredNorm();
    out.value = std::sqrt(sigma2);
    out.iterations = it;
    const Vec z = XtY(y);
    const double zn = z.norm();
    if (zn == 0.0) {
      out.converged = true;
      return out;
    }
    x = z / zn;
    if (prev >= 0.0 && std::abs(sigma2 - prev) <= rel_tol * sigma2) {
      out.converged = true;
      return out;
    }
    prev = sigma2;
  }
  return out;
}

double gershgorin_bound(const DiscreteOperator& B) {
  if (B.rows() != B.cols() || B.domain.size() != B.cols() || B.codomain.size() != B.rows()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "Gershgorin bound needs a square operator");
  }
  const Mat Ry = B.codomain.dense_root();
  const Mat Rx = B.domain.dense_root();
  // X = R_Y B R_X^{-1}
  const Mat BRinv = Rx.transpose().triangularView<Eigen::Lower>().solve(B.matrix.transpose()).transpose();
  const Mat X = Ry * BRinv;
  return X.cwiseAbs().rowwise().sum().maxCoeff();
}

double sesquilinear_eval(const DiscreteOperator& B, const Vec& x, const Vec& y) {
  if (x.size() != B.cols() || y.size() != B.rows()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "sesquilinear arguments do not match operator");
  }
  return discrete_inner(Vec(B.matrix * x), y, B.codomain);
}

Complex sesquilinear_eval(const DiscreteOperator& B, const CVec& x, const CVec& y) {
  if (x.size() != B.cols() || y.size() != B.rows()) {
    throw Error(ErrorCode::DimensionMismatch, kModule, "sesquilinear arguments do not match operator");
  }
  return discrete_inner(CVec(B.matrix.cast<Complex>() * x), y, B.codomain);
}

double approximation_order_estimate(std::span<const RepresentationSample> family,
                                    const ScalarField& reference_field, const ScalarField& u) {
  if (family.size() < 3) {
    throw Error(ErrorCode::InsufficientSamples, kModule, "approximation order needs at least 3 members");
  }
  std::vector<double> hs;
  std::vector<double> errs;
  for (const auto& member : family) {
    const Vec x = member.projector.decompose(u);
    const Vec lhs = member.representation.matrix * x;
    const Vec rhs = member.projector.decompose(reference_field);
    hs.push_back(member.projector.grid().min_spacing());
    errs.push_back(discrete_norm(Vec(lhs - rhs), member.representation.codomain));
  }
  return fit_log_slope(hs, errs);
}

}  // namespace fevolve

#include "fevolve/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fevolve/error.hpp"

namespace fevolve::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return {buf, end};
}

nlohmann::json grid_json(const Grid& g) {
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& iv : g.bounds()) bounds.push_back({iv.lo, iv.hi});
  const auto h = g.spacing();
  return {{"dim", g.dim()},
          {"bounds", bounds},
          {"h", std::vector<double>(h.begin(), h.end())},
          {"bc", g.bc() == BoundaryCondition::dirichlet ? "dirichlet" : "none"}};
}

nlohmann::json projector_json(const Projector& p) {
  nlohmann::json j = grid_json(p.grid());
  j["bc"] = p.bc() == BoundaryCondition::dirichlet ? "dirichlet" : "none";
  j["dof_count"] = p.dof_count();
  return j;
}

nlohmann::json gram_json(const GramMatrix& g) {
  return {{"id", g.id()}, {"size", g.size()}, {"kappa", g.kappa()}, {"symmetry_residual", g.symmetry_residual()}};
}

nlohmann::json operator_header_json(const DiscreteOperator& B) {
  return {{"rows", B.rows()},
          {"cols", B.cols()},
          {"label", B.label},
          {"gram_ids", {B.domain.id(), B.codomain.id()}}};
}

void write_triplets(std::ostream& os, const SpMat& A) {
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
    }
  }
}

std::string solution_csv(const Projector& proj, const Vec& u) {
  if (static_cast<std::size_t>(u.size()) != proj.dof_count()) {
    throw Error(ErrorCode::DimensionMismatch, "io", "solution size does not match the projector");
  }
  const Grid& g = proj.grid();
  std::ostringstream os;
  for (int a = 0; a < g.dim(); ++a) os << 'x' << a << ',';
  os << "value\n";
  const auto nodes = proj.dof_nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Point x = g.coordinate(nodes[i]);
    for (int a = 0; a < g.dim(); ++a) os << format_double(x[static_cast<std::size_t>(a)]) << ',';
    os << format_double(u[static_cast<Eigen::Index>(i)]) << '\n';
  }
  return os.str();
}

std::string trajectory_csv(const Projector& proj, const LocalSolution& sol, bool complex_values) {
  std::ostringstream os;
  os << 't';
  for (std::size_t node : proj.dof_nodes()) {
    if (complex_values) {
      os << ",re_" << node << ",im_" << node;
    } else {
      os << ",u_" << node;
    }
  }
  os << '\n';
  for (std::size_t n = 0; n < sol.trajectory.size(); ++n) {
    os << format_double(sol.time_grid[n]);
    for (const Complex& v : sol.trajectory[n]) {
      os << ',' << format_double(v.real());
      if (complex_values) os << ',' << format_double(v.imag());
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json elliptic_summary_json(double h, const SemilinearSolution& sol, double apriori_bound_at_k) {
  return {{"h", h},
          {"dofs", sol.u.size()},
          {"iterations", sol.report.iterations},
          {"K", sol.certificate.K},
          {"residual", sol.certificate.residual},
          {"apriori_bound_at_k", apriori_bound_at_k},
          {"u_norm_inf", sol.u.size() ? sol.u.cwiseAbs().maxCoeff() : 0.0}};
}

nlohmann::json evolution_summary_json(const LocalSolution& sol, double bound_at_k, double mass_drift) {
  return {{"delta", sol.delta.unbounded ? nlohmann::json("inf") : nlohmann::json(sol.delta.delta)},
          {"k", sol.picard_depth},
          {"c_g", sol.constants.c_g},
          {"M_g", sol.constants.M_g},
          {"bound_at_k", bound_at_k},
          {"mass_drift", mass_drift}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "io", "cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error(ErrorCode::InvalidArgument, "io", "write to " + path.string() + " failed");
}

}  // namespace fevolve::io

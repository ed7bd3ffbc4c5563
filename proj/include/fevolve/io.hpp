#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "fevolve/elliptic.hpp"
#include "fevolve/evolution.hpp"
#include "fevolve/gram.hpp"
#include "fevolve/mesh.hpp"
#include "fevolve/operator_factory.hpp"

namespace fevolve::io {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

nlohmann::json grid_json(const Grid& g);
/// {dim, bounds, h, bc, dof_count}
nlohmann::json projector_json(const Projector& p);
nlohmann::json gram_json(const GramMatrix& g);
/// {rows, cols, label, gram_ids}
nlohmann::json operator_header_json(const DiscreteOperator& B);

/// One "row col value" line per stored entry, 0-based.
void write_triplets(std::ostream& os, const SpMat& A);

/// Header x0[,x1,...],value; one row per dof node.
std::string solution_csv(const Projector& proj, const Vec& u);
/// Header t,u_<node>... (re_/im_ pairs when `complex_values`).
std::string trajectory_csv(const Projector& proj, const LocalSolution& sol, bool complex_values);

nlohmann::json elliptic_summary_json(double h, const SemilinearSolution& sol, double apriori_bound_at_k);
nlohmann::json evolution_summary_json(const LocalSolution& sol, double bound_at_k, double mass_drift);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace fevolve::io

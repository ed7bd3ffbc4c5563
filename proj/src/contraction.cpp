#include "fevolve/contraction.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace fevolve {

double contraction_error_bound(double K, int m, double first_increment) {
  if (!(K >= 0.0 && K < 1.0)) {
    throw Error(ErrorCode::InvalidRatio, "contraction", "ratio K=" + std::to_string(K) + " outside [0, 1)");
  }
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "contraction", "iteration index must be >= 0");
  // std::pow(0, 0) == 1 keeps the m = 0 case equal to first_increment / (1 - K).
  return std::pow(K, m) / (1.0 - K) * first_increment;
}

std::string contraction_report_json(const ContractionReport& rep) {
  nlohmann::json j;
  j["K"] = rep.K;
  j["K_supplied"] = rep.K_supplied;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["final_residual"] = rep.final_residual;
  j["max_ratio"] = rep.max_ratio;
  j["increment_norms"] = rep.increment_norms;
  j["apriori_bounds"] = rep.apriori_bounds;
  j["bounds_dominate"] = rep.bounds_dominate();
  return j.dump(2);
}

std::string contraction_report_csv(const ContractionReport& rep) {
  std::ostringstream os;
  os << std::setprecision(17) << "iter,increment,apriori_bound\n";
  for (std::size_t k = 0; k < rep.increment_norms.size(); ++k) {
    const double bound = k < rep.apriori_bounds.size() ? rep.apriori_bounds[k] : 0.0;
    os << k << ',' << rep.increment_norms[k] << ',' << bound << '\n';
  }
  return os.str();
}

}  // namespace fevolve

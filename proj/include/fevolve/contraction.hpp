#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fevolve/error.hpp"

namespace fevolve {

/// a-priori estimate ||x* - x_m|| <= K^m (1-K)^{-1} ||x_1 - x_0||.
/// Throws InvalidRatio unless 0 <= K < 1.
double contraction_error_bound(double K, int m, double first_increment);

struct ContractionOptions {
  /// Analytic contraction ratio. When absent the ratio is estimated from
  /// observed increments and the a-priori bounds carry no guarantee.
  std::optional<double> K_hint;
  double tol = 1e-10;
  int max_iter = 1000;
};

struct ContractionReport {
  double K = 0.0;
  bool K_supplied = false;
  int iterations = 0;
  std::vector<double> increment_norms;   ///< ||x_{k+1} - x_k||, k = 0..iterations-1
  std::vector<double> apriori_bounds;    ///< K^m (1-K)^{-1} ||x_1 - x_0||, m = 0..iterations
  std::vector<double> distance_to_final; ///< ||x_final - x_m||, m = 0..iterations
  bool converged = false;
  double final_residual = 0.0;           ///< last increment norm
  double max_ratio = 0.0;                ///< largest observed increment ratio

  /// apriori_bounds[m] + slack >= distance_to_final[m] for every m.
  [[nodiscard]] bool bounds_dominate(double slack = 1e-12) const {
    for (std::size_t m = 0; m < distance_to_final.size() && m < apriori_bounds.size(); ++m) {
      if (distance_to_final[m] > apriori_bounds[m] + slack) return false;
    }
    return true;
  }
};

template <class V>
struct FixedPointResult {
  V x;
  ContractionReport report;
};

namespace detail {
inline constexpr double kDivergenceRatio = 1.0 + 1e-6;
inline constexpr int kDivergenceRun = 3;
}  // namespace detail

/// Successive approximation x_{k+1} = T(x_k).
///
/// Stops when ||x_{k+1} - x_k|| <= tol * max(1, ||x_k||) or at max_iter.
/// Throws DivergenceDetected after three consecutive increment ratios above
/// 1 + 1e-6. `observe`, when set, is called with every new iterate and its
/// index and may throw to halt the iteration.
template <class V, class Map, class Norm>
FixedPointResult<V> fixed_point_iterate(Map&& T, V x0, Norm&& norm, const ContractionOptions& opt,
                                        const std::function<void(const V&, int)>& observe = {}) {
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "contraction", "tol must be positive");
  if (opt.K_hint && !(*opt.K_hint >= 0.0 && *opt.K_hint < 1.0)) {
    throw Error(ErrorCode::InvalidRatio, "contraction", "K_hint must lie in [0, 1)");
  }

  FixedPointResult<V> out;
  auto& rep = out.report;
  std::vector<V> iterates;
  iterates.push_back(x0);
  V x = std::move(x0);
  int run_above = 0;

  for (int k = 0; k < opt.max_iter; ++k) {
    V next = T(x);
    const double inc = norm(next - x);
    rep.increment_norms.push_back(inc);
    rep.iterations = k + 1;
    if (observe) observe(next, k + 1);

    if (k > 0) {
      const double prev = rep.increment_norms[static_cast<std::size_t>(k - 1)];
      if (prev > 0.0) {
        const double ratio = inc / prev;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        run_above = ratio > detail::kDivergenceRatio ? run_above + 1 : 0;
        if (run_above >= detail::kDivergenceRun) {
          throw Error(ErrorCode::DivergenceDetected, "contraction",
                      "increment ratio above 1 for 3 consecutive iterations (last " +
                          std::to_string(ratio) + ")");
        }
      }
    }

    const double scale = std::max(1.0, static_cast<double>(norm(x)));
    iterates.push_back(next);
    x = std::move(next);
    if (inc <= opt.tol * scale) {
      rep.converged = true;
      break;
    }
  }

  rep.final_residual = rep.increment_norms.empty() ? 0.0 : rep.increment_norms.back();
  rep.K_supplied = opt.K_hint.has_value();
  rep.K = opt.K_hint ? *opt.K_hint : rep.max_ratio;

  const double d0 = rep.increment_norms.empty() ? 0.0 : rep.increment_norms.front();
  for (std::size_t m = 0; m < iterates.size(); ++m) {
    rep.apriori_bounds.push_back(rep.K < 1.0 ? contraction_error_bound(rep.K, static_cast<int>(m), d0)
                                             : std::numeric_limits<double>::infinity());
    rep.distance_to_final.push_back(norm(x - iterates[m]));
  }
  out.x = std::move(x);
  return out;
}

/// JSON document for a report.
std::string contraction_report_json(const ContractionReport& rep);
/// CSV rows: iter,increment,apriori_bound
std::string contraction_report_csv(const ContractionReport& rep);

}  // namespace fevolve

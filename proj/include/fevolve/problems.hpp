#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fevolve/elliptic.hpp"
#include "fevolve/evolution.hpp"

namespace fevolve {

struct PresetInfo {
  std::string name;
  std::string kind;      ///< "elliptic" or "evolution"
  std::string equation;  ///< the continuous problem in plain text
  int dim = 1;
  double default_h = 1.0 / 16.0;
  double default_r = 1.0;
};

/// Constants a preset carries. `c_f` is the one the certificate uses (weighted
/// norm); `c_f_nodal` is the pointwise bound on the ball.
struct PresetConstants {
  double h = 0.0;
  double r = 0.0;
  double m = 0.0;
  double c_f = 0.0;
  double c_f_nodal = 0.0;
  double M_f = 0.0;
  double M_D = 1.0;
  double c_D = 0.0;
  double K_a = 0.0;   ///< h^2 mu(A[I]), measured
  double mu_G = 0.0;  ///< ||1|| in the discrete norm
};

struct PresetOverrides {
  std::optional<double> m;       ///< coercivity override (elliptic presets)
  std::optional<double> safety;  ///< unused by constructors, carried for callers
};

struct EllipticPreset {
  PresetInfo info;
  PresetConstants constants;
  SemilinearProblem problem;
  Vec u0;
};

struct EvolutionPreset {
  PresetInfo info;
  PresetConstants constants;
  EvolutionProblem problem;
  CVec u0;
};

using PresetInstance = std::variant<EllipticPreset, EvolutionPreset>;

const std::vector<PresetInfo>& preset_catalog();
const PresetInfo& preset_info(const std::string& name);

/// Builds the named preset on its default domain. Throws UnknownPreset or
/// NonConformingSpacing.
PresetInstance instantiate(const std::string& name, double h, double r, const PresetOverrides& overrides = {});

/// Re-derives the analytic constants from h, r and the measured K_a, mu_G.
PresetConstants recompute_constants(const std::string& name, double h, double r, double K_a, double mu_G,
                                    std::optional<double> m_override = {});

/// Pointwise nonlinearity of a preset (identity for linear presets is f = 0).
Complex preset_nonlinearity(const std::string& name, Complex u);

nlohmann::json presets_json();

}  // namespace fevolve

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fevolve::cli {

struct RunConfig {
  std::string command;
  std::string preset;           ///< empty: the command's default preset
  std::vector<double> h;        ///< empty: the preset's default spacing
  std::optional<double> r;      ///< empty: the preset's default radius
  int k = 8;
  std::optional<double> dt;     ///< empty: window / 200
  std::optional<double> t1;     ///< empty: half the safety window
  double tol = 1e-12;
  std::string out_dir = ".";
  std::uint64_t seed = 7;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& c);
/// Throws ConfigParse on unknown keys or mistyped values.
RunConfig config_from_json(const nlohmann::json& j);

enum ExitCode : int { kOk = 0, kError = 1, kCertificateFailed = 2 };

struct RunResult {
  int exit_code = kOk;
  std::vector<std::string> files;  ///< relative to out_dir
  nlohmann::json summary;
};

/// Runs one command and writes its artifacts. Module errors propagate.
RunResult run(const RunConfig& config);

/// argv front end: parses flags (overriding --config keys), runs, reports.
int main(int argc, char** argv);

}  // namespace fevolve::cli

#include "fevolve/cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "fevolve/error.hpp"
#include "fevolve/io.hpp"
#include "fevolve/kernels.hpp"
#include "fevolve/linalg.hpp"
#include "fevolve/problems.hpp"
#include "fevolve/spectral.hpp"

namespace fevolve::cli {

namespace {
constexpr std::string_view kModule = "cli";
constexpr double kPi = std::numbers::pi;

using nlohmann::json;

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"solve-elliptic", "solve-evolution", "spectral-study",
                                             "convergence-study", "list-presets"};
  return c;
}

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ConfigParse, kModule, what); }

double parse_number(const std::string& tok) {
  try {
    const auto slash = tok.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(tok, &used);
      if (used != tok.size()) parse_error("bad number '" + tok + "'");
      return v;
    }
    const std::string a = tok.substr(0, slash);
    const std::string b = tok.substr(slash + 1);
    std::size_t ua = 0;
    std::size_t ub = 0;
    const double num = std::stod(a, &ua);
    const double den = std::stod(b, &ub);
    if (ua != a.size() || ub != b.size() || den == 0.0) parse_error("bad fraction '" + tok + "'");
    return num / den;
  } catch (const std::invalid_argument&) {
    parse_error("bad number '" + tok + "'");
  } catch (const std::out_of_range&) {
    parse_error("number out of range '" + tok + "'");
  }
}

std::vector<double> parse_h_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    if (tok.empty()) continue;
    out.push_back(parse_number(tok));
  }
  if (out.empty()) parse_error("empty h list");
  return out;
}

std::string default_preset(const std::string& command) {
  if (command == "solve-elliptic" || command == "convergence-study") return "semilinear_poisson_2d";
  return "heat_1d";
}

/// Runs fn over every h concurrently; results come back in the order of `hs`.
template <class R, class F>
std::vector<R> sweep(const std::vector<double>& hs, F&& fn) {
  const auto n = static_cast<std::ptrdiff_t>(hs.size());
  std::vector<std::optional<R>> slots(hs.size());
  std::vector<std::exception_ptr> errors(hs.size());
#pragma omp parallel for schedule(dynamic) num_threads(kernels::thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    try {
      slots[u].emplace(fn(hs[u]));
    } catch (...) {
      errors[u] = std::current_exception();
    }
  }
  std::vector<R> out;
  out.reserve(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

std::string artifact_name(const std::string& command, const std::string& preset, const std::string& tag,
                          const std::string& ext) {
  return command + "_" + preset + "_" + tag + ext;
}

struct Context {
  const RunConfig& cfg;
  std::string preset;
  PresetInfo info;
  double r = 1.0;
  std::vector<double> hs;  ///< decreasing
  RunResult result;

  void emit(const std::string& name, const std::string& text) {
    io::write_text(std::filesystem::path(cfg.out_dir) / name, text);
    result.files.push_back(name);
  }
};

// --- solve-elliptic -----------------------------------------------------------

struct EllipticRow {
  double h;
  Projector proj;
  SemilinearSolution sol;
  double bound;
};

EllipticRow solve_elliptic_at(const Context& ctx, double h) {
  auto inst = instantiate(ctx.preset, h, ctx.r);
  auto* e = std::get_if<EllipticPreset>(&inst);
  if (!e) throw Error(ErrorCode::InvalidArgument, kModule, ctx.preset + " is not an elliptic preset");
  SemilinearSolution sol = semilinear_solve(e->problem, e->u0, ctx.cfg.tol);
  const double norm_Ah = e->problem.fo.mu_identity();
  const double bound = elliptic_apriori_bound(e->problem, sol.report.iterations, h, norm_Ah, 0.0);
  return {h, e->problem.fo.projector(), std::move(sol), bound};
}

void run_solve_elliptic(Context& ctx) {
  auto rows = sweep<EllipticRow>(ctx.hs, [&](double h) { return solve_elliptic_at(ctx, h); });
  json results = json::array();
  bool ok = true;
  for (const auto& row : rows) {
    const bool row_ok = row.sol.report.converged && row.sol.certificate.confined &&
                        row.sol.report.bounds_dominate(1e-12);
    ok = ok && row_ok;
    json j = io::elliptic_summary_json(row.h, row.sol, row.bound);
    j["converged"] = row.sol.report.converged;
    j["bounds_dominate"] = row.sol.report.bounds_dominate(1e-12);
    j["m"] = row.sol.certificate.m;
    j["m_source"] = row.sol.certificate.m_source;
    j["c_f"] = row.sol.certificate.c_f;
    j["max_increment_ratio"] = row.sol.report.max_ratio;
    j["certificate_ok"] = row_ok;
    results.push_back(j);
    ctx.emit(artifact_name(ctx.cfg.command, ctx.preset, io::format_double(row.h), ".csv"),
             io::solution_csv(row.proj, row.sol.u));
  }
  ctx.result.summary["results"] = results;
  ctx.result.summary["ok"] = ok;
  if (!ok) ctx.result.exit_code = kCertificateFailed;
}

// --- solve-evolution ----------------------------------------------------------

struct EvolutionRow {
  double h;
  Projector proj;
  LocalSolution sol;
  double bound;
  double drift;
  bool increments_ok;
  bool complex_values;
};

EvolutionRow solve_evolution_at(const Context& ctx, double h) {
  auto inst = instantiate(ctx.preset, h, ctx.r);
  auto* e = std::get_if<EvolutionPreset>(&inst);
  if (!e) throw Error(ErrorCode::InvalidArgument, kModule, ctx.preset + " is not an evolution preset");
  const PicardSystem sys = picard_system(e->problem);
  const ExistenceInterval d = delta_existence(sys.constants);
  const double t1 = ctx.cfg.t1.value_or(d.unbounded ? 1.0 : 0.5 * d.window);
  PicardOptions opt;
  opt.k = ctx.cfg.k;
  opt.t1 = t1;
  opt.dt = ctx.cfg.dt.value_or(t1 / 200.0);
  LocalSolution sol = picard_solve(sys, e->u0, d, opt);

  const auto& c = sol.constants;
  const double bound = picard_error_bound(opt.k, c.c_g, c.M_g, t1);
  // Successive Picard increments shrink at least geometrically from M_g t.
  bool inc_ok = true;
  for (std::size_t j = 0; j < sol.sweep_increments.size(); ++j) {
    const double cap = c.M_g * t1 * std::pow(c.c_g * t1, static_cast<double>(j));
    inc_ok = inc_ok && sol.sweep_increments[j] <= cap * (1.0 + 1e-9) + 1e-14;
  }
  const double drift = mass_drift(sol, e->problem.mass);
  return {h, e->problem.fo.projector(), std::move(sol), bound, drift, inc_ok, e->problem.scale.imag() != 0.0};
}

void run_solve_evolution(Context& ctx) {
  auto rows = sweep<EvolutionRow>(ctx.hs, [&](double h) { return solve_evolution_at(ctx, h); });
  json results = json::array();
  bool ok = true;
  for (const auto& row : rows) {
    const bool conservative = ctx.preset == "nls_1d";
    const bool row_ok = row.increments_ok && (!conservative || row.drift <= 1e-6);
    ok = ok && row_ok;
    json j = io::evolution_summary_json(row.sol, row.bound, row.drift);
    j["h"] = row.h;
    j["window"] = {row.sol.time_grid.front(), row.sol.time_grid.back()};
    j["dt"] = row.sol.dt;
    j["max_inf_norm"] = row.sol.max_inf_norm;
    j["increments_within_bound"] = row.increments_ok;
    j["certificate_ok"] = row_ok;
    results.push_back(j);
    ctx.emit(artifact_name(ctx.cfg.command, ctx.preset, io::format_double(row.h), ".csv"),
             io::trajectory_csv(row.proj, row.sol, row.complex_values));
  }
  ctx.result.summary["results"] = results;
  ctx.result.summary["ok"] = ok;
  if (!ok) ctx.result.exit_code = kCertificateFailed;
}

// --- spectral-study -----------------------------------------------------------

SpectralReport spectral_at(const Context& ctx, double h) {
  std::vector<Interval> bounds(static_cast<std::size_t>(ctx.info.dim), Interval{0.0, 1.0});
  const Grid grid = build_tensor_grid(bounds, {h}, BoundaryCondition::dirichlet);
  const Projector proj = build_projector(grid, BoundaryCondition::dirichlet);
  const GramMatrix mass = assemble_gram(proj);
  const FactoredOperator fo = build_difference_factor(proj, mass);
  const SpMat S = assemble_stiffness(fo);
  return spectral_bracketing(S, mass, SpectralBracket{ctx.info.dim * kPi * kPi}, h);
}

void run_spectral_study(Context& ctx) {
  auto rows = sweep<SpectralReport>(ctx.hs, [&](double h) { return spectral_at(ctx, h); });
  bool ok = true;
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ok = ok && rows[i].bracketing_ok && rows[i].stability_ok;
    if (i > 0) monotone = monotone && rows[i].lambda_min <= rows[i - 1].lambda_min * (1.0 + 1e-10);
  }
  ok = ok && monotone;
  json j = {{"lambda_min_nonincreasing", monotone}, {"lower_bracket", ctx.info.dim * kPi * kPi}};
  if (rows.size() >= 2) {
    const auto& a = rows[rows.size() - 2];
    const auto& b = rows.back();
    j["extrapolated_lambda_min"] = richardson_limit(a.h, a.lambda_min, b.h, b.lambda_min, 2.0);
    j["extrapolated_norm_inverse"] = richardson_limit(a.h, a.norm_Ainv, b.h, b.norm_Ainv, 2.0);
  }
  json table = json::array();
  for (const auto& r : rows) {
    table.push_back({{"h", r.h},
                     {"lambda_min", r.lambda_min},
                     {"lambda_max", r.lambda_max},
                     {"bracketing_ok", r.bracketing_ok},
                     {"stable", r.stability_ok}});
  }
  j["rows"] = table;
  {
    // Dissipativity of the generator -M^{-1} S on the coarsest grid.
    std::vector<Interval> bounds(static_cast<std::size_t>(ctx.info.dim), Interval{0.0, 1.0});
    const Grid grid = build_tensor_grid(bounds, {ctx.hs.front()}, BoundaryCondition::dirichlet);
    const Projector proj = build_projector(grid, BoundaryCondition::dirichlet);
    const GramMatrix mass = assemble_gram(proj);
    const SpMat S = assemble_stiffness(build_difference_factor(proj, mass));
    DiscreteOperator A = coefficient_operator(S, mass, "generator");
    A.matrix = -A.matrix;
    const DissipativityResult d = dissipativity_check(A, 64, ctx.cfg.seed);
    j["dissipative"] = d.dissipative;
    j["max_re"] = d.max_re;
    ok = ok && d.dissipative;
  }
  ctx.result.summary["results"] = j;
  ctx.result.summary["ok"] = ok;
  const std::string tag = rows.size() == 1 ? io::format_double(rows[0].h) : "sweep";
  ctx.emit(artifact_name(ctx.cfg.command, ctx.preset, tag, ".csv"), spectral_csv(rows));
  if (!ok) ctx.result.exit_code = kCertificateFailed;
}

// --- convergence-study --------------------------------------------------------

struct ConvergenceRow {
  double h;
  Projector proj;
  double projection_error;
  std::optional<Vec> u;
};

double smooth_field(const Point& x, int dim) {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= std::sin(kPi * x[static_cast<std::size_t>(a)]);
  return v;
}

void run_convergence_study(Context& ctx) {
  if (ctx.hs.size() < 3) {
    throw Error(ErrorCode::InsufficientSamples, kModule, "convergence-study needs at least three spacings");
  }
  const bool elliptic = ctx.info.kind == "elliptic";
  const int dim = ctx.info.dim;
  auto rows = sweep<ConvergenceRow>(ctx.hs, [&](double h) {
    std::vector<Interval> bounds(static_cast<std::size_t>(dim), Interval{0.0, 1.0});
    const Grid grid = build_tensor_grid(bounds, {h}, BoundaryCondition::dirichlet);
    Projector proj = build_projector(grid, BoundaryCondition::dirichlet);
    const ScalarField u = [dim](const Point& x) { return smooth_field(x, dim); };
    const double perr = interpolation_error_l2(proj, u);
    std::optional<Vec> sol;
    if (elliptic) sol = solve_elliptic_at(ctx, h).sol.u;
    return ConvergenceRow{h, std::move(proj), perr, std::move(sol)};
  });

  std::vector<double> h;
  std::vector<double> perr;
  for (const auto& r : rows) {
    h.push_back(r.h);
    perr.push_back(r.projection_error);
  }
  json j;
  j["projection_order"] = fit_log_slope(h, perr);
  bool ok = std::abs(j["projection_order"].get<double>() - 2.0) <= 0.2;

  // Differences of consecutive solutions, measured on the coarser grid.
  std::vector<std::optional<double>> diff(rows.size());
  if (elliptic) {
    std::vector<double> hd;
    std::vector<double> ed;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const auto& fine = rows[i + 1];
      const Vec& uf = *fine.u;
      const ScalarField sample = [&](const Point& x) { return fine.proj.evaluate(uf, x); };
      const Vec coarse_of_fine = rows[i].proj.decompose(sample);
      const GramMatrix mass = assemble_gram(rows[i].proj);
      diff[i] = discrete_norm(Vec(*rows[i].u - coarse_of_fine), mass);
      hd.push_back(rows[i].h);
      ed.push_back(*diff[i]);
    }
    if (hd.size() >= 2) {
      j["solution_order"] = fit_log_slope(hd, ed);
      ok = ok && std::abs(j["solution_order"].get<double>() - 2.0) <= 0.2;
    }
  }

  std::ostringstream csv;
  csv << "h,dofs,projection_error,solution_difference\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv << io::format_double(rows[i].h) << ',' << rows[i].proj.dof_count() << ','
        << io::format_double(rows[i].projection_error) << ',';
    if (diff[i]) csv << io::format_double(*diff[i]);
    csv << '\n';
  }
  ctx.result.summary["results"] = j;
  ctx.result.summary["ok"] = ok;
  ctx.emit(artifact_name(ctx.cfg.command, ctx.preset, "sweep", ".csv"), csv.str());
  if (!ok) ctx.result.exit_code = kCertificateFailed;
}

}  // namespace

json to_json(const RunConfig& c) {
  json j = {{"command", c.command}, {"preset", c.preset}, {"h", c.h},     {"k", c.k},
            {"tol", c.tol},         {"out_dir", c.out_dir}, {"seed", c.seed}};
  j["r"] = c.r ? json(*c.r) : json(nullptr);
  j["dt"] = c.dt ? json(*c.dt) : json(nullptr);
  j["t1"] = c.t1 ? json(*c.t1) : json(nullptr);
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) parse_error("config must be a JSON object");
  static const std::vector<std::string> keys = {"command", "preset", "h",  "r",   "k",
                                                "dt",      "t1",     "tol", "out_dir", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) parse_error("unknown config key '" + key + "'");
  }
  RunConfig c;
  try {
    auto opt_double = [&](const char* key) -> std::optional<double> {
      if (!j.contains(key) || j[key].is_null()) return std::nullopt;
      return j[key].get<double>();
    };
    if (j.contains("command")) c.command = j["command"].get<std::string>();
    if (j.contains("preset")) c.preset = j["preset"].get<std::string>();
    if (j.contains("h")) {
      if (j["h"].is_array()) {
        c.h = j["h"].get<std::vector<double>>();
      } else {
        c.h = {j["h"].get<double>()};
      }
    }
    c.r = opt_double("r");
    c.dt = opt_double("dt");
    c.t1 = opt_double("t1");
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    parse_error(e.what());
  }
  return c;
}

RunResult run(const RunConfig& config) {
  if (std::find(commands().begin(), commands().end(), config.command) == commands().end()) {
    parse_error("unknown command '" + config.command + "'");
  }
  Context ctx{config, {}, {}, 1.0, {}, {}};
  ctx.result.summary["config"] = to_json(config);
  if (config.command == "list-presets") {
    ctx.result.summary["presets"] = presets_json();
    return ctx.result;
  }
  if (config.k < 0) parse_error("k must be nonnegative");
  ctx.preset = config.preset.empty() ? default_preset(config.command) : config.preset;
  ctx.info = preset_info(ctx.preset);
  ctx.r = config.r.value_or(ctx.info.default_r);
  ctx.hs = config.h.empty() ? std::vector<double>{ctx.info.default_h} : config.h;
  std::sort(ctx.hs.begin(), ctx.hs.end(), std::greater<>());
  ctx.hs.erase(std::unique(ctx.hs.begin(), ctx.hs.end()), ctx.hs.end());
  ctx.result.summary["command"] = config.command;
  ctx.result.summary["preset"] = ctx.preset;

  if (config.command == "solve-elliptic") {
    run_solve_elliptic(ctx);
  } else if (config.command == "solve-evolution") {
    run_solve_evolution(ctx);
  } else if (config.command == "spectral-study") {
    run_spectral_study(ctx);
  } else {
    run_convergence_study(ctx);
  }
  const std::string name = artifact_name(config.command, ctx.preset, "summary", ".json");
  ctx.emit(name, ctx.result.summary.dump(2) + "\n");
  return ctx.result;
}

int main(int argc, char** argv) {
  CLI::App app{"fevolve: particular-representation solvers and certificates"};
  app.set_help_flag("--help", "print this help and exit");
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string h_list;
  std::string preset;
  std::optional<double> r;
  std::optional<double> dt;
  std::optional<double> t1;
  std::optional<double> tol;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "solve-elliptic | solve-evolution | spectral-study | "
                                     "convergence-study | list-presets")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized checks");
  app.add_option("--h", h_list, "grid spacing or comma-separated list, fractions allowed (1/32)");
  app.add_option("--preset", preset, "preset name");
  app.add_option("--r", r, "ball radius");
  app.add_option("--k", k, "Picard depth");
  app.add_option("--dt", dt, "Picard time step");
  app.add_option("--t1", t1, "end of the integration window");
  app.add_option("--tol", tol, "fixed-point tolerance");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) parse_error("cannot read " + config_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::parse_error& e) {
        parse_error(e.what());
      }
      cfg = config_from_json(j);
    }
    cfg.command = command;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!preset.empty()) cfg.preset = preset;
    if (!h_list.empty()) cfg.h = parse_h_list(h_list);
    if (r) cfg.r = r;
    if (dt) cfg.dt = dt;
    if (t1) cfg.t1 = t1;
    if (k) cfg.k = *k;
    if (tol) cfg.tol = *tol;
    if (seed) cfg.seed = *seed;

    const RunResult res = run(cfg);
    if (cfg.command == "list-presets") {
      std::cout << res.summary["presets"].dump(2) << "\n";
    } else {
      for (const auto& f : res.files) std::cout << (std::filesystem::path(cfg.out_dir) / f).string() << "\n";
      std::cout << (res.exit_code == kOk ? "certificates: pass" : "certificates: FAIL") << "\n";
    }
    return res.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kError;
}

}  // namespace fevolve::cli

#include <grandamalgam.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace grandamalgam;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFailedClaim = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergent = 3;

struct Globals {
  std::string config_path;
  int jobs = 1;
  bool require_finite = false;
  std::string out_dir;
  std::optional<double> p, q, theta1, theta2;
};

bool is_divergence(ErrorKind k) {
  return k == ErrorKind::divergent_integral || k == ErrorKind::divergent_pairing ||
         k == ErrorKind::unresolved_singularity;
}

int exit_for(const Error& e, bool require_finite) {
  switch (e.kind()) {
    case ErrorKind::config:
    case ErrorKind::invalid_argument:
    case ErrorKind::singular_point:
    case ErrorKind::unbounded_integrand:
      return kExitConfig;
    default:
      return is_divergence(e.kind()) && require_finite ? kExitDivergent : 1;
  }
}

ExperimentConfig load(const Globals& g) {
  ExperimentConfig c = g.config_path.empty() ? default_config() : load_config(g.config_path);
  if (g.p) c.p = *g.p;
  if (g.q) c.q = *g.q;
  if (g.theta1) c.theta1 = *g.theta1;
  if (g.theta2) c.theta2 = *g.theta2;
  if (!g.out_dir.empty()) c.output_dir = g.out_dir;
  if (g.jobs < 1) throw Error(ErrorKind::config, "--jobs must be >= 1");
  validate(c);
  return c;
}

// Digest of the configuration with the output directory normalized.
std::string config_digest(ExperimentConfig c) {
  c.output_dir = "out";
  return fnv1a_hex(config_to_json(c).dump());
}

json setup_json(const ExperimentConfig& c) {
  return {{"g1", {c.p, c.theta1}},
          {"g2", {c.q, c.theta2}},
          {"window", {c.window_offset, c.window_width}},
          {"omega", {c.lower, c.upper}},
          {"x_domain", to_string(c.x_domain)},
          {"config_digest", config_digest(c)}};
}

std::string file_safe(std::string s) {
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.') ch = '_';
  return s;
}

// --- norm ---

int cmd_norm(const Globals& g, const std::string& fn, const std::string& space) {
  ExperimentConfig c = load(g);
  const MeasureSpace omega = c.omega();
  const AmalgamOptions opt = c.amalgam_options(g.jobs);
  json rec = {{"schema_version", kSchemaVersion}, {"function", fn}, {"space", space}};
  rec.update(setup_json(c));

  NormOutcome n;
  std::optional<bool> surrogate;
  int code = 0;
  try {
    if (space == "sequence") {
      n = grand_seq_norm(c.sequence(fn).entries, c.g1(), opt.inner);
    } else {
      const Expr& f = c.function(fn);
      rec["expr"] = to_json(f);
      log_info("norm " + space + " of " + fn);
      if (space == "grand") {
        n = grand_norm(f, c.g1(), omega, opt.inner);
      } else if (space == "amalgam") {
        n = amalgam_norm(f, c.g1(), c.g2(), c.window(), omega, opt).norm;
      } else if (space == "small-upper") {
        SmallBound s = small_norm_upper(f, c.g1(), omega.domain(), opt.inner);
        n = {s.value, std::nullopt, 0.0, EvaluationPath::quadrature};
        surrogate = s.surrogate_used;
      } else if (space == "dual-upper") {
        n = dual_amalgam_upper(f, c.g1(), c.g2(), c.window(), omega, opt).norm;
      } else {
        throw Error(ErrorKind::config, "unknown space \"" + space + "\"");
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    code = exit_for(e, g.require_finite);
    rec["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    log_error(e.what());
  }
  if (!rec.contains("error")) {
    rec["outcome"] = outcome_json(n);
    if (surrogate) rec["outcome"]["surrogate_used"] = *surrogate;
    std::cout << "value " << format_number(n.value) << '\n'
              << "argmax_eps " << (n.argmax_eps ? format_number(*n.argmax_eps) : std::string("none")) << '\n'
              << "error_estimate " << format_number(n.error_estimate) << '\n'
              << "path " << to_string(n.path) << '\n';
    if (!n.finite() && g.require_finite) {
      log_error("norm is +inf and --require-finite is set");
      code = kExitDivergent;
    }
  }
  fs::path out = fs::path(c.output_dir) / ("norm-" + file_safe(fn) + "-" + space + ".json");
  write_atomic(out, rec.dump(2) + "\n");
  log_info("wrote " + out.string());
  return code;
}

// --- verify ---

int cmd_verify(const Globals& g, const std::vector<std::string>& claims) {
  ExperimentConfig c = load(g);
  if (!claims.empty()) {
    c.claims = claims;
    validate(c);
  }
  log_info("verify: " + std::to_string(c.functions.size()) + " functions, jobs " + std::to_string(g.jobs));
  std::vector<CheckReport> rs = run_verify(c, c.claims, g.jobs);
  int fails = 0, inconclusive = 0;
  for (const auto& r : rs) {
    fails += r.verdict == Verdict::fail;
    inconclusive += r.verdict == Verdict::inconclusive;
    log_debug(r.claim_id + " " + to_string(r.verdict) + " " + format_number(r.margin));
  }
  fs::path dir(c.output_dir);
  write_atomic(dir / "verify.json", reports_json_text(rs));
  write_atomic(dir / "verify.csv", reports_csv_text(rs));
  std::cout << "reports " << rs.size() << " pass " << rs.size() - fails - inconclusive << " fail " << fails
            << " inconclusive " << inconclusive << '\n';
  if (fails > 0) return kExitFailedClaim;
  if (inconclusive > 0 && g.require_finite) return kExitDivergent;
  return 0;
}

// --- sweep ---

struct SweepRow {
  std::vector<double> values;
  std::string error;
};

int cmd_sweep(const Globals& g, std::string axis, const std::string& fn) {
  ExperimentConfig c = load(g);
  if (axis == "θ") axis = "theta";
  if (axis == "ε") axis = "eps";
  const Expr& f = c.function(fn);
  const MeasureSpace omega = c.omega();
  AmalgamOptions opt = c.amalgam_options(1);

  std::vector<std::string> columns;
  std::vector<double> grid;
  std::function<std::vector<double>(double)> row;
  if (axis == "p") {
    grid = c.sweep.p;
    columns = {"p", "grand_norm", "amalgam_norm"};
    row = [&](double p) {
      GrandExponent g1(p, c.theta1);
      return std::vector<double>{grand_norm(f, g1, omega, opt.inner).value,
                                 amalgam_norm(f, g1, c.g2(), c.window(), omega, opt).norm.value};
    };
  } else if (axis == "q") {
    grid = c.sweep.q;
    columns = {"q", "amalgam_norm"};
    row = [&](double q) {
      return std::vector<double>{amalgam_norm(f, c.g1(), GrandExponent(q, c.theta2), c.window(), omega, opt).norm.value};
    };
  } else if (axis == "theta") {
    grid = c.sweep.theta;
    columns = {"theta", "grand_norm", "amalgam_norm"};
    row = [&](double t) {
      GrandExponent g1(c.p, t), g2(c.q, t);
      return std::vector<double>{grand_norm(f, g1, omega, opt.inner).value,
                                 amalgam_norm(f, g1, g2, c.window(), omega, opt).norm.value};
    };
  } else if (axis == "a") {
    grid = c.sweep.a;
    columns = {"a", "T"};
    row = [&](double a) { return std::vector<double>{acn_tail(f, c.g1(), c.g2(), omega, {a}, opt).front().second}; };
  } else if (axis == "eps") {
    grid = c.sweep.eps;
    columns = {"eps", "phi", "V"};
    row = [&](double e) {
      double ph = phi(f, c.g1(), omega.domain(), e, opt.inner);
      double v = vanishing_functional(f, c.g1(), c.g2(), c.witness_window(), omega, {e}, opt).front().second;
      return std::vector<double>{ph, v};
    };
  } else if (axis == "window-width") {
    grid = c.sweep.window_width;
    columns = {"window_width", "amalgam_norm"};
    row = [&](double w) {
      return std::vector<double>{amalgam_norm(f, c.g1(), c.g2(), Window(c.window_offset, w), omega, opt).norm.value};
    };
  } else {
    throw Error(ErrorKind::config, "unknown sweep axis \"" + axis + "\"");
  }

  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), g.jobs, [&](std::size_t i) {
    try {
      rows[i].values = row(grid[i]);
    } catch (const Error& e) {
      rows[i].error = to_string(e.kind());
      log_info("sweep row " + format_number(grid[i]) + ": " + e.what());
    }
  });

  std::ostringstream os;
  for (const auto& col : columns) os << col << ',';
  os << "error,schema_version\n";
  bool infinite = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << format_number(grid[i]);
    for (std::size_t k = 1; k < columns.size(); ++k) {
      double v = rows[i].error.empty() ? rows[i].values[k - 1] : std::numeric_limits<double>::quiet_NaN();
      infinite = infinite || std::isinf(v);
      os << ',' << format_number(v);
    }
    os << ',' << rows[i].error << ',' << kSchemaVersion << '\n';
  }
  fs::path out = fs::path(c.output_dir) / ("sweep-" + axis + "-" + file_safe(fn) + ".csv");
  write_atomic(out, os.str());
  std::cout << out.string() << '\n';
  return infinite && g.require_finite ? kExitDivergent : 0;
}

// --- export-curve ---

int cmd_export_curve(const Globals& g, const std::string& fn) {
  ExperimentConfig c = load(g);
  const Expr& f = c.function(fn);
  AmalgamOutcome a = amalgam_norm(f, c.g1(), c.g2(), c.window(), c.omega(), c.amalgam_options(g.jobs));
  fs::path out = fs::path(c.output_dir) / ("curve-" + file_safe(fn) + ".csv");
  write_atomic(out, curve_csv_text(a.curve));
  std::cout << out.string() << '\n' << "points " << a.curve.size() << " norm " << format_number(a.norm.value) << '\n';
  return !a.norm.finite() && g.require_finite ? kExitDivergent : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grand Lebesgue and grand Wiener amalgam norms"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "experiment configuration (JSON)");
  app.add_option("--jobs", g.jobs, "parallel jobs");
  app.add_flag("--require-finite", g.require_finite, "exit 3 when a requested norm is +inf");
  app.add_option("--out", g.out_dir, "output directory (overrides the config)");
  app.add_option("--p", g.p, "override p");
  app.add_option("--q", g.q, "override q");
  app.add_option("--theta1", g.theta1, "override theta1");
  app.add_option("--theta2", g.theta2, "override theta2");

  std::string fn, space, axis;
  std::vector<std::string> claims;

  auto* norm = app.add_subcommand("norm", "evaluate one norm of a named function or sequence");
  norm->add_option("--fn", fn, "function or sequence name")->required();
  norm->add_option("--space", space, "grand | sequence | amalgam | small-upper | dual-upper")->required();

  auto* verify = app.add_subcommand("verify", "run the claim suite and write verify.json and verify.csv");
  verify->add_option("--claims", claims, "comma-separated claim ids or prefixes")->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "tabulate norms along one parameter axis");
  sweep->add_option("--axis", axis, "p | q | theta | a | eps | window-width")->required();
  sweep->add_option("--fn", fn, "function name")->default_val("singular");

  auto* curve = app.add_subcommand("export-curve", "write the amalgam control curve as CSV");
  curve->add_option("--fn", fn, "function name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    Logger::get().configure_from_env();
    if (*norm) return cmd_norm(g, fn, space);
    if (*verify) return cmd_verify(g, claims);
    if (*sweep) return cmd_sweep(g, axis, fn);
    if (*curve) return cmd_export_curve(g, fn);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_for(e, g.require_finite);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitFailedClaim;
  }
  return 0;
}

#include <grandamalgam.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

using namespace grandamalgam;
namespace fs = std::filesystem;

namespace {

constexpr double kCheckTol = 1e-6;
constexpr double kClosedTol = 1e-6;
constexpr double kQuadTol = 1e-4;
constexpr double kLadderTol = 1e-4;
constexpr double kStrictSeconds = 30.0;
constexpr double kVanishBounded = 1e-2;
constexpr double kVanishSingular = 0.5;
constexpr double kTailSingular = 0.5;
constexpr double kTailDecay = 1e-2;

int failures = 0;

void line(int n, bool ok, const std::string& what, const std::string& detail) {
  std::cout << "criterion " << n << ' ' << (ok ? "PASS" : "FAIL") << ' ' << what << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string num(double v) { return format_number(v); }

struct Tally {
  int pass = 0, fail = 0, inconclusive = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_at;

  void add(const CheckReport& r) {
    if (r.verdict == Verdict::pass) ++pass;
    if (r.verdict == Verdict::fail) ++fail;
    if (r.verdict == Verdict::inconclusive) ++inconclusive;
    if (!std::isnan(r.margin) && r.margin < worst) {
      worst = r.margin;
      worst_at = r.claim_id + " " + r.inputs.value("function", std::string(r.inputs.contains("g") ? r.inputs["g"].dump() : ""));
    }
  }
  std::string str() const {
    std::ostringstream s;
    s << pass << " pass, " << fail << " fail, " << inconclusive << " inconclusive, min margin " << num(worst);
    if (!worst_at.empty()) s << " (" << worst_at << ")";
    return s.str();
  }
};

Tally tally(const std::vector<CheckReport>& rs, const std::string& prefix) {
  Tally t;
  for (const auto& r : rs)
    if (claim_selected(r.claim_id, {prefix})) t.add(r);
  return t;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  int status = std::system((GRANDAMALGAM_CLI " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
  ExperimentConfig cfg = default_config();
  cfg.check_tol = kCheckTol;
  const MeasureSpace omega = cfg.omega();
  const GrandExponent g21(2, 1);
  const Expr singular = singular_witness(omega, 2.0);
  const int jobs = std::max(1u, std::thread::hardware_concurrency());

  auto reports = run_verify(cfg, {}, jobs);

  {
    NormOutcome closed = grand_norm(singular, g21, omega.domain());
    GrandOptions forced = cfg.grand_options();
    forced.force_quadrature = true;
    NormOutcome quad = grand_norm(singular, g21, omega.domain(), forced);
    Tally eq5 = tally(reports, "P1.eq5");
    bool ok = closed.path == EvaluationPath::closed_form && std::fabs(closed.value - 2.0) <= kClosedTol &&
              quad.path == EvaluationPath::quadrature && std::fabs(quad.value - 2.0) <= kQuadTol && eq5.fail == 0 &&
              eq5.inconclusive == 0 && eq5.pass == 8 && eq5.worst >= -kCheckTol;
    line(1, ok, "oracle equivalence",
         "closed " + num(closed.value) + " (tol 1e-6), quadrature " + num(quad.value) + " (tol 1e-4), bound over 8 (p,theta): " +
             eq5.str());
  }

  {
    auto t0 = std::chrono::steady_clock::now();
    Window q = cfg.witness_window();
    double grand = amalgam_norm(singular, g21, g21, q, omega, cfg.amalgam_options(jobs)).norm.value;
    double classical;
    std::string note;
    try {
      classical = lebesgue_amalgam_norm(singular, 2, 2, q, omega, cfg.amalgam_options(jobs)).norm.value;
    } catch (const Error& e) {
      classical = std::numeric_limits<double>::quiet_NaN();
      note = std::string(", classical error: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = std::isfinite(grand) && grand <= 2.0 + kCheckTol && std::isinf(classical) && secs < kStrictSeconds;
    line(2, ok, "strictness witness",
         "grand " + num(grand) + " <= 2 + 1e-6, classical " + num(classical) + ", window (" + num(q.offset()) + ", " +
             num(q.offset() + q.width()) + "), " + num(std::round(secs * 100) / 100) + " s" + note);
  }

  {
    Tally bf = tally(reports, "T3");
    Tally ladder = tally(reports, "T3.P6");
    double gap = 0.0;
    for (const auto& r : reports)
      if (r.claim_id == "T3.P6" && !std::isnan(r.quantity("final_rel_gap"))) gap = std::max(gap, r.quantity("final_rel_gap"));
    std::map<std::string, int> fails;
    for (const auto& r : reports)
      if (claim_selected(r.claim_id, {"T3"}) && r.verdict != Verdict::pass) ++fails[r.claim_id];
    std::string which;
    for (const auto& [id, n] : fails) which += " " + id + "x" + std::to_string(n);
    bool ok = bf.fail == 0 && bf.worst >= -kCheckTol && ladder.fail == 0 && gap <= kLadderTol;
    line(3, ok, "BF properties", bf.str() + ", ladder gap " + num(gap) + " (tol 1e-4)" + (which.empty() ? "" : ", not passing:" + which));
  }

  {
    Tally c = tally(reports, "P1.chain");
    line(4, c.fail == 0 && c.pass > 0 && c.worst >= -kCheckTol, "scaled inclusion chain",
         std::to_string(cfg.chain_points) + "x" + std::to_string(cfg.chain_points) + " grid, " + c.str() +
             " (inconclusive = infinite norm)");
  }

  {
    Tally d = tally(reports, "P5.diag");
    std::string spreads;
    for (const auto& r : reports)
      if (r.claim_id == "P5.diag")
        spreads += " " + r.inputs["g"].dump() + ":[" + num(r.quantity("r_lo")) + ", " + num(r.quantity("r_hi")) + "] spread " +
                   num(r.quantity("spread")) + " bound " + num(r.quantity("bound"));
    line(5, d.fail == 0 && d.inconclusive == 0 && d.pass == static_cast<int>(cfg.diagonal.size()), "diagonal identification",
         d.str() + ";" + spreads);
  }

  {
    Tally h = tally(reports, "T7.holder");
    line(6, h.fail == 0 && h.inconclusive == 0 && h.pass > 0, "Hoelder pairing", h.str());
  }

  {
    double worst_bounded = 0.0, singular_min = std::numeric_limits<double>::infinity();
    Tally v = tally(reports, "P6.vanish"), n = tally(reports, "P7.nondense");
    for (const auto& r : reports) {
      if (r.claim_id == "P6.vanish") worst_bounded = std::max(worst_bounded, r.quantity("V_0.0001"));
      if (r.claim_id == "P7.nondense")
        for (const auto& [k, x] : r.quantities) singular_min = std::min(singular_min, x);
    }
    bool ok = v.fail == 0 && n.fail == 0 && n.pass == 1 && worst_bounded <= kVanishBounded && singular_min >= kVanishSingular;
    line(7, ok, "density dichotomy",
         "max bounded V(1e-4) " + num(worst_bounded) + " <= 1e-2, singular min V " + num(singular_min) + " >= 0.5, window (" +
             num(cfg.witness_offset) + ", " + num(cfg.witness_offset + cfg.witness_width) + ")");
  }

  {
    std::vector<double> as{0.1, 0.01, 0.001};
    auto opt = cfg.amalgam_options(jobs);
    auto ts = acn_tail(singular, g21, g21, omega, as, opt);
    auto tc = acn_tail(Expr::constant(1), g21, g21, omega, as, opt);
    bool ok = true;
    std::string s = "singular T(a)";
    for (const auto& [a, t] : ts) {
      s += " " + num(t);
      ok = ok && t >= kTailSingular;
    }
    s += " (need >= 0.5), constant T(a)";
    for (const auto& [a, t] : tc) s += " " + num(t);
    ok = ok && tc.back().second <= kTailDecay * tc.front().second;
    line(8, ok, "non-ACN witness", s + " (need last <= 1e-2 first)");
  }

  {
    fs::path dir = fs::temp_directory_path() / "grandamalgam-acceptance";
    fs::remove_all(dir);
    int a = run_cli("--jobs 4 --out " + (dir / "a").string() + " verify");
    int b = run_cli("--jobs 1 --out " + (dir / "b").string() + " verify");
    bool same = true;
    for (const char* f : {"verify.json", "verify.csv"}) {
      std::string x = slurp(dir / "a" / f), y = slurp(dir / "b" / f);
      same = same && !x.empty() && x == y;
    }
    line(9, same && a == b && (a == 0 || a == 1), "determinism",
         std::string(same ? "verify.json and verify.csv byte-identical" : "outputs differ") + " across --jobs 4 and --jobs 1 (exit codes " + std::to_string(a) + ", " + std::to_string(b) + ")");
    fs::remove_all(dir);
  }

  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}

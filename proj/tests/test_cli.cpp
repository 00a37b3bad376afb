#include <gtest/gtest.h>

#include <grandamalgam.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using grandamalgam::json;

namespace {

struct Result {
  int code;
  std::string out;
};

Result cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " GRANDAMALGAM_CLI " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           (std::string("cli-") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string out(const std::string& sub = "o") const { return "--out " + (dir_ / sub).string(); }
  fs::path file(const std::string& name, const std::string& sub = "o") const { return dir_ / sub / name; }
  std::string write_config(const json& j) const {
    fs::path p = dir_ / "config.json";
    std::ofstream(p) << j.dump(2);
    return p.string();
  }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, NormSingularGrand) {
  Result r = cli(out() + " norm --fn singular --space grand");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("value 2\n"), std::string::npos) << r.out;
  json j = json::parse(slurp(file("norm-singular-grand.json")));
  EXPECT_EQ(j["schema_version"], grandamalgam::kSchemaVersion);
  EXPECT_NEAR(j["outcome"]["value"].get<double>(), 2.0, 1e-6);
  EXPECT_EQ(j["outcome"]["path"], "closed-form");
}

TEST_F(Cli, NormZeroAmalgam) {
  Result r = cli(out() + " norm --fn zero --space amalgam");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("value 0\n"), std::string::npos) << r.out;
}

TEST_F(Cli, DivergentNormUnderRequireFinite) {
  EXPECT_EQ(cli(out() + " --theta1 0 --require-finite norm --fn singular --space grand").code, 3);
  Result r = cli(out() + " --theta1 0 norm --fn singular --space grand");
  EXPECT_NE(r.out.find("value inf"), std::string::npos) << r.out;
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(cli(out() + " norm --fn nosuch --space grand").code, 2);
  EXPECT_EQ(cli(out() + " norm --fn one --space nosuch").code, 2);
  EXPECT_EQ(cli(out() + " --jobs 0 norm --fn one --space grand").code, 2);
  EXPECT_EQ(cli(out() + " --config /nonexistent.json verify").code, 2);
  EXPECT_EQ(cli(out() + " norm --fn one --space grand", "GRANDAMALGAM_LOG=loud").code, 2);
  EXPECT_EQ(cli(out() + " --bogus").code, 2);
  EXPECT_EQ(cli(out() + " verify --claims X9").code, 2);

  json neg = grandamalgam::config_to_json(grandamalgam::default_config());
  neg["tolerances"]["check_tol"] = -1e-6;
  EXPECT_EQ(cli("--config " + write_config(neg) + " " + out() + " verify").code, 2);
  json old = grandamalgam::config_to_json(grandamalgam::default_config());
  old["schema_version"] = 0;
  EXPECT_EQ(cli("--config " + write_config(old) + " " + out() + " verify").code, 2);
}

TEST_F(Cli, LogLevelsAreAccepted) {
  for (const char* lvl : {"error", "info", "debug"})
    EXPECT_EQ(cli(out() + " norm --fn one --space grand", std::string("GRANDAMALGAM_LOG=") + lvl).code, 0) << lvl;
}

TEST_F(Cli, VerifyRestrictedToOneClaim) {
  Result r = cli(out() + " verify --claims T10");
  EXPECT_NE(r.code, 2);
  json j = json::parse(slurp(file("verify.json")));
  ASSERT_TRUE(j.is_array());
  ASSERT_FALSE(j.empty());
  bool failed = false;
  for (const auto& rep : j) {
    EXPECT_EQ(rep["claim_id"], "T10.acn");
    EXPECT_EQ(rep["schema_version"], grandamalgam::kSchemaVersion);
    failed = failed || rep["verdict"] == "fail";
  }
  EXPECT_EQ(r.code, failed ? 1 : 0);
  auto rows = csv(file("verify.csv"));
  ASSERT_EQ(rows.size(), j.size() + 1);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"claim_id", "verdict", "margin", "inputs_digest", "schema_version"}));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][0], "T10.acn");
}

TEST_F(Cli, DefaultVerifyIsDeterministicAndClean) {
  Result a = cli(out("a") + " --jobs 4 verify");
  Result b = cli(out("b") + " --jobs 2 verify");
  EXPECT_EQ(slurp(file("verify.json", "a")), slurp(file("verify.json", "b")));
  EXPECT_EQ(slurp(file("verify.csv", "a")), slurp(file("verify.csv", "b")));
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.code, 0) << a.out;
}

TEST_F(Cli, SweepEpsMatchesClosedForm) {
  EXPECT_EQ(cli(out() + " sweep --axis eps --fn singular").code, 0);
  auto rows = csv(file("sweep-eps-singular.csv"));
  ASSERT_GT(rows.size(), 1u);
  EXPECT_EQ(rows[0][0], "eps");
  EXPECT_EQ(rows[0][1], "phi");
  EXPECT_EQ(rows[0].back(), "schema_version");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double e = std::stod(rows[i][0]), phi = std::stod(rows[i][1]);
    EXPECT_NEAR(phi, std::pow(2.0, 1.0 / (2.0 - e)), 1e-6) << "eps=" << e;
    EXPECT_EQ(rows[i].back(), "1");
  }
}

TEST_F(Cli, SweepATabulatesTheTail) {
  EXPECT_EQ(cli(out() + " sweep --axis a --fn singular").code, 0);
  auto rows = csv(file("sweep-a-singular.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "T", "error", "schema_version"}));
  auto ref = grandamalgam::acn_tail(grandamalgam::Expr::power(1, 0, -0.5), grandamalgam::GrandExponent(2, 1),
                                    grandamalgam::GrandExponent(2, 1), grandamalgam::MeasureSpace(0, 1),
                                    {0.1, 0.01, 0.001});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_DOUBLE_EQ(std::stod(rows[i][0]), ref[i - 1].first);
    EXPECT_DOUBLE_EQ(std::stod(rows[i][1]), ref[i - 1].second);
  }
}

TEST_F(Cli, EmptyGridGivesHeaderOnly) {
  json c = grandamalgam::config_to_json(grandamalgam::default_config());
  c["grids"]["sweep"]["theta"] = json::array();
  EXPECT_EQ(cli("--config " + write_config(c) + " " + out() + " sweep --axis theta --fn one").code, 0);
  auto rows = csv(file("sweep-theta-one.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].back(), "schema_version");
}

TEST_F(Cli, EverySweepAxisRuns) {
  for (const char* axis : {"p", "q", "theta", "window-width"}) {
    EXPECT_EQ(cli(out() + " sweep --axis " + axis + " --fn affine_sum").code, 0) << axis;
    auto rows = csv(file(std::string("sweep-") + axis + "-affine_sum.csv"));
    ASSERT_GT(rows.size(), 1u) << axis;
    for (const auto& row : rows) EXPECT_EQ(row.size(), rows[0].size()) << axis;
  }
  EXPECT_EQ(cli(out() + " sweep --axis nosuch").code, 2);
}

TEST_F(Cli, ExportCurve) {
  EXPECT_EQ(cli(out() + " export-curve --fn one").code, 0);
  auto rows = csv(file("curve-one.csv"));
  ASSERT_GT(rows.size(), 33u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "F", "argmax_eps", "schema_version"}));
  double prev = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double x = std::stod(rows[i][0]);
    EXPECT_GT(x, prev);
    prev = x;
  }
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
  for (const char* args : {" sweep --axis eps", " export-curve --fn mixed_sum", " norm --fn truncated --space amalgam"}) {
    cli(out("a") + args);
    cli(out("b") + " --jobs 3" + args);
  }
  for (const auto& entry : fs::directory_iterator(dir_ / "a"))
    EXPECT_EQ(slurp(entry.path()), slurp(dir_ / "b" / entry.path().filename())) << entry.path();
}

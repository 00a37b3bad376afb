#include <gtest/gtest.h>

#include <grandamalgam.hpp>

#include "oracles.hpp"

using namespace grandamalgam;

namespace {

const MeasureSpace unit(0, 1);
const GrandExponent g21(2, 1);
const Window q01(0, 1);

std::vector<NamedFunction> bounded_corpus() {
  std::vector<NamedFunction> out;
  for (auto& nf : default_corpus(unit))
    if (is_bounded_on(nf.expr, unit.domain())) out.push_back(nf);
  return out;
}

// Outer small norm of a curve sampled at midpoints of (0, 1), same surrogate rule as the inner one.
double oracle_dual(const oracle::Fn& g, double sup, double p, double theta, double w, int nx = 120) {
  std::vector<double> F(nx);
  const double dx = 1.0 / nx;
  double fmax = 0.0;
  for (int i = 0; i < nx; ++i) {
    double x = (i + 0.5) * dx, b = std::min(1.0, x + w);
    F[i] = oracle::small(g, p, theta, x, b, sup);
    fmax = std::max(fmax, F[i]);
  }
  auto norm = [&](double s) {
    if (s > 64.0) return fmax;
    double acc = 0.0;
    for (double v : F) acc += dx * std::pow(v, s);
    return std::pow(acc, 1.0 / s);
  };
  return oracle::dense_min(
      [&](double e) { return std::pow(e, -theta / (p - e)) * norm((p - e) / (p - e - 1.0)); }, 1e-6 * (p - 1.0),
      p - 1.0);
}

}  // namespace

TEST(SmallUpper, Examples) {
  EXPECT_NEAR(small_norm_upper(Expr::constant(1), g21, {0, 1}).value, 1.0, 1e-6);
  EXPECT_EQ(small_norm_upper(Expr::constant(0), g21, {0, 1}).value, 0.0);
  Expr half = Expr::constant(0.5);
  Decomposition d(Expr::constant(1), {half, half}, {0, 1});
  EXPECT_NEAR(small_norm_upper(g21, {0, 1}, d).value, 1.0, 1e-6);
}

TEST(SmallUpper, ZeroPartNeverChangesTheBound) {
  for (const auto& [name, g] : bounded_corpus()) {
    double single = small_norm_upper(g, g21, {0, 1}).value;
    Decomposition d(g, {g, Expr::constant(0)}, {0, 1});
    EXPECT_EQ(small_norm_upper(g21, {0, 1}, d).value, single) << name;
  }
}

TEST(SmallUpper, AgreesWithOracleOnSubwindows) {
  struct Case {
    Expr g;
    oracle::Fn fn;  // monotone, so the sup sits at an endpoint
  };
  std::vector<Case> cases = {{Expr::constant(1), [](double) { return 1.0; }},
                             {Expr::power(1, 0, 1), [](double t) { return t; }},
                             {Expr::power(1, 1, 1), [](double t) { return 1 - t; }}};
  for (const auto& c : cases) {
    for (Interval w : {Interval{0, 1}, Interval{0.2, 0.7}, Interval{0.9, 1}}) {
      double mine = small_norm_upper(c.g, g21, w).value;
      double ref = oracle::small(c.fn, 2, 1, w.lo, w.hi, std::max(c.fn(w.lo), c.fn(w.hi)));
      EXPECT_NEAR(mine, ref, 1e-6 * std::max(1.0, ref)) << w.lo << "," << w.hi;
    }
  }
}

TEST(Decomposition, RejectsMismatchedParts) {
  try {
    Decomposition(Expr::constant(1), {Expr::constant(0.5), Expr::constant(0.4)}, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
  }
  EXPECT_THROW(Decomposition(Expr::constant(1), {}, {0, 1}), Error);
}

TEST(SmallUpper, UnboundedPartThrows) {
  try {
    small_norm_upper(Expr::power(1, 0, -0.5), g21, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unbounded_integrand);
  }
  EXPECT_NO_THROW(small_norm_upper(Expr::power(1, 0, -0.5), g21, {0.5, 1}));
}

TEST(DualUpper, Examples) {
  EXPECT_EQ(dual_amalgam_upper(Expr::constant(0), g21, g21, q01, unit).norm.value, 0.0);
  double one = dual_amalgam_upper(Expr::constant(1), g21, g21, q01, unit).norm.value;
  double ind = dual_amalgam_upper(Expr::indicator(0, 0.5), g21, g21, q01, unit).norm.value;
  EXPECT_LE(ind, one + 1e-6);
  EXPECT_GT(ind, 0.0);
  EXPECT_THROW(dual_amalgam_upper(Expr::power(1, 0, -0.5), g21, g21, q01, unit), Error);
}

TEST(DualUpper, AgreesWithBruteForceOracle) {
  double mine = dual_amalgam_upper(Expr::constant(1), g21, g21, q01, unit).norm.value;
  EXPECT_NEAR(mine, oracle_dual([](double) { return 1.0; }, 1.0, 2, 1, 1.0), 5e-3 * mine);
  mine = dual_amalgam_upper(Expr::power(1, 0, 1), g21, g21, Window(0, 0.5), unit).norm.value;
  EXPECT_NEAR(mine, oracle_dual([](double t) { return t; }, 1.0, 2, 1, 0.5), 5e-3 * mine);
}

TEST(Pairing, ZeroAndDivergence) {
  PairingReport r = holder_pairing(Expr::constant(0), Expr::constant(1), g21, g21, q01, unit);
  EXPECT_EQ(r.integral, 0.0);
  EXPECT_TRUE(r.pass());
  try {
    pairing_integral(Expr::power(1, 0, -0.5), Expr::power(1, 0, -0.5), unit);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::divergent_pairing);
  }
  EXPECT_NEAR(pairing_integral(Expr::power(1, 0, -0.5), Expr::constant(1), unit), 2.0, 1e-9);
}

TEST(Pairing, MarginIsLeftTimesRightMinusIntegral) {
  PairingReport r = holder_pairing(Expr::power(1, 0, 1), Expr::indicator(0.25, 0.75), g21, g21, q01, unit);
  EXPECT_DOUBLE_EQ(r.margin, r.left * r.right - r.integral);
  EXPECT_EQ(r.pass(), r.margin >= -1e-6);
}

TEST(Pairing, ConstantTimesConstant) {
  PairingReport r = holder_pairing(Expr::constant(1), Expr::constant(1), g21, g21, q01, unit);
  EXPECT_NEAR(r.integral, 1.0, 1e-12);
  EXPECT_TRUE(r.pass()) << "integral " << r.integral << " left " << r.left << " right " << r.right;
}

TEST(Pairing, SingularTimesConstant) {
  PairingReport r = holder_pairing(Expr::power(1, 0, -0.5), Expr::constant(1), g21, g21, q01, unit);
  EXPECT_NEAR(r.integral, 2.0, 1e-9);
  EXPECT_TRUE(r.pass()) << "integral " << r.integral << " left " << r.left << " right " << r.right;
}

TEST(Pairing, PassesOnCorpusTimesProbes) {
  auto probes = default_probes(unit, 2);
  for (const auto& [name, g] : bounded_corpus()) {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      PairingReport r = holder_pairing(probes[i], g, g21, g21, q01, unit);
      EXPECT_TRUE(r.pass()) << name << " probe " << i << " margin " << r.margin;
    }
  }
}

TEST(Associate, Examples) {
  auto probes = default_probes(unit, 2);
  EXPECT_EQ(associate_lower_bound(Expr::constant(0), g21, g21, q01, unit, probes), 0.0);
  double n1 = amalgam_norm(Expr::constant(1), g21, g21, q01, unit).norm.value;
  EXPECT_NEAR(associate_lower_bound(Expr::constant(1), g21, g21, q01, unit, {Expr::constant(1)}), 1.0 / n1, 1e-12);
  EXPECT_EQ(associate_lower_bound(Expr::constant(1), g21, g21, q01, unit, {Expr::constant(0)}), 0.0);
}

TEST(Associate, SandwichedByTheDualUpperBound) {
  auto probes = default_probes(unit, 2);
  for (const auto& [name, g] : bounded_corpus()) {
    double lo = associate_lower_bound(g, g21, g21, q01, unit, probes);
    double hi = dual_amalgam_upper(g, g21, g21, q01, unit).norm.value;
    EXPECT_LE(lo, hi + 1e-6) << name;
  }
}

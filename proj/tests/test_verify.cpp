#include <gtest/gtest.h>

#include <random>

#include "mkg/verify.hpp"
#include "oracles.hpp"

using namespace mkg;

namespace {

SuiteConfig reference_config() {
  SuiteConfig cfg;
  cfg.p = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  cfg.alpha = {0.0, 1.0, -1.0};
  cfg.N = 4;
  return cfg;
}

}  // namespace

TEST(Verify, ReferenceRunPasses) {
  const auto rep = full_suite(reference_config());
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.residual << " " << c.context;
  EXPECT_EQ(rep.checks.size(), multinomial_manifest().size() + 1);
}

TEST(Verify, EveryEntryHonorsTheInvariant) {
  auto cfg = reference_config();
  cfg.tol.op = 1e-30;
  const auto rep = full_suite(cfg);
  EXPECT_FALSE(rep.all_passed());
  for (const auto& c : rep.checks) {
    if (!c.vacuous && !c.errored && c.name != "gaudin_solve" && c.name != "duality_transpose") {
      EXPECT_EQ(c.passed, c.residual <= c.tolerance) << c.name;
    }
  }
}

TEST(Verify, D1IsVacuousButPasses) {
  SuiteConfig cfg;
  cfg.p = {0.4, 0.6};
  cfg.alpha = {0.0, 2.0};
  cfg.N = 3;
  const auto rep = full_suite(cfg);
  int vacuous = 0;
  for (const auto& c : rep.checks) {
    EXPECT_TRUE(c.passed) << c.name;
    vacuous += c.vacuous;
  }
  EXPECT_GE(vacuous, 4);
  EXPECT_TRUE(rep.find("kd_disjoint_commute")->vacuous);
  EXPECT_TRUE(rep.find("kd_triple_commute")->vacuous);
}

TEST(Verify, DeterministicGivenSeed) {
  auto cfg = reference_config();
  cfg.p = {0.1, 0.2, 0.3, 0.4};
  cfg.alpha = {0.0, 1.0, -2.0, 3.0};
  cfg.N = 3;
  cfg.seed = 99;
  const auto a = full_suite(cfg), b = full_suite(cfg);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t k = 0; k < a.checks.size(); ++k) {
    EXPECT_EQ(a.checks[k].residual, b.checks[k].residual) << a.checks[k].name;
    EXPECT_EQ(a.checks[k].context, b.checks[k].context);
  }
}

TEST(Verify, KdRelationsDetectCorruption) {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const LatticeGrid grid(3, 3);
  LFamily L(p, grid);
  std::mt19937_64 rng(0);
  for (const auto& c : check_kd_relations(L, 1e-10, rng)) EXPECT_TRUE(c.passed) << c.name;
  OperatorBuilder bump(grid.size());
  bump.add(1, 2, 1e-3);
  L.replace(0, 1, L(0, 1) + std::move(bump).finish());
  const auto checks = check_kd_relations(L, 1e-10, rng);
  EXPECT_GT(checks[1].residual, 1e-6);
}

TEST(Verify, IndependenceDetectsDependency) {
  const std::vector<double> p{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const LatticeGrid grid(2, 2);
  const LFamily L(p, grid);
  std::vector<SparseOperator> ops{L(0, 1), L(0, 2), L(1, 2)};
  const double good = independence_condition(ops, grid);
  EXPECT_LT(good, 1e8);
  ops[2] = L(0, 1) + L(0, 2);
  EXPECT_GT(independence_condition(ops, grid), 1e8);
  EXPECT_TRUE(check_linear_independence(L, grid, 1e8).passed);
}

TEST(Verify, IndependenceD1) {
  const LatticeGrid grid(1, 3);
  const LFamily L(std::vector<double>{0.5, 0.5}, grid);
  EXPECT_TRUE(check_linear_independence(L, grid, 1e8).passed);
}

TEST(Verify, CubicRelationHoldsAndIsVacuousBelowD3) {
  std::mt19937_64 rng(1);
  const LatticeGrid grid(3, 2);
  const LFamily L(oracle::random_p(3, rng), grid);
  EXPECT_LE(check_cubic_relation(L, 1e-10, rng).residual, 1e-10);
  const LatticeGrid g2(2, 2);
  EXPECT_TRUE(check_cubic_relation(LFamily(std::vector<double>{0.2, 0.3, 0.5}, g2), 1e-10, rng).vacuous);
}

TEST(Verify, BracketDependencyScaleFreeAndSensitive) {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const LatticeGrid grid(3, 3);
  const LFamily L(p, grid);
  std::mt19937_64 rng(0);
  const auto base = check_bracket_dependency(L, 1e-10, rng);
  EXPECT_TRUE(base.passed);
  // A sign flip on the last coefficient.
  const auto t1 = commutator(L(1, 2), L(2, 3));
  const auto t2 = commutator(L(0, 2), L(2, 3));
  const auto t3 = commutator(L(0, 1), L(1, 3));
  const auto t4 = commutator(L(0, 1), L(1, 2));
  const auto wrong = axpby(p[0], t1, -p[1], t2) + axpby(p[2], t3, p[3], t4);
  const double scale = p[0] * t1.frobenius_norm() + p[1] * t2.frobenius_norm() + p[2] * t3.frobenius_norm() +
                       p[3] * t4.frobenius_norm();
  EXPECT_GT(wrong.frobenius_norm() / scale, 1e-3);
}

TEST(Verify, DegreePreservationRejectsMultiplication) {
  // Multiplication by x_1 raises the degree; the harness must notice.
  const LatticeGrid grid(2, 3);
  OperatorBuilder b(grid.size());
  for (std::size_t r = 0; r < grid.size(); ++r) b.add(r, r, grid.at(r)[0]);
  const auto X = std::move(b).finish();
  LFamily L(std::vector<double>{0.2, 0.3, 0.5}, grid);
  EXPECT_TRUE(check_degree_preservation(L, grid, 1e-9).passed);
  L.replace(1, 2, X);
  EXPECT_FALSE(check_degree_preservation(L, grid, 1e-9).passed);
}

TEST(Verify, NonGaudinKappaFailsOnlyProp32) {
  auto cfg = reference_config();
  cfg.p = {0.25, 0.25, 0.25, 0.25};
  cfg.alpha = {0.0, 1.0, 2.0, -1.5};
  cfg.N = 3;
  cfg.prop32_kappa = random_kappa(cfg.p, 5);
  const auto rep = full_suite(cfg);
  for (const auto& c : rep.checks) {
    if (c.name == "prop32_pairwise" || c.name == "prop32_triple") {
      EXPECT_FALSE(c.passed) << c.name;
    } else {
      EXPECT_TRUE(c.passed) << c.name;
    }
  }
}

TEST(Verify, SolverFailureIsRecorded) {
  auto cfg = reference_config();
  cfg.alpha = {0.0, 1.0, 1.0};
  const auto rep = full_suite(cfg);
  EXPECT_TRUE(rep.any_errored());
  EXPECT_TRUE(rep.find("gaudin_solve")->errored);
  EXPECT_TRUE(rep.find("gaudin_spectral_x")->errored);
  EXPECT_TRUE(rep.find("orthogonality")->passed);
  EXPECT_TRUE(rep.find("manifest_audit")->passed);
}

TEST(Verify, GaudinD1ClosedForm) {
  const auto m = solve(std::vector<double>{0.3, 0.7}, std::vector<double>{0.0, -1.25});
  const LatticeGrid grid(1, 5);
  for (const auto& c : check_gaudin_diagonalization(m, basis_table(m.kappa, grid), 1e-12)) {
    EXPECT_TRUE(c.passed) << c.name << " " << c.residual;
  }
}

TEST(Verify, NegativeModeManifest) {
  SuiteConfig cfg;
  cfg.mode = SuiteMode::negative;
  cfg.c = {0.25, 0.25};
  cfg.s = 2;
  const auto rep = full_suite(cfg);
  ASSERT_EQ(rep.checks.size(), negative_manifest().size() + 1);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.residual;
}

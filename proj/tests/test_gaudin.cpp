#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mkg/gaudin.hpp"
#include "oracles.hpp"

using namespace mkg;

TEST(Gaudin, SymmetricCase) {
  const std::vector<double> p{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const std::vector<double> alpha{0.0, 1.0, -1.0};
  const auto m = solve(p, alpha);
  EXPECT_EQ(m.solver.path, RootPath::bracketed);
  EXPECT_NEAR(m.beta[1], -std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(m.beta[2], std::sqrt(3.0), 1e-12);
  for (double v : m.kappa.p_tilde) EXPECT_NEAR(v, 1.0 / 3, 1e-12);
  // (alpha_1 - alpha_0) / (alpha_1 - alpha_2) = 1/2
  EXPECT_NEAR(prop32_pairwise_value(m.kappa, 1, 2), 0.5, 1e-15);
  EXPECT_NEAR(prop32_pairwise_value(m.kappa, 2, 1), 0.5, 1e-15);
}

TEST(Gaudin, D1ClosedForm) {
  for (double p0 : {0.2, 0.5, 0.7}) {
    for (double a1 : {-2.0, 0.5, 3.0}) {
      const std::vector<double> p{p0, 1 - p0};
      const std::vector<double> alpha{0.0, a1};
      const auto m = solve(p, alpha);
      EXPECT_NEAR(m.beta[1], -1 / (p0 * a1), 1e-13 * std::abs(1 / (p0 * a1)));
      EXPECT_NEAR(m.kappa.U(1, 1), -p0 / (1 - p0), 1e-13);
    }
  }
}

TEST(Gaudin, RootsAreRealDistinctAndBracketed) {
  std::mt19937_64 rng(2024);
  for (int d = 1; d <= 8; ++d) {
    for (int t = 0; t < 10; ++t) {
      const auto p = oracle::random_p(d, rng);
      const auto alpha = oracle::random_alpha(d, rng);
      const auto sol = find_beta(p, alpha);
      EXPECT_EQ(sol.path, RootPath::bracketed);
      ASSERT_EQ(sol.beta.size(), static_cast<std::size_t>(d));
      EXPECT_LE(sol.max_residual, 1e-12);
      for (int k = 1; k < d; ++k) EXPECT_LT(sol.beta[k - 1], sol.beta[k]);
      // Interlacing with the poles of f after z = 1/beta.
      for (double b : sol.beta) EXPECT_NE(b, 0.0);
    }
  }
}

TEST(Gaudin, CompanionPathAgrees) {
  std::mt19937_64 rng(8);
  for (int d = 1; d <= 6; ++d) {
    const auto p = oracle::random_p(d, rng);
    const auto alpha = oracle::random_alpha(d, rng);
    const auto a = find_beta(p, alpha);
    RootOptions opts;
    opts.force_companion = true;
    const auto b = find_beta(p, alpha, opts);
    EXPECT_EQ(b.path, RootPath::companion);
    for (int k = 0; k < d; ++k) EXPECT_NEAR(a.beta[k], b.beta[k], 1e-9 * (1 + std::abs(a.beta[k])));
  }
}

TEST(Gaudin, NoRealSolution) {
  // R(z) = 1 + z^2 for p = (-1, 1, 1), alpha = (0, 1, -1).
  const std::vector<double> p{-1.0, 1.0, 1.0};
  const std::vector<double> alpha{0.0, 1.0, -1.0};
  try {
    solve(p, alpha, {.roots = {}, .allow_generic_p = true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_real_solution);
    EXPECT_NE(std::string(e.what()).find("non-real"), std::string::npos);
  }
}

TEST(Gaudin, InputErrors) {
  const std::vector<double> p{0.5, 0.25, 0.25};
  EXPECT_THROW(solve(p, std::vector<double>{0.0, 1.0, 1.0}), Error);
  EXPECT_THROW(solve(p, std::vector<double>{0.0, 0.0, 1.0}), Error);
  EXPECT_THROW(solve(p, std::vector<double>{1.0, 2.0, 3.0}), Error);
  EXPECT_THROW(solve(p, std::vector<double>{0.0, 1.0}), Error);
  EXPECT_THROW(solve(std::vector<double>{1.2, -0.1, -0.1}, std::vector<double>{0.0, 1.0, 2.0}), Error);
}

TEST(Gaudin, PolynomialR) {
  // R(z) = p_0 (1 + z)(1 - z) + p_1 (1 - z) + p_2 (1 + z) for alpha = (0, 1, -1).
  const std::vector<double> p{0.5, 0.2, 0.3};
  const std::vector<double> alpha{0.0, 1.0, -1.0};
  const auto R = poly_R(p, alpha);
  ASSERT_EQ(R.size(), 3u);
  EXPECT_NEAR(R[0], 1.0, 1e-16);
  EXPECT_NEAR(R[1], 0.1, 1e-16);
  EXPECT_NEAR(R[2], -0.5, 1e-16);
}

TEST(Gaudin, SolvedModelSatisfiesIdentities) {
  std::mt19937_64 rng(77);
  for (int d = 1; d <= 6; ++d) {
    const auto m = solve(oracle::random_p(d, rng), oracle::random_alpha(d, rng));
    EXPECT_LT(validate(m.kappa).max(), 1e-10);
    EXPECT_LT(check_prop32(m.kappa, m.alpha).max(), 1e-10);
    EXPECT_LT(cocycle_residual(m), 1e-10);
    const auto r = dual_R_residual(m, std::vector<double>{0.0, 0.3, -1.1});
    EXPECT_LT(r.coefficient_deviation, 1e-10);
    EXPECT_LT(r.root_residual, 1e-10);
  }
}

TEST(Gaudin, EigenvalueFormulas) {
  const auto m = solve(std::vector<double>{0.4, 0.6}, std::vector<double>{0.0, 2.0});
  // d = 1: mu_n = -(zeta_1 - zeta_0) n / alpha_1
  const std::vector<double> zeta{0.5, 2.0};
  for (int n = 0; n <= 4; ++n) {
    EXPECT_NEAR(eigenvalue_mu(MultiIndex{n}, m, zeta), -1.5 * n / 2.0, 1e-14);
    EXPECT_NEAR(eigenvalue_lambda(MultiIndex{n}, m.kappa, m.alpha, zeta), -1.5 * n / 2.0, 1e-14);
  }
}

TEST(Gaudin, GenericKappaViolatesPairwiseCondition) {
  const std::vector<double> p{0.25, 0.25, 0.25, 0.25};
  const std::vector<double> alpha{0.0, 1.0, 2.0, -1.5};
  const auto k = random_kappa(p, 5);
  EXPECT_GT(check_prop32(k, alpha).pairwise, 1e-3);
}

TEST(Gaudin, AnsatzExchangeSymmetry) {
  const auto m = solve(std::vector<double>{0.1, 0.2, 0.3, 0.4}, std::vector<double>{0.0, 1.5, -0.5, 2.5});
  const Eigen::MatrixXd a = build_U_ansatz(m.alpha, m.beta);
  const Eigen::MatrixXd b = build_U_ansatz(m.beta, m.alpha);
  EXPECT_TRUE(a.transpose() == b);
}

TEST(Gaudin, CocycleTight) {
  std::mt19937_64 rng(31);
  for (int d = 1; d <= 8; ++d) {
    const auto m = solve(oracle::random_p(d, rng), oracle::random_alpha(d, rng));
    EXPECT_LT(cocycle_residual(m), 1e-12) << "d=" << d;
  }
}

TEST(Gaudin, InvolutionMatchesDualSolve) {
  // Solving with (p~, beta) returns alpha as roots and the transposed U, up to
  // the ascending order of the roots.
  const std::vector<double> alpha{0.0, 1.5, -0.5, 2.5};
  const auto m = solve(std::vector<double>{0.1, 0.2, 0.3, 0.4}, alpha);
  const auto dual = solve(m.kappa.p_tilde, m.beta);
  const auto inv = involution(m.kappa);
  std::vector<int> order{1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return alpha[a] < alpha[b]; });
  for (int j = 1; j <= 3; ++j) {
    const int src = order[static_cast<std::size_t>(j - 1)];
    EXPECT_NEAR(dual.beta[j], alpha[src], 1e-12 * (1 + std::abs(alpha[src])));
    EXPECT_NEAR(dual.kappa.p_tilde[j], inv.p_tilde[src], 1e-12);
    for (int i = 0; i <= 3; ++i) EXPECT_NEAR(dual.kappa.U(i, j), inv.U(i, src), 1e-11);
  }
}

TEST(Gaudin, LambdaD1HandValue) {
  KrawtchoukParam k;
  k.nu = 2;
  k.p = {0.5, 0.5};
  k.p_tilde = {0.5, 0.5};
  k.U = Eigen::MatrixXd::Ones(2, 2);
  k.U(1, 1) = -1;
  const std::vector<double> alpha{0.0, 1.0}, zeta{0.0, 1.0};
  for (int n = 0; n <= 5; ++n) EXPECT_EQ(eigenvalue_lambda(MultiIndex{n}, k, alpha, zeta), -n);
}

TEST(Gaudin, DualRD1) {
  const auto m = solve(std::vector<double>{0.3, 0.7}, std::vector<double>{0.0, 0.8});
  EXPECT_NEAR(m.kappa.p_tilde[1], 0.7, 1e-15);
  const auto r = dual_R_residual(m, std::vector<double>{0.0, 0.8, -3.0});
  EXPECT_LT(r.sample_residual, 1e-14);
  EXPECT_LT(r.coefficient_deviation, 1e-15);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mkg/gaudin.hpp"
#include "mkg/krawtchouk.hpp"
#include "oracles.hpp"

using namespace mkg;

TEST(Krawtchouk, MatchesBruteForceSum) {
  std::mt19937_64 rng(3);
  for (int d = 1; d <= 3; ++d) {
    const int N = d == 3 ? 3 : 4;
    const auto kappa = random_kappa(oracle::random_p(d, rng), 17);
    const auto points = oracle::simplex(d, N);
    for (const auto& n : points) {
      for (const auto& x : points) {
        const double v = eval_poly(MultiIndex(n), MultiIndex(x), kappa, N);
        const auto ref = static_cast<double>(oracle::krawtchouk_bruteforce(n, x, kappa.U, N));
        EXPECT_NEAR(v, ref, 1e-12 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST(Krawtchouk, D1ClassicalValues) {
  const double p0 = 0.35, p1 = 0.65;
  const auto m = solve(std::vector<double>{p0, p1}, std::vector<double>{0.0, 1.7});
  for (int N = 1; N <= 6; ++N) {
    for (int n = 0; n <= N; ++n)
      for (int x = 0; x <= N; ++x) {
        const auto ref = static_cast<double>(oracle::classical_2f1(n, x, N, p1));
        EXPECT_NEAR(eval_poly(MultiIndex{n}, MultiIndex{x}, m.kappa, N), ref, 1e-12 * std::max(1.0, std::abs(ref)));
      }
  }
}

TEST(Krawtchouk, PruningDoesNotChangeBits) {
  const auto kappa = random_kappa(std::vector<double>{0.2, 0.3, 0.5}, 1);
  const int N = 5;
  const LatticeGrid grid(2, N);
  for (std::size_t a = 0; a < grid.size(); ++a)
    for (std::size_t b = 0; b < grid.size(); ++b) {
      const auto n = grid.unrank(a), x = grid.unrank(b);
      EXPECT_EQ(eval_poly(n, x, kappa, N, Pruning::on), eval_poly(n, x, kappa, N, Pruning::off));
    }
}

TEST(Krawtchouk, TrivialValues) {
  const auto kappa = random_kappa(std::vector<double>{0.1, 0.2, 0.3, 0.4}, 2);
  const LatticeGrid grid(3, 3);
  const auto t = basis_table(kappa, grid, 1);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(t.values(0, static_cast<Eigen::Index>(k)), 1.0);
    EXPECT_EQ(t.values(static_cast<Eigen::Index>(k), 0), 1.0);
  }
}

TEST(Krawtchouk, DomainErrors) {
  const auto kappa = random_kappa(std::vector<double>{0.5, 0.5}, 2);
  EXPECT_THROW(eval_poly(MultiIndex{4}, MultiIndex{0}, kappa, 3), Error);
  EXPECT_THROW(eval_poly(MultiIndex{1, 1}, MultiIndex{0, 0}, kappa, 3), Error);
  EXPECT_THROW(eval_poly(MultiIndex{-1}, MultiIndex{0}, kappa, 3), Error);
}

TEST(Krawtchouk, ThreadedTableIsBitIdentical) {
  const auto kappa = random_kappa(std::vector<double>{0.1, 0.2, 0.3, 0.4}, 6);
  const LatticeGrid grid(3, 4);
  const auto a = basis_table(kappa, grid, 1);
  const auto b = basis_table(kappa, grid, 4);
  EXPECT_TRUE(a.values == b.values);
}

TEST(Krawtchouk, NormsD1) {
  // p = (1/2, 1/2), N = 2: p_0^N / W_{p~,N}(n) = (1/4) / (1/4, 1/2, 1/4).
  const auto m = solve(std::vector<double>{0.5, 0.5}, std::vector<double>{0.0, 1.0});
  EXPECT_NEAR(norm_sq(MultiIndex{0}, m.kappa, 2), 1.0, 1e-15);
  EXPECT_NEAR(norm_sq(MultiIndex{1}, m.kappa, 2), 0.5, 1e-15);
  EXPECT_NEAR(norm_sq(MultiIndex{2}, m.kappa, 2), 1.0, 1e-15);
  for (int n = 0; n <= 2; ++n) {
    EXPECT_NEAR(formal_norm_sq(MultiIndex{n}, m.kappa, 2.0), norm_sq(MultiIndex{n}, m.kappa, 2), 1e-15);
  }
}

TEST(Krawtchouk, GramMatchesNorms) {
  const auto kappa = random_kappa(std::vector<double>{0.3, 0.3, 0.4}, 12);
  const LatticeGrid grid(2, 4);
  const auto t = basis_table(kappa, grid);
  const auto params = ModelParams::multinomial(kappa.p, 4);
  const auto G = gram_matrix(t, grid_weights(params, grid));
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double h = norm_sq(grid.unrank(a), kappa, 4);
    for (std::size_t b = 0; b < grid.size(); ++b) {
      const double target = a == b ? h : 0.0;
      EXPECT_NEAR(G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), target, 1e-12 * h);
    }
  }
}

TEST(Krawtchouk, NegativeRegimeRequiresMatchingKappa) {
  const auto params = ModelParams::negative_multinomial({0.25, 0.25}, 2);
  const auto kappa = random_kappa(params.p, 0, {.allow_generic_p = true});
  const std::vector<double> c{0.25, 0.25};
  EXPECT_EQ(eval_neg_poly(MultiIndex{0, 0}, MultiIndex{7, 9}, kappa, c, 2.0), 1.0);
  EXPECT_TRUE(std::isfinite(eval_neg_poly(MultiIndex{3, 2}, MultiIndex{20, 11}, kappa, c, 2.0)));
  const std::vector<double> other{0.2, 0.25};
  EXPECT_THROW(eval_neg_poly(MultiIndex{1, 0}, MultiIndex{1, 0}, kappa, other, 2.0), Error);
}

TEST(Krawtchouk, TotalDegreeIsExact) {
  // Fit each P_n against monomials of degree <= |n| (exact) and <= |n| - 1 (fails).
  const auto kappa = random_kappa(std::vector<double>{0.3, 0.3, 0.4}, 4);
  const int N = 4;
  const LatticeGrid grid(2, N);
  auto design = [&](int k) {
    std::vector<std::pair<int, int>> exps;
    for (int a = 0; a <= k; ++a)
      for (int b = 0; a + b <= k; ++b) exps.emplace_back(a, b);
    Eigen::MatrixXd V(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(exps.size()));
    for (std::size_t r = 0; r < grid.size(); ++r)
      for (std::size_t c = 0; c < exps.size(); ++c)
        V(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            std::pow(grid.at(r)[0], exps[c].first) * std::pow(grid.at(r)[1], exps[c].second);
    return V;
  };
  const auto t = basis_table(kappa, grid);
  for (std::size_t a = 1; a < grid.grade_begin(N); ++a) {
    const int deg = grid.unrank(a).total();
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t x = 0; x < grid.size(); ++x) v[static_cast<Eigen::Index>(x)] = t.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(x));
    const Eigen::MatrixXd hi = design(deg), lo = design(deg - 1);
    const Eigen::VectorXd rh = v - hi * hi.colPivHouseholderQr().solve(v);
    const Eigen::VectorXd rl = v - lo * lo.colPivHouseholderQr().solve(v);
    EXPECT_LT(rh.norm() / v.norm(), 1e-10);
    EXPECT_GT(rl.norm() / v.norm(), 1e-3);
  }
}

TEST(Krawtchouk, NegativeD1LinearPolynomial) {
  // c = (1/2), s = 1: p = (2, -1), N = -1, u_11 = -p_0/p_1 = 2, so
  // P_1(x) = 1 + (-1)(-x)(1 - 2) / (1) = 1 - x.
  const auto params = ModelParams::negative_multinomial({0.5}, 1.0);
  const auto kappa = random_kappa(params.p, 0, {.allow_generic_p = true});
  EXPECT_DOUBLE_EQ(kappa.U(1, 1), 2.0);
  for (int x = 0; x <= 6; ++x) {
    EXPECT_NEAR(eval_neg_poly(MultiIndex{1}, MultiIndex{x}, kappa, std::vector<double>{0.5}, 1.0), 1.0 - x, 1e-14);
  }
}

#pragma once

// Points kappa = (nu, P, P~, U) of the parameter set that indexes the
// multivariate Krawtchouk families: nu = 1/p_0 = 1/p~_0, U bordered by ones,
// and nu P U P~ U^T = I.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mkg/error.hpp"
#include "mkg/summation.hpp"

namespace mkg {

struct KappaMeta {
  std::string generator = "manual";
  std::optional<std::uint64_t> seed;
  friend bool operator==(const KappaMeta&, const KappaMeta&) = default;
};

struct KrawtchoukParam {
  double nu = 1;
  std::vector<double> p;
  std::vector<double> p_tilde;
  Eigen::MatrixXd U;
  KappaMeta meta;

  int dim() const { return static_cast<int>(p.size()) - 1; }
  double u(int i, int j) const { return U(i, j); }

  friend bool operator==(const KrawtchoukParam& a, const KrawtchoukParam& b) {
    return a.nu == b.nu && a.p == b.p && a.p_tilde == b.p_tilde && a.U.rows() == b.U.rows() &&
           a.U.cols() == b.U.cols() && a.U == b.U && a.meta == b.meta;
  }
};

inline constexpr double kKappaTolerance = 1e-10;

/// Max-abs residuals of every defining condition of a kappa point.
struct KappaResiduals {
  double border = 0;       // |u_{0,j} - 1|, |u_{j,0} - 1|
  double matrix = 0;       // |nu P U P~ U^T - I|
  double sum_p = 0;        // |sum p - 1|
  double sum_p_tilde = 0;  // |sum p~ - 1|
  double p0_nu = 0;        // |p_0 nu - 1|
  double pt0_nu = 0;       // |p~_0 nu - 1|
  double tolerance = kKappaTolerance;

  double max() const { return std::max({border, matrix, sum_p, sum_p_tilde, p0_nu, pt0_nu}); }
  bool passed() const { return max() <= tolerance; }
};

inline KappaResiduals validate(const KrawtchoukParam& kappa, double tol = kKappaTolerance) {
  KappaResiduals r;
  r.tolerance = tol;
  const auto n = static_cast<Eigen::Index>(kappa.p.size());
  if (kappa.p_tilde.size() != kappa.p.size() || kappa.U.rows() != n || kappa.U.cols() != n || n < 2) {
    const double inf = std::numeric_limits<double>::infinity();
    r.border = r.matrix = r.sum_p = r.sum_p_tilde = r.p0_nu = r.pt0_nu = inf;
    return r;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    r.border = std::max({r.border, std::abs(kappa.U(0, j) - 1.0), std::abs(kappa.U(j, 0) - 1.0)});
  }
  const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(kappa.p.data(), n);
  const Eigen::VectorXd pt = Eigen::Map<const Eigen::VectorXd>(kappa.p_tilde.data(), n);
  const Eigen::MatrixXd M =
      kappa.nu * p.asDiagonal() * kappa.U * pt.asDiagonal() * kappa.U.transpose() - Eigen::MatrixXd::Identity(n, n);
  r.matrix = M.cwiseAbs().maxCoeff();
  CompensatedSum<double> sp, spt;
  for (Eigen::Index j = 0; j < n; ++j) {
    sp += p[j];
    spt += pt[j];
  }
  r.sum_p = std::abs(sp.value() - 1.0);
  r.sum_p_tilde = std::abs(spt.value() - 1.0);
  r.p0_nu = std::abs(kappa.p[0] * kappa.nu - 1.0);
  r.pt0_nu = std::abs(kappa.p_tilde[0] * kappa.nu - 1.0);
  return r;
}

/// max_{i,k} |sum_j p~_j u_{i,j} u_{k,j} - delta_{ik} p_0 / p_k|, each entry
/// scaled by max(1, p_0 / p_k).
inline double dual_gram_residual(const KrawtchoukParam& kappa) {
  const int n = kappa.dim() + 1;
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      CompensatedSum<double> acc;
      for (int j = 0; j < n; ++j) acc += kappa.p_tilde[j] * kappa.U(i, j) * kappa.U(k, j);
      const double target = i == k ? kappa.p[0] / kappa.p[k] : 0.0;
      worst = std::max(worst, std::abs(acc.value() - target) / std::max(1.0, std::abs(target)));
    }
  }
  return worst;
}

struct CompletionOptions {
  double orthogonality_tol = kKappaTolerance;
  /// Accept any nonzero real p summing to one (the formal regime, e.g. the
  /// negative multinomial substitution) instead of requiring p > 0.
  bool allow_generic_p = false;
};

/// Largest scaled violation of sum_j p_j u_{j,i} u_{j,k} = 0 over i != k.
inline double column_orthogonality_residual(std::span<const double> p, const Eigen::MatrixXd& U) {
  const auto n = static_cast<Eigen::Index>(p.size());
  double worst = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i + 1; k < n; ++k) {
      CompensatedSum<double> acc;
      double scale = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double t = p[static_cast<std::size_t>(j)] * U(j, i) * U(j, k);
        acc += t;
        scale += std::abs(t);
      }
      worst = std::max(worst, std::abs(acc.value()) / std::max(scale, 1e-300));
    }
  }
  return worst;
}

/// Completes (p, U) to a kappa point: p~_k = p_0 / sum_j p_j u_{j,k}^2, nu = 1/p_0.
inline KrawtchoukParam complete_from_U(std::span<const double> p, const Eigen::MatrixXd& U,
                                       const CompletionOptions& opts = {}) {
  const auto n = static_cast<Eigen::Index>(p.size());
  if (n < 2) fail(ErrorKind::argument, "p needs d + 1 >= 2 entries");
  if (U.rows() != n || U.cols() != n) fail(ErrorKind::dimension, "U must be (d+1) x (d+1)");
  for (double v : p) {
    if (opts.allow_generic_p ? v == 0.0 : !(v > 0)) {
      fail(ErrorKind::domain, opts.allow_generic_p ? "p entries must be nonzero" : "p entries must be positive");
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (U(0, j) != 1.0 || U(j, 0) != 1.0) fail(ErrorKind::argument, "U must have first row and column equal to 1");
  }
  const double ortho = column_orthogonality_residual(p, U);
  if (!(ortho <= opts.orthogonality_tol)) {
    fail(ErrorKind::non_orthogonal,
         "columns of U are not orthogonal under diag(p): residual " + std::to_string(ortho));
  }

  KrawtchoukParam kappa;
  kappa.nu = 1.0 / p[0];
  kappa.p.assign(p.begin(), p.end());
  kappa.p_tilde.resize(static_cast<std::size_t>(n));
  kappa.U = U;
  for (Eigen::Index k = 0; k < n; ++k) {
    CompensatedSum<double> acc;
    double scale = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += p[static_cast<std::size_t>(j)] * U(j, k) * U(j, k);
      scale += std::abs(p[static_cast<std::size_t>(j)]) * U(j, k) * U(j, k);
    }
    if (std::abs(acc.value()) <= 1e-14 * scale) {
      fail(ErrorKind::degenerate, "column " + std::to_string(k) + " of U has zero weighted norm");
    }
    kappa.p_tilde[static_cast<std::size_t>(k)] = p[0] / acc.value();
  }
  // Column 0 is all ones, so its norm is sum p = 1 and p~_0 = p_0 exactly.
  kappa.p_tilde[0] = p[0];
  return kappa;
}

struct RandomKappaOptions {
  bool allow_generic_p = false;
  int max_attempts = 200;
  /// Target for the smallest top-entry-to-largest-entry ratio over the
  /// columns; keeps U well scaled after bordering.
  double min_top_ratio = 0.25;
};

/// Random kappa for the given p: weighted Gram-Schmidt of Gaussian vectors
/// against w_0 = (1, ..., 1) under diag(p), each column divided by its top entry.
inline KrawtchoukParam random_kappa(std::span<const double> p, std::uint64_t seed,
                                    const RandomKappaOptions& opts = {}) {
  const auto n = static_cast<Eigen::Index>(p.size());
  if (n < 2) fail(ErrorKind::argument, "p needs d + 1 >= 2 entries");
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(p.data(), n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto pdot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a.array() * w.array() * b.array()).sum(); };

  // The last column is fixed up to scale by the earlier ones, so each attempt
  // redraws the whole matrix. An attempt is scored by its worst column (top
  // entry relative to the largest entry); the first one reaching
  // min_top_ratio is taken, otherwise the best usable one.
  Eigen::MatrixXd U(n, n), best;
  double best_score = 0;
  for (int attempt = 0; attempt < opts.max_attempts && best_score < opts.min_top_ratio; ++attempt) {
    U.setZero();
    U.col(0).setOnes();
    double score = 1;
    for (Eigen::Index k = 1; k < n && score > 0; ++k) {
      Eigen::VectorXd v(n);
      for (Eigen::Index j = 0; j < n; ++j) v[j] = gauss(rng);
      // Two passes of modified Gram-Schmidt.
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index m = 0; m < k; ++m) {
          const Eigen::VectorXd col = U.col(m);
          v -= (pdot(v, col) / pdot(col, col)) * col;
        }
      }
      const double top = v[0];
      const double norm = top == 0 ? 0.0 : pdot(v, v) / (top * top);
      if (std::abs(norm) < 1e-6) {
        score = 0;  // near-null direction of an indefinite p
        break;
      }
      score = std::min(score, std::abs(top) / v.cwiseAbs().maxCoeff());
      U.col(k) = v / top;
      U(0, k) = 1.0;
    }
    if (score > best_score) {
      best_score = score;
      best = U;
    }
  }
  if (!(best_score >= 1e-8)) fail(ErrorKind::degenerate, "random_kappa: could not border the Gram-Schmidt columns");
  U = best;
  KrawtchoukParam kappa = complete_from_U(p, U, {1e-10, opts.allow_generic_p});
  kappa.meta = {"random_kappa", seed};
  return kappa;
}

/// (nu, P, P~, U) -> (nu, P~, P, U^T).
inline KrawtchoukParam involution(const KrawtchoukParam& kappa, double tol = kKappaTolerance) {
  const auto r = validate(kappa, tol);
  if (!r.passed()) {
    fail(ErrorKind::domain, "involution: kappa fails validation (residual " + std::to_string(r.max()) + ")");
  }
  KrawtchoukParam out;
  out.nu = kappa.nu;
  out.p = kappa.p_tilde;
  out.p_tilde = kappa.p;
  out.U = kappa.U.transpose();
  out.meta = kappa.meta;
  return out;
}

}  // namespace mkg

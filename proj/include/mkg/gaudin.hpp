#pragma once

// Closed-form diagonalization of the multinomial Gaudin operators.
//
// With alpha_0 = 0 and distinct nonzero alpha_1..alpha_d, the roots beta_j of
//
//   R(z; p, alpha) = p_0 prod_k (1 + alpha_k z) + sum_j p_j prod_{k != j} (1 + alpha_k z)
//
// give u_{i,j} = 1 / (1 + alpha_i beta_j), and the Krawtchouk polynomials of
// the resulting kappa are joint eigenfunctions of G(alpha, p, N; zeta) in x and
// of G~(beta, p~, N; zeta) in n.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mkg/error.hpp"
#include "mkg/kappa.hpp"
#include "mkg/lattice.hpp"
#include "mkg/summation.hpp"

namespace mkg {

/// Ascending-power coefficients.
using Polynomial = std::vector<double>;

inline double horner(std::span<const double> c, double z) {
  double v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
  return v;
}

/// sum_k |c_k| |z|^k: the magnitude against which |R(z)| is judged.
inline double evaluation_scale(std::span<const double> c, double z) {
  double v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * std::abs(z) + std::abs(*it);
  return v;
}

namespace detail {

inline Polynomial multiply_linear(const Polynomial& a, double slope) {
  Polynomial out(a.size() + 1, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    out[k] += a[k];
    out[k + 1] += slope * a[k];
  }
  return out;
}

inline void check_alpha(std::span<const double> alpha, double rel_gap = 1e-9) {
  if (alpha.size() < 2) fail(ErrorKind::argument, "alpha needs d + 1 >= 2 entries");
  if (alpha[0] != 0.0) fail(ErrorKind::argument, "alpha_0 must be 0");
  double scale = 0;
  for (double a : alpha) scale = std::max(scale, std::abs(a));
  for (std::size_t k = 1; k < alpha.size(); ++k) {
    if (alpha[k] == 0.0 || std::abs(alpha[k]) < rel_gap * scale) {
      fail(ErrorKind::degenerate, "alpha_" + std::to_string(k) + " must be nonzero");
    }
    for (std::size_t l = k + 1; l < alpha.size(); ++l) {
      if (!(std::abs(alpha[k] - alpha[l]) >= rel_gap * scale) || alpha[k] == alpha[l]) {
        fail(ErrorKind::degenerate,
             "alpha_" + std::to_string(k) + " and alpha_" + std::to_string(l) + " are not distinct");
      }
    }
  }
}

}  // namespace detail

/// Coefficients of R(z; p, alpha), degree <= d. R(0) = sum p.
inline Polynomial poly_R(std::span<const double> p, std::span<const double> alpha) {
  if (p.size() != alpha.size()) fail(ErrorKind::dimension, "p and alpha need the same length d + 1");
  detail::check_alpha(alpha, 0.0);
  const std::size_t d = p.size() - 1;
  Polynomial out(d + 1, 0.0);
  Polynomial all{1.0};
  for (std::size_t k = 1; k <= d; ++k) all = detail::multiply_linear(all, alpha[k]);
  for (std::size_t k = 0; k <= d; ++k) out[k] += p[0] * all[k];
  for (std::size_t j = 1; j <= d; ++j) {
    Polynomial partial{1.0};
    for (std::size_t k = 1; k <= d; ++k) {
      if (k != j) partial = detail::multiply_linear(partial, alpha[k]);
    }
    for (std::size_t k = 0; k < partial.size(); ++k) out[k] += p[j] * partial[k];
  }
  return out;
}

/// prod_{k=1..d} (1 - z / alpha_k).
inline Polynomial product_one_minus(std::span<const double> alpha) {
  Polynomial out{1.0};
  for (std::size_t k = 1; k < alpha.size(); ++k) out = detail::multiply_linear(out, -1.0 / alpha[k]);
  return out;
}

enum class RootPath { bracketed, companion };

constexpr std::string_view to_string(RootPath p) { return p == RootPath::bracketed ? "bracketed" : "companion"; }

struct RootSolution {
  std::vector<double> beta;  // d roots, ascending
  RootPath path = RootPath::bracketed;
  int iterations = 0;          // bisection + polish steps, summed over roots
  double max_residual = 0;     // max_j |R(beta_j)| / evaluation_scale
};

struct RootOptions {
  double residual_tol = 1e-12;
  int newton_steps = 3;
  int max_bisections = 4000;
  bool force_companion = false;
  double imag_tol = 1e-10;
};

namespace detail {

/// Bisection for the zero of f(z) = p_0 / z + sum_k p_k / (z + alpha_k) on the
/// open pole gap (a, b), where f falls from +inf to -inf when all p > 0.
inline double bisect_gap(std::span<const double> p, std::span<const double> alpha, double a, double b,
                         int max_iter, int& iterations) {
  auto f = [&](double z) {
    CompensatedSum<double> acc;
    for (std::size_t k = 0; k < p.size(); ++k) acc += p[k] / (z + alpha[k]);
    return acc.value();
  };
  double lo = a, hi = b;
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 1e-14 * (1.0 + std::abs(lo) + std::abs(hi))) break;
    ++iterations;
    const double fm = f(mid);
    if (fm > 0) {
      lo = mid;
    } else if (fm < 0) {
      hi = mid;
    } else {
      return mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Newton steps on the polynomial c, kept only while they stay inside
/// [lo, hi] and do not increase |c(z)|.
inline double polish(std::span<const double> c, double z, double lo, double hi, int steps, int& iterations) {
  Polynomial dc(c.size() > 1 ? c.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < c.size(); ++k) dc[k - 1] = static_cast<double>(k) * c[k];
  double fz = horner(c, z);
  for (int s = 0; s < steps; ++s) {
    const double dz = horner(dc, z);
    if (dz == 0 || fz == 0) break;
    const double next = z - fz / dz;
    if (!(next > lo && next < hi)) break;
    const double fn = horner(c, next);
    if (std::abs(fn) > std::abs(fz)) break;
    ++iterations;
    z = next;
    fz = fn;
  }
  return z;
}

}  // namespace detail

/// The d roots of R(z; p, alpha), ascending.
///
/// With every p_j > 0 each root is located by bisection on one pole gap of
/// f(z) = r(z) / (z prod (z + alpha_k)), r(z) = z^d R(1/z), then polished by
/// Newton on r and mapped back by beta = 1 / z. Otherwise (or when forced)
/// the roots come from the companion matrix and are checked for realness,
/// distinctness and 1 + alpha_i beta_j != 0.
inline RootSolution find_beta(std::span<const double> p, std::span<const double> alpha, const RootOptions& opts = {}) {
  const Polynomial R = poly_R(p, alpha);
  const std::size_t d = p.size() - 1;
  RootSolution sol;
  const bool positive = std::all_of(p.begin(), p.end(), [](double v) { return v > 0; });

  if (positive && !opts.force_companion) {
    sol.path = RootPath::bracketed;
    Polynomial r(R.rbegin(), R.rend());  // reverse polynomial
    std::vector<double> poles{0.0};
    for (std::size_t k = 1; k <= d; ++k) poles.push_back(-alpha[k]);
    std::sort(poles.begin(), poles.end());
    for (std::size_t g = 0; g < d; ++g) {
      const double a = poles[g], b = poles[g + 1];
      double z = detail::bisect_gap(p, alpha, a, b, opts.max_bisections, sol.iterations);
      z = detail::polish(r, z, a, b, opts.newton_steps, sol.iterations);
      if (z == 0.0) fail(ErrorKind::no_real_solution, "bisection converged onto the pole at 0");
      sol.beta.push_back(1.0 / z);
    }
  } else {
    sol.path = RootPath::companion;
    const double lead = R[d];
    if (lead == 0.0) fail(ErrorKind::no_real_solution, "R has degree below d (p_0 prod alpha_k = 0)");
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 1; k < d; ++k) C(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = 1.0;
    for (std::size_t k = 0; k < d; ++k) C(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d - 1)) = -R[k] / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    if (es.info() != Eigen::Success) fail(ErrorKind::no_real_solution, "companion eigensolver did not converge");
    const Eigen::VectorXcd ev = es.eigenvalues();
    std::ostringstream roots;
    roots.precision(17);
    bool ok = true;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      roots << (k ? ", " : "") << ev[k].real() << (ev[k].imag() < 0 ? "-" : "+") << std::abs(ev[k].imag()) << "i";
      if (std::abs(ev[k].imag()) > opts.imag_tol * (1.0 + std::abs(ev[k].real()))) ok = false;
      sol.beta.push_back(ev[k].real());
    }
    if (!ok) fail(ErrorKind::no_real_solution, "R has non-real roots: [" + roots.str() + "]");
    for (double& b : sol.beta) {
      const double span = 1e-6 * (1.0 + std::abs(b));
      b = detail::polish(R, b, b - span, b + span, opts.newton_steps, sol.iterations);
    }
    std::sort(sol.beta.begin(), sol.beta.end());
    for (std::size_t k = 0; k < d; ++k) {
      if (sol.beta[k] == 0.0 || (k > 0 && !(sol.beta[k] - sol.beta[k - 1] > 1e-9 * (1.0 + std::abs(sol.beta[k]))))) {
        fail(ErrorKind::no_real_solution, "R roots are zero or coincide: [" + roots.str() + "]");
      }
    }
  }

  std::sort(sol.beta.begin(), sol.beta.end());
  for (double b : sol.beta) {
    for (std::size_t i = 1; i <= d; ++i) {
      if (std::abs(1.0 + alpha[i] * b) < 1e-12) {
        fail(ErrorKind::no_real_solution, "a root satisfies alpha_i beta_j = -1");
      }
    }
    sol.max_residual = std::max(sol.max_residual, std::abs(horner(R, b)) / evaluation_scale(R, b));
  }
  if (!(sol.max_residual <= opts.residual_tol)) {
    fail(ErrorKind::no_real_solution,
         "root residual " + std::to_string(sol.max_residual) + " exceeds tolerance");
  }
  return sol;
}

/// u_{i,j} = 1 / (1 + alpha_i beta_j), 0 <= i, j <= d, with alpha_0 = beta_0 = 0.
inline Eigen::MatrixXd build_U_ansatz(std::span<const double> alpha, std::span<const double> beta) {
  if (alpha.size() != beta.size()) fail(ErrorKind::dimension, "alpha and beta need the same length");
  if (alpha.empty() || alpha[0] != 0.0 || beta[0] != 0.0) fail(ErrorKind::argument, "alpha_0 and beta_0 must be 0");
  const auto n = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd U(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double den = 1.0 + alpha[static_cast<std::size_t>(i)] * beta[static_cast<std::size_t>(j)];
      if (std::abs(den) < 1e-12) {
        fail(ErrorKind::degenerate, "singular ansatz: 1 + alpha_" + std::to_string(i) + " beta_" + std::to_string(j) + " = 0");
      }
      U(i, j) = 1.0 / den;
    }
  }
  return U;
}

struct SolverInfo {
  RootPath path = RootPath::bracketed;
  int iterations = 0;
  double root_residual = 0;   // max |R(beta_j)| / scale
  double kappa_residual = 0;  // validate(kappa).max()
};

struct GaudinModel {
  std::vector<double> alpha;  // d + 1, alpha_0 = 0
  std::vector<double> beta;   // d + 1, beta_0 = 0, beta_1 < ... < beta_d
  KrawtchoukParam kappa;
  std::vector<double> p;
  SolverInfo solver;

  int dim() const { return static_cast<int>(p.size()) - 1; }
};

struct SolveOptions {
  RootOptions roots;
  bool allow_generic_p = false;
};

/// R -> beta -> U -> kappa. The roots make the ansatz columns orthogonal under
/// diag(p), so complete_from_U succeeds and the result is a kappa point.
inline GaudinModel solve(std::span<const double> p, std::span<const double> alpha, const SolveOptions& opts = {}) {
  if (p.size() != alpha.size()) fail(ErrorKind::dimension, "p and alpha need the same length d + 1");
  if (opts.allow_generic_p) {
    ModelParams::generic(std::vector<double>(p.begin(), p.end()), 1.0);
  } else {
    ModelParams::multinomial(std::vector<double>(p.begin(), p.end()), 1);
  }
  detail::check_alpha(alpha);

  const RootSolution roots = find_beta(p, alpha, opts.roots);
  GaudinModel m;
  m.alpha.assign(alpha.begin(), alpha.end());
  m.p.assign(p.begin(), p.end());
  m.beta.push_back(0.0);
  m.beta.insert(m.beta.end(), roots.beta.begin(), roots.beta.end());
  const Eigen::MatrixXd U = build_U_ansatz(m.alpha, m.beta);
  m.kappa = complete_from_U(p, U, {kKappaTolerance, opts.allow_generic_p});
  m.kappa.meta = {"gaudin", std::nullopt};
  m.solver = {roots.path, roots.iterations, roots.max_residual, validate(m.kappa).max()};
  return m;
}

/// mu_n(alpha, beta, p; zeta) = -sum_{i,j=1..d} (zeta_i - zeta_0) p_i n_j beta_j / (1 + alpha_i beta_j).
/// Called with (beta, alpha, p~) and x in place of n it gives the dual eigenvalue.
inline double eigenvalue_mu(std::span<const int> n, std::span<const double> alpha, std::span<const double> beta,
                            std::span<const double> p, std::span<const double> zeta) {
  const std::size_t d = p.size() - 1;
  if (n.size() != d || alpha.size() != d + 1 || beta.size() != d + 1 || zeta.size() != d + 1) {
    fail(ErrorKind::dimension, "eigenvalue_mu: inconsistent lengths");
  }
  CompensatedSum<double> acc;
  for (std::size_t i = 1; i <= d; ++i) {
    const double zi = zeta[i] - zeta[0];
    if (zi == 0.0) continue;
    for (std::size_t j = 1; j <= d; ++j) {
      acc += zi * p[i] * n[j - 1] * beta[j] / (1.0 + alpha[i] * beta[j]);
    }
  }
  return -acc.value();
}

inline double eigenvalue_mu(const MultiIndex& n, const GaudinModel& model, std::span<const double> zeta) {
  return eigenvalue_mu(n.entries(), model.alpha, model.beta, model.p, zeta);
}

/// Dual eigenvalue mu_x(beta, alpha, p~; zeta) for the operators acting on n.
inline double dual_eigenvalue_mu(const MultiIndex& x, const GaudinModel& model, std::span<const double> zeta) {
  return eigenvalue_mu(x.entries(), model.beta, model.alpha, model.kappa.p_tilde, zeta);
}

/// lambda_n = -sum_{i,j} (zeta_i - zeta_0) / (alpha_i - alpha_0) p_i n_j (1 - u_{i,j}),
/// defined for any kappa.
inline double eigenvalue_lambda(std::span<const int> n, const KrawtchoukParam& kappa, std::span<const double> alpha,
                                std::span<const double> zeta) {
  const auto d = static_cast<std::size_t>(kappa.dim());
  if (n.size() != d || alpha.size() != d + 1 || zeta.size() != d + 1) {
    fail(ErrorKind::dimension, "eigenvalue_lambda: inconsistent lengths");
  }
  CompensatedSum<double> acc;
  for (std::size_t i = 1; i <= d; ++i) {
    const double zi = (zeta[i] - zeta[0]) / (alpha[i] - alpha[0]);
    if (zi == 0.0) continue;
    for (std::size_t j = 1; j <= d; ++j) {
      acc += zi * kappa.p[i] * n[j - 1] * (1.0 - kappa.U(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return -acc.value();
}

inline double eigenvalue_lambda(const MultiIndex& n, const KrawtchoukParam& kappa, std::span<const double> alpha,
                                std::span<const double> zeta) {
  return eigenvalue_lambda(n.entries(), kappa, alpha, zeta);
}

/// Residuals of the two families of conditions under which P_n(x; kappa) are
/// eigenfunctions of every G(alpha, p, N; zeta):
///   (a) (alpha_k - alpha_0) / (alpha_k - alpha_l) = (p_k / p_0) sum_j p~_j u_{k,j}^2 u_{l,j},  k != l >= 1
///   (b) sum_j p~_j u_{i,j} u_{k,j} u_{l,j} = 0,  i, k, l >= 1 distinct
/// Each residual is divided by max(1, |left side|) for (a) and by
/// max(1, sum_j |p~_j u u u|) for (b).
struct Prop32Report {
  double pairwise = 0;
  double triple = 0;
  bool triple_vacuous = true;
  double max() const { return std::max(pairwise, triple); }
};

/// (p_k / p_0) sum_j p~_j u_{k,j}^2 u_{l,j}; equals (alpha_k - alpha_0) / (alpha_k - alpha_l)
/// exactly when kappa diagonalizes the Gaudin operators for alpha.
inline double prop32_pairwise_value(const KrawtchoukParam& kappa, int k, int l) {
  CompensatedSum<double> acc;
  for (int j = 0; j <= kappa.dim(); ++j) acc += kappa.p_tilde[j] * kappa.U(k, j) * kappa.U(k, j) * kappa.U(l, j);
  return kappa.p[k] / kappa.p[0] * acc.value();
}

inline Prop32Report check_prop32(const KrawtchoukParam& kappa, std::span<const double> alpha) {
  const int d = kappa.dim();
  if (static_cast<int>(alpha.size()) != d + 1) fail(ErrorKind::dimension, "alpha needs d + 1 entries");
  const auto& U = kappa.U;
  const auto& pt = kappa.p_tilde;
  Prop32Report rep;
  for (int k = 1; k <= d; ++k) {
    for (int l = 1; l <= d; ++l) {
      if (k == l) continue;
      const double lhs = (alpha[k] - alpha[0]) / (alpha[k] - alpha[l]);
      const double rhs = prop32_pairwise_value(kappa, k, l);
      rep.pairwise = std::max(rep.pairwise, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
  }
  for (int i = 1; i <= d; ++i) {
    for (int k = i + 1; k <= d; ++k) {
      for (int l = k + 1; l <= d; ++l) {
        rep.triple_vacuous = false;
        CompensatedSum<double> acc;
        double scale = 0;
        for (int j = 0; j <= d; ++j) {
          const double t = pt[j] * U(i, j) * U(k, j) * U(l, j);
          acc += t;
          scale += std::abs(t);
        }
        rep.triple = std::max(rep.triple, std::abs(acc.value()) / std::max(1.0, scale));
      }
    }
  }
  return rep;
}

/// R(z; p~, beta) against prod_k (1 - z / alpha_k).
struct DualRReport {
  double sample_residual = 0;       // max over samples of the pointwise difference
  double root_residual = 0;         // max_k |R(alpha_k; p~, beta)|
  double coefficient_deviation = 0; // max coefficient difference / max(1, max |coefficient|)
};

inline DualRReport dual_R_residual(const GaudinModel& model, std::span<const double> z_samples) {
  DualRReport rep;
  const Polynomial dual = poly_R(model.kappa.p_tilde, model.beta);
  const Polynomial target = product_one_minus(model.alpha);
  for (double z : z_samples) rep.sample_residual = std::max(rep.sample_residual, std::abs(horner(dual, z) - horner(target, z)));
  for (std::size_t k = 1; k < model.alpha.size(); ++k) {
    rep.root_residual = std::max(rep.root_residual, std::abs(horner(dual, model.alpha[k])));
  }
  double scale = 1;
  for (double c : target) scale = std::max(scale, std::abs(c));
  for (std::size_t k = 0; k < dual.size(); ++k) {
    rep.coefficient_deviation = std::max(rep.coefficient_deviation, std::abs(dual[k] - target[k]) / scale);
  }
  return rep;
}

/// Largest violation of u_{k,j} u_{l,j} = w_{k,l} u_{k,j} + w_{l,k} u_{l,j},
/// w_{k,l} = alpha_k / (alpha_k - alpha_l), and of its dual with beta acting
/// on column indices. Entries are divided by max(1, |u_{k,j} u_{l,j}|).
inline double cocycle_residual(const GaudinModel& model) {
  const auto& U = model.kappa.U;
  const auto n = static_cast<int>(model.alpha.size());
  double worst = 0;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      const double w_kl = model.alpha[k] / (model.alpha[k] - model.alpha[l]);
      const double w_lk = model.alpha[l] / (model.alpha[l] - model.alpha[k]);
      const double wt_kl = model.beta[k] / (model.beta[k] - model.beta[l]);
      const double wt_lk = model.beta[l] / (model.beta[l] - model.beta[k]);
      for (int j = 0; j < n; ++j) {
        const double prod = U(k, j) * U(l, j);
        worst = std::max(worst, std::abs(prod - w_kl * U(k, j) - w_lk * U(l, j)) / std::max(1.0, std::abs(prod)));
        const double dprod = U(j, k) * U(j, l);
        worst = std::max(worst, std::abs(dprod - wt_kl * U(j, k) - wt_lk * U(j, l)) / std::max(1.0, std::abs(dprod)));
      }
    }
  }
  return worst;
}

}  // namespace mkg

#pragma once

// Named, tolerance-driven numerical checks of every identity the library
// relies on, aggregated into a VerificationReport.
//
// Residual conventions: operator identities are divided by the product of
// the operands' Frobenius norms; pointwise identities by the sum of absolute
// values of the terms that produced them; Gram-type identities by the
// geometric mean of the expected norms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mkg/error.hpp"
#include "mkg/gaudin.hpp"
#include "mkg/kappa.hpp"
#include "mkg/krawtchouk.hpp"
#include "mkg/lattice.hpp"
#include "mkg/operators.hpp"
#include "mkg/sparse.hpp"
#include "mkg/version.hpp"

namespace mkg {

struct Check {
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool passed = false;
  bool vacuous = false;
  std::string context;
  bool errored = false;  // a structural error stopped the computation
};

struct VerificationReport {
  std::vector<Check> checks;
  std::uint64_t seed = 0;
  std::string version = std::string(kVersion);

  bool any_errored() const {
    return std::any_of(checks.begin(), checks.end(), [](const Check& c) { return c.errored; });
  }
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
  const Check* find(std::string_view name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

inline Check make_check(std::string name, double residual, double tolerance, std::string context = {}) {
  Check c{std::move(name), residual, tolerance, false, false, std::move(context)};
  c.passed = residual <= tolerance;  // NaN fails
  return c;
}

inline Check vacuous_check(std::string name, double tolerance, std::string why) {
  return Check{std::move(name), 0.0, tolerance, true, true, "vacuous: " + std::move(why)};
}

inline Check failed_check(std::string name, double tolerance, std::string why) {
  return Check{std::move(name), std::numeric_limits<double>::infinity(), tolerance, false, false,
               "error: " + std::move(why), true};
}

struct Tolerances {
  double op = 1e-10;             // commutator and operator identities
  double hypergeometric = 1e-9;  // sums of the hypergeometric series
  double truncated = 1e-6;       // negative multinomial truncated sums
  double self_adjoint = 1e-12;
  double degree_fit = 1e-9;
  double independence_condition = 1e8;  // sigma_max / sigma_min
  double spectrum = 1e-8;
  double root = 1e-12;
  double eigen_agreement = 1e-12;
  double normalization = 1e-12;
};

/// L_{i,j} for all i < j, assembled once.
class LFamily {
 public:
  LFamily() = default;
  LFamily(std::span<const double> p, const LatticeGrid& grid) : d_(grid.dim()), p_(p.begin(), p.end()) {
    for (int i = 0; i <= d_; ++i) {
      for (int j = i + 1; j <= d_; ++j) ops_.push_back(build_L(i, j, p, grid));
    }
  }

  int dim() const { return d_; }
  std::span<const double> p() const { return p_; }
  const SparseOperator& operator()(int i, int j) const { return ops_[index(i, j)]; }
  void replace(int i, int j, SparseOperator op) { ops_[index(i, j)] = std::move(op); }

 private:
  std::size_t index(int i, int j) const {
    if (i == j) fail(ErrorKind::argument, "L_{i,i} is not defined");
    if (i > j) std::swap(i, j);
    // Row-major offset of (i, j) in the strict upper triangle of size d + 1.
    return static_cast<std::size_t>(i * (2 * (d_ + 1) - i - 1) / 2 + (j - i - 1));
  }

  int d_ = 0;
  std::vector<double> p_;
  std::vector<SparseOperator> ops_;
};

namespace detail {

inline double normalized_commutator(const SparseOperator& A, const SparseOperator& B) {
  const double scale = A.frobenius_norm() * B.frobenius_norm();
  const double r = commutator(A, B).frobenius_norm();
  return scale == 0 ? r : r / scale;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os.precision(6);
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

/// All 4-tuples of distinct indices in 0..d, or `cap` of them drawn with the
/// given generator when there are more.
inline std::vector<std::array<int, 4>> distinct_quadruples(int d, std::size_t cap, std::mt19937_64& rng,
                                                           bool ordered) {
  std::vector<std::array<int, 4>> all;
  for (int a = 0; a <= d; ++a)
    for (int b = 0; b <= d; ++b)
      for (int c = 0; c <= d; ++c)
        for (int e = 0; e <= d; ++e) {
          if (a == b || a == c || a == e || b == c || b == e || c == e) continue;
          if (!ordered && !(a < b && b < c && c < e)) continue;
          all.push_back({a, b, c, e});
        }
  if (all.size() <= cap) return all;
  std::vector<std::array<int, 4>> out;
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  for (std::size_t k = 0; k < cap; ++k) out.push_back(all[pick(rng)]);
  return out;
}

/// Design matrix of the monomials x^m, |m| <= k, in the scaled variables x / N.
inline Eigen::MatrixXd monomial_design(const LatticeGrid& grid, int k) {
  std::vector<std::vector<int>> exps;
  const LatticeGrid degrees(grid.dim(), std::max(k, 1));
  for (std::size_t r = 0; r < degrees.grade_begin(k + 1); ++r) {
    const auto e = degrees.at(r);
    exps.emplace_back(e.begin(), e.end());
  }
  Eigen::MatrixXd V(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(exps.size()));
  const double N = grid.bound();
  for (std::size_t r = 0; r < grid.size(); ++r) {
    const auto x = grid.at(r);
    for (std::size_t c = 0; c < exps.size(); ++c) {
      double v = 1;
      for (std::size_t i = 0; i < x.size(); ++i) v *= std::pow(x[i] / N, exps[c][i]);
      V(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return V;
}

/// Norm of the component of v orthogonal to the column span of V, divided by
/// `scale` (the operator norm times the input norm).
inline double fit_residual(const Eigen::HouseholderQR<Eigen::MatrixXd>& qr, const Eigen::VectorXd& v, double scale) {
  if (scale == 0) return 0;
  Eigen::VectorXd qtv = qr.householderQ().adjoint() * v;
  const Eigen::Index rank = qr.matrixQR().cols();
  return qtv.tail(qtv.size() - rank).norm() / scale;
}

/// max_r |lhs_r - scale (B f)_r| / max_r (|lhs_r| + (|scale B| |f|)_r): the
/// pointwise defect measured against the largest term magnitude of the vector.
inline double pointwise_operator_residual(const SparseOperator& B, double scale, std::span<const double> f,
                                          std::span<const double> lhs, std::size_t& worst_row) {
  const auto Bf = B.apply(f);
  double diff = 0, mag = 0;
  for (std::size_t r = 0; r < f.size(); ++r) {
    double m = std::abs(lhs[r]);
    const auto cs = B.row_cols(r);
    const auto vs = B.row_vals(r);
    for (std::size_t k = 0; k < cs.size(); ++k) m += std::abs(scale * vs[k] * f[cs[k]]);
    mag = std::max(mag, m);
    const double e = std::abs(lhs[r] - scale * Bf[r]);
    if (e >= diff) {
      diff = e;
      worst_row = r;
    }
  }
  return mag > 0 ? diff / mag : diff;
}

/// Accumulates the same ratio for values produced one point at a time.
struct DefectRatio {
  double diff = 0, mag = 0;
  void add(double lhs, double rhs, double term_mag) {
    diff = std::max(diff, std::abs(lhs - rhs));
    mag = std::max(mag, term_mag);
  }
  double value() const { return mag > 0 ? diff / mag : diff; }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Lattice

inline Check check_weight_normalization(const ModelParams& params, const LatticeGrid& grid, double tol) {
  const auto w = grid_weights(params, grid);
  const double total = compensated_sum<double>(w);
  double minimum = *std::min_element(w.begin(), w.end());
  const double res = std::abs(total - 1.0);
  std::ostringstream ctx;
  ctx << "sum W = " << total << ", min W = " << minimum;
  auto c = make_check("lattice_normalization", res, tol, ctx.str());
  if (!(minimum > 0)) c.passed = false;
  return c;
}

// ---------------------------------------------------------------------------
// Kohno-Drinfeld relations and other algebraic identities

/// [L_{i,j}, L_{k,l}] = 0 for distinct i, j, k, l and [L_{i,j}, L_{i,k} + L_{j,k}] = 0
/// for distinct i, j, k. Families with more than `sample` tuples are sampled.
inline std::vector<Check> check_kd_relations(const LFamily& L, double tol, std::mt19937_64& rng,
                                             std::size_t sample = 50) {
  const int d = L.dim();
  std::vector<Check> out;

  std::vector<std::array<int, 4>> disjoint;
  for (int i = 0; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j)
      for (int k = i + 1; k <= d; ++k)
        for (int l = k + 1; l <= d; ++l)
          if (k != j && l != j) disjoint.push_back({i, j, k, l});
  if (disjoint.empty()) {
    out.push_back(vacuous_check("kd_disjoint_commute", tol, "needs four distinct indices (d >= 3)"));
  } else {
    if (disjoint.size() > sample) {
      std::vector<std::array<int, 4>> picked;
      std::uniform_int_distribution<std::size_t> pick(0, disjoint.size() - 1);
      for (std::size_t s = 0; s < sample; ++s) picked.push_back(disjoint[pick(rng)]);
      disjoint = std::move(picked);
    }
    double worst = 0;
    std::string where;
    for (const auto& t : disjoint) {
      const double r = detail::normalized_commutator(L(t[0], t[1]), L(t[2], t[3]));
      if (r >= worst) {
        worst = r;
        where = "[L" + std::to_string(t[0]) + std::to_string(t[1]) + ",L" + std::to_string(t[2]) + std::to_string(t[3]) + "]";
      }
    }
    out.push_back(make_check("kd_disjoint_commute", worst, tol,
                             std::to_string(disjoint.size()) + " pairs, worst " + where));
  }

  std::vector<std::array<int, 3>> triples;
  for (int i = 0; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j)
      for (int k = 0; k <= d; ++k)
        if (k != i && k != j) triples.push_back({i, j, k});
  if (triples.empty()) {
    out.push_back(vacuous_check("kd_triple_commute", tol, "needs three distinct indices (d >= 2)"));
  } else {
    if (triples.size() > sample) {
      std::vector<std::array<int, 3>> picked;
      std::uniform_int_distribution<std::size_t> pick(0, triples.size() - 1);
      for (std::size_t s = 0; s < sample; ++s) picked.push_back(triples[pick(rng)]);
      triples = std::move(picked);
    }
    double worst = 0;
    std::string where;
    for (const auto& t : triples) {
      const double r = detail::normalized_commutator(L(t[0], t[1]), L(t[0], t[2]) + L(t[1], t[2]));
      if (r >= worst) {
        worst = r;
        where = "i,j,k=" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]);
      }
    }
    out.push_back(make_check("kd_triple_commute", worst, tol,
                             std::to_string(triples.size()) + " triples, worst " + where));
  }
  return out;
}

inline Check check_self_adjointness(const LFamily& L, std::span<const double> weights, double tol) {
  double worst = 0;
  const int d = L.dim();
  for (int i = 0; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) worst = std::max(worst, symmetrized_residual(L(i, j), weights));
  return make_check("self_adjointness", worst, tol, std::to_string(d * (d + 1) / 2) + " operators");
}

/// Each L_{i,j} maps polynomials of total degree <= k into themselves: the
/// image of every monomial x^m, |m| <= N, is fitted against the monomials of
/// degree <= |m|. The residual is relative to ||L||_inf ||x^m||_2.
inline Check check_degree_preservation(const LFamily& L, const LatticeGrid& grid, double tol) {
  const int d = L.dim();
  double worst = 0;
  std::string where;
  const LatticeGrid exps(grid.dim(), grid.bound());
  for (int k = 0; k <= grid.bound(); ++k) {
    const Eigen::MatrixXd V = detail::monomial_design(grid, k);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    for (std::size_t e = exps.grade_begin(k); e < exps.grade_begin(k + 1); ++e) {
      const auto m = exps.at(e);
      std::vector<double> f(grid.size());
      for (std::size_t r = 0; r < grid.size(); ++r) {
        double v = 1;
        const auto x = grid.at(r);
        for (std::size_t t = 0; t < m.size(); ++t) v *= std::pow(x[t] / static_cast<double>(grid.bound()), m[t]);
        f[r] = v;
      }
      const double fnorm = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size())).norm();
      for (int i = 0; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) {
          const auto g = L(i, j).apply(f);
          const double scale = L(i, j).inf_norm() * fnorm;
          const double r = detail::fit_residual(qr, Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size())), scale);
          if (r >= worst) {
            worst = r;
            where = "L" + std::to_string(i) + std::to_string(j) + " on x^" + exps.unrank(e).to_string();
          }
        }
    }
  }
  return make_check("degree_preservation", worst, tol, "k <= " + std::to_string(grid.bound()) + ", worst " + where);
}

/// sigma_max / sigma_min of the matrix whose columns are the stacked images
/// of {1, x_1, ..., x_d} under each operator.
inline double independence_condition(std::span<const SparseOperator> ops, const LatticeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const int d = grid.dim();
  Eigen::MatrixXd M(n * (d + 1), static_cast<Eigen::Index>(ops.size()));
  for (std::size_t c = 0; c < ops.size(); ++c) {
    for (int b = 0; b <= d; ++b) {
      std::vector<double> f(grid.size());
      for (std::size_t r = 0; r < grid.size(); ++r) f[r] = b == 0 ? 1.0 : grid.at(r)[static_cast<std::size_t>(b - 1)];
      const auto g = ops[c].apply(f);
      for (Eigen::Index r = 0; r < n; ++r) M(b * n + r, static_cast<Eigen::Index>(c)) = g[static_cast<std::size_t>(r)];
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  const double smin = s.minCoeff(), smax = s.maxCoeff();
  return smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
}

inline Check check_linear_independence(const LFamily& L, const LatticeGrid& grid, double max_condition) {
  std::vector<SparseOperator> ops;
  for (int i = 0; i <= L.dim(); ++i)
    for (int j = i + 1; j <= L.dim(); ++j) ops.push_back(L(i, j));
  const double cond = independence_condition(ops, grid);
  std::ostringstream ctx;
  ctx << ops.size() << " operators on span{1,x}, sigma_min/sigma_max = " << 1.0 / cond;
  return make_check("linear_independence", cond, max_condition, ctx.str());
}

/// p_k p_m L_{i,j} = [L_{i,k}, [L_{k,m}, L_{j,m}]] + p_j p_k L_{i,m} + p_i p_m L_{j,k} - p_i p_j L_{k,m}
/// for distinct i, j, k, m.
inline Check check_cubic_relation(const LFamily& L, double tol, std::mt19937_64& rng, std::size_t sample = 50) {
  if (L.dim() < 3) return vacuous_check("cubic_relation", tol, "needs four distinct indices (d >= 3)");
  const auto p = L.p();
  double worst = 0;
  std::string where;
  const auto tuples = detail::distinct_quadruples(L.dim(), sample, rng, true);
  for (const auto& t : tuples) {
    const int i = t[0], j = t[1], k = t[2], m = t[3];
    const auto& Lik = L(i, k);
    const auto& Lkm = L(k, m);
    const auto& Ljm = L(j, m);
    const SparseOperator lhs = (p[k] * p[m]) * L(i, j);
    const SparseOperator rhs = commutator(Lik, commutator(Lkm, Ljm)) + (p[j] * p[k]) * L(i, m) +
                               (p[i] * p[m]) * L(j, k) - (p[i] * p[j]) * L(k, m);
    const double scale = Lik.frobenius_norm() * Lkm.frobenius_norm() * Ljm.frobenius_norm() + lhs.frobenius_norm();
    const double r = (lhs - rhs).frobenius_norm() / scale;
    if (r >= worst) {
      worst = r;
      where = "(i,j,k,m)=(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + "," + std::to_string(m) + ")";
    }
  }
  return make_check("cubic_relation", worst, tol, std::to_string(tuples.size()) + " tuples, worst " + where);
}

/// p_a [L_{b,c}, L_{c,e}] - p_b [L_{a,c}, L_{c,e}] + p_c [L_{a,b}, L_{b,e}] - p_e [L_{a,b}, L_{b,c}] = 0
/// for every a < b < c < e.
inline Check check_bracket_dependency(const LFamily& L, double tol, std::mt19937_64& rng, std::size_t sample = 50) {
  if (L.dim() < 3) return vacuous_check("bracket_dependency", tol, "needs four distinct indices (d >= 3)");
  const auto p = L.p();
  double worst = 0;
  for (const auto& t : detail::distinct_quadruples(L.dim(), sample, rng, false)) {
    const int a = t[0], b = t[1], c = t[2], e = t[3];
    const SparseOperator t1 = commutator(L(b, c), L(c, e));
    const SparseOperator t2 = commutator(L(a, c), L(c, e));
    const SparseOperator t3 = commutator(L(a, b), L(b, e));
    const SparseOperator t4 = commutator(L(a, b), L(b, c));
    const SparseOperator sum = axpby(p[a], t1, -p[b], t2) + axpby(p[c], t3, -p[e], t4);
    const double scale = p[a] * t1.frobenius_norm() + p[b] * t2.frobenius_norm() + p[c] * t3.frobenius_norm() +
                         p[e] * t4.frobenius_norm();
    worst = std::max(worst, scale == 0 ? sum.frobenius_norm() : sum.frobenius_norm() / scale);
  }
  return make_check("bracket_dependency", worst, tol);
}

/// H commutes with every L_{i,j}.
inline Check check_hamiltonian_central(const LFamily& L, const LatticeGrid& grid, double tol) {
  const SparseOperator H = build_hamiltonian(L.p(), grid);
  double worst = 0;
  for (int i = 0; i <= L.dim(); ++i)
    for (int j = i + 1; j <= L.dim(); ++j) worst = std::max(worst, detail::normalized_commutator(H, L(i, j)));
  return make_check("hamiltonian_central", worst, tol);
}

inline Check check_jucys_murphy(const ModelParams& params, const LatticeGrid& grid, double tol) {
  std::vector<SparseOperator> jm;
  for (int k = 1; k <= grid.dim(); ++k) jm.push_back(build_jucys_murphy(k, params, grid));
  double worst = 0;
  for (std::size_t a = 0; a < jm.size(); ++a)
    for (std::size_t b = a + 1; b < jm.size(); ++b) worst = std::max(worst, detail::normalized_commutator(jm[a], jm[b]));
  SparseOperator total(grid.size());
  for (const auto& op : jm) total = total + op;
  const SparseOperator H = build_hamiltonian(params, grid);
  const double sum_res = (total - H).frobenius_norm() / H.frobenius_norm();
  if (jm.size() < 2 && sum_res == 0) {
    return Check{"jucys_murphy_commute", 0.0, tol, true, true, "vacuous: single element; sum equals H"};
  }
  return make_check("jucys_murphy_commute", std::max(worst, sum_res), tol, "pairwise commutators and sum = H");
}

/// Eigenvalues of H are -k (0 <= k <= N) with multiplicity binomial(k+d-1, d-1).
inline Check check_hamiltonian_spectrum(std::span<const double> p, const LatticeGrid& grid, double tol) {
  const SparseOperator H = build_hamiltonian(p, grid);
  const auto w = grid_weights(ModelParams::multinomial(std::vector<double>(p.begin(), p.end()), grid.bound()), grid);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized_dense(H, w), Eigen::EigenvaluesOnly);
  std::vector<double> expected;
  for (int k = grid.bound(); k >= 0; --k) {
    const std::size_t mult = grid.grade_begin(k + 1) - grid.grade_begin(k);
    expected.insert(expected.end(), mult, -static_cast<double>(k));
  }
  double worst = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    worst = std::max(worst, std::abs(es.eigenvalues()[k] - expected[static_cast<std::size_t>(k)]));
  }
  return make_check("hamiltonian_spectrum", worst, tol, "eigenvalues {0,-1,...,-N} with graded multiplicities");
}

// ---------------------------------------------------------------------------
// Krawtchouk polynomials for a generic kappa

inline Check check_kappa_validity(const KrawtchoukParam& kappa, double tol, std::string name = "random_kappa_validity") {
  const auto r = validate(kappa, tol);
  std::ostringstream ctx;
  ctx << "matrix " << r.matrix << ", sum p~ " << r.sum_p_tilde << ", border " << r.border;
  return make_check(std::move(name), r.max(), tol, ctx.str());
}

inline Check check_dual_gram(const KrawtchoukParam& kappa, double tol) {
  return make_check("dual_gram_identity", dual_gram_residual(kappa), tol, "sum_j p~_j u_ij u_kj = delta_ik p_0/p_k");
}

/// n_i P_n(x) = (p~_i / p_0) [sum_{k<l} u_{k,i} u_{l,i} L_{k,l}] P_n(x), all i, n, x.
inline Check check_bispectral_x(const KrawtchoukParam& kappa, const BasisTable& table, double tol) {
  const auto& grid = table.grid;
  const int d = kappa.dim();
  double worst = 0;
  std::string where;
  for (int i = 1; i <= d; ++i) {
    const SparseOperator B = build_pair_combination([&](int k, int l) { return kappa.U(k, i) * kappa.U(l, i); },
                                                    kappa.p, grid);
    const double scale = kappa.p_tilde[static_cast<std::size_t>(i)] / kappa.p[0];
    for (std::size_t n = 0; n < grid.size(); ++n) {
      const auto row = table.row(n);
      std::vector<double> lhs(row.size());
      const double ni = grid.at(n)[static_cast<std::size_t>(i - 1)];
      for (std::size_t x = 0; x < row.size(); ++x) lhs[x] = ni * row[x];
      std::size_t wx = 0;
      const double r = detail::pointwise_operator_residual(B, scale, row, lhs, wx);
      if (r >= worst) {
        worst = r;
        where = "i=" + std::to_string(i) + " n=" + grid.unrank(n).to_string() + " at x=" + grid.unrank(wx).to_string();
      }
    }
  }
  return make_check("bispectral_x", worst, tol, "worst " + where);
}

/// x_i P_n(x) = (p_i / p_0) [sum_{k<l} u_{i,k} u_{i,l} L~_{k,l}] P_n(x), acting on n.
inline Check check_bispectral_n(const KrawtchoukParam& kappa, const BasisTable& table, double tol) {
  const auto& grid = table.grid;
  const int d = kappa.dim();
  double worst = 0;
  std::string where;
  for (int i = 1; i <= d; ++i) {
    const SparseOperator B = build_pair_combination([&](int k, int l) { return kappa.U(i, k) * kappa.U(i, l); },
                                                    kappa.p_tilde, grid);
    const double scale = kappa.p[static_cast<std::size_t>(i)] / kappa.p[0];
    for (std::size_t x = 0; x < grid.size(); ++x) {
      const auto col = table.column(x);
      std::vector<double> lhs(col.size());
      const double xi = grid.at(x)[static_cast<std::size_t>(i - 1)];
      for (std::size_t n = 0; n < col.size(); ++n) lhs[n] = xi * col[n];
      std::size_t wn = 0;
      const double r = detail::pointwise_operator_residual(B, scale, col, lhs, wn);
      if (r >= worst) {
        worst = r;
        where = "i=" + std::to_string(i) + " x=" + grid.unrank(x).to_string() + " at n=" + grid.unrank(wn).to_string();
      }
    }
  }
  return make_check("bispectral_n", worst, tol, "worst " + where);
}

/// |<P_n, P_m> - delta_{nm} p_0^N / W_{p~,N}(n)| / sqrt(h_n h_m).
inline double orthogonality_residual(const KrawtchoukParam& kappa, const BasisTable& table, std::string* where = nullptr) {
  const auto& grid = table.grid;
  const auto params = ModelParams::multinomial(kappa.p, grid.bound(), 1e-10);
  const Eigen::MatrixXd G = gram_matrix(table, grid_weights(params, grid));
  std::vector<double> h(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) h[n] = norm_sq(grid.unrank(n), kappa, grid.bound());
  double worst = 0;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = 0; b < grid.size(); ++b) {
      const double target = a == b ? h[a] : 0.0;
      const double r = std::abs(G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) - target) / std::sqrt(h[a] * h[b]);
      if (r >= worst) {
        worst = r;
        if (where) *where = "n=" + grid.unrank(a).to_string() + " m=" + grid.unrank(b).to_string();
      }
    }
  }
  return worst;
}

inline Check check_orthogonality(const KrawtchoukParam& kappa, const BasisTable& table, double tol) {
  std::string where;
  const double r = orthogonality_residual(kappa, table, &where);
  return make_check("orthogonality", r, tol, "worst " + where);
}

/// Entrywise |T(kappa)^T - T(involution(kappa))| / max(1, |entry|), plus
/// exact idempotence of the involution and validity of its image.
inline Check check_duality(const KrawtchoukParam& kappa, const BasisTable& table, double tol) {
  const KrawtchoukParam dual = involution(kappa);
  const bool idempotent = involution(dual) == kappa;
  const bool valid = validate(dual).passed();
  const BasisTable dt = basis_table(dual, table.grid, 1);
  double worst = 0;
  for (Eigen::Index a = 0; a < table.values.rows(); ++a) {
    for (Eigen::Index b = 0; b < table.values.cols(); ++b) {
      const double u = table.values(a, b), v = dt.values(b, a);
      worst = std::max(worst, std::abs(u - v) / std::max({1.0, std::abs(u), std::abs(v)}));
    }
  }
  auto c = make_check("duality_transpose", worst, tol,
                      std::string("involution ") + (idempotent ? "idempotent" : "NOT idempotent") + ", image " +
                          (valid ? "valid" : "INVALID"));
  if (!idempotent || !valid) c.passed = false;
  return c;
}

// ---------------------------------------------------------------------------
// Gaudin model

/// Spectral equations of the solved model: G(alpha,p,N;e_c) P_n = mu_n P_n in
/// x, G~(beta,p~,N;e_c) P_n = mu_x P_n in n, for every coordinate vector e_c,
/// and pairwise commutativity of the d + 1 Gaudin operators.
inline std::vector<Check> check_gaudin_diagonalization(const GaudinModel& model, const BasisTable& table, double tol) {
  const auto& grid = table.grid;
  const int d = model.dim();
  std::vector<SparseOperator> G, Gd;
  double worst_x = 0, worst_n = 0;
  std::string where_x, where_n;
  for (int c = 0; c <= d; ++c) {
    std::vector<double> zeta(static_cast<std::size_t>(d + 1), 0.0);
    zeta[static_cast<std::size_t>(c)] = 1.0;
    G.push_back(build_gaudin(model.alpha, zeta, model.p, grid));
    Gd.push_back(build_gaudin(model.beta, zeta, model.kappa.p_tilde, grid));
    const double gnorm = G.back().inf_norm(), gdnorm = Gd.back().inf_norm();
    for (std::size_t n = 0; n < grid.size(); ++n) {
      const auto row = table.row(n);
      const double mu = eigenvalue_mu(grid.unrank(n), model, zeta);
      const auto v = G.back().apply(row);
      double diff = 0, pmax = 0;
      for (std::size_t x = 0; x < row.size(); ++x) {
        diff = std::max(diff, std::abs(v[x] - mu * row[x]));
        pmax = std::max(pmax, std::abs(row[x]));
      }
      const double r = diff / (std::max(gnorm, std::abs(mu)) * pmax);
      if (r >= worst_x) {
        worst_x = r;
        where_x = "zeta=e" + std::to_string(c) + " n=" + grid.unrank(n).to_string();
      }
    }
    for (std::size_t x = 0; x < grid.size(); ++x) {
      const auto col = table.column(x);
      const double mu = dual_eigenvalue_mu(grid.unrank(x), model, zeta);
      const auto v = Gd.back().apply(col);
      double diff = 0, pmax = 0;
      for (std::size_t n = 0; n < col.size(); ++n) {
        diff = std::max(diff, std::abs(v[n] - mu * col[n]));
        pmax = std::max(pmax, std::abs(col[n]));
      }
      const double r = diff / (std::max(gdnorm, std::abs(mu)) * pmax);
      if (r >= worst_n) {
        worst_n = r;
        where_n = "zeta=e" + std::to_string(c) + " x=" + grid.unrank(x).to_string();
      }
    }
  }
  double worst_c = 0;
  for (std::size_t a = 0; a < G.size(); ++a)
    for (std::size_t b = a + 1; b < G.size(); ++b) {
      worst_c = std::max(worst_c, detail::normalized_commutator(G[a], G[b]));
      worst_c = std::max(worst_c, detail::normalized_commutator(Gd[a], Gd[b]));
    }
  return {make_check("gaudin_spectral_x", worst_x, tol, "worst " + where_x),
          make_check("gaudin_spectral_n", worst_n, tol, "worst " + where_n),
          make_check("gaudin_commutators", worst_c, tol, std::to_string(d + 1) + " operators per side")};
}

/// lambda_n from the generic kappa formula equals mu_n of the solved model,
/// relative to the sum of absolute terms.
inline Check check_eigenvalue_agreement(const GaudinModel& model, const LatticeGrid& grid, double tol,
                                        std::mt19937_64& rng, int random_zetas = 4) {
  const int d = model.dim();
  std::vector<std::vector<double>> zetas;
  for (int c = 0; c <= d; ++c) {
    std::vector<double> z(static_cast<std::size_t>(d + 1), 0.0);
    z[static_cast<std::size_t>(c)] = 1.0;
    zetas.push_back(z);
  }
  std::normal_distribution<double> gauss;
  for (int r = 0; r < random_zetas; ++r) {
    std::vector<double> z(static_cast<std::size_t>(d + 1));
    for (auto& v : z) v = gauss(rng);
    zetas.push_back(z);
  }
  double worst = 0;
  for (const auto& z : zetas) {
    for (std::size_t n = 0; n < grid.size(); ++n) {
      const auto idx = grid.unrank(n);
      const double mu = eigenvalue_mu(idx, model, z);
      const double lam = eigenvalue_lambda(idx, model.kappa, model.alpha, z);
      double scale = 0;
      for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) {
          scale += std::abs((z[static_cast<std::size_t>(i)] - z[0]) * model.p[static_cast<std::size_t>(i)] *
                            idx[static_cast<std::size_t>(j - 1)] * model.beta[static_cast<std::size_t>(j)] /
                            (1.0 + model.alpha[static_cast<std::size_t>(i)] * model.beta[static_cast<std::size_t>(j)]));
        }
      if (scale > 0) worst = std::max(worst, std::abs(mu - lam) / scale);
    }
  }
  return make_check("eigenvalue_agreement", worst, tol, std::to_string(zetas.size()) + " zeta vectors");
}

inline std::vector<Check> check_prop32_entries(const KrawtchoukParam& kappa, std::span<const double> alpha, double tol) {
  const auto rep = check_prop32(kappa, alpha);
  std::vector<Check> out{make_check("prop32_pairwise", rep.pairwise, tol)};
  if (rep.triple_vacuous) {
    out.push_back(vacuous_check("prop32_triple", tol, "no distinct triple in 1..d (d <= 2)"));
  } else {
    out.push_back(make_check("prop32_triple", rep.triple, tol));
  }
  return out;
}

inline Check check_dual_R(const GaudinModel& model, double tol) {
  std::vector<double> samples{0.0, 0.5, -0.5, 1.5, -2.0};
  for (std::size_t k = 1; k < model.alpha.size(); ++k) samples.push_back(0.5 * model.alpha[k]);
  const auto rep = dual_R_residual(model, samples);
  std::ostringstream ctx;
  ctx << "coefficients " << rep.coefficient_deviation << ", |R(alpha_k)| " << rep.root_residual << ", samples "
      << rep.sample_residual;
  return make_check("dual_R_identity", std::max(rep.coefficient_deviation, rep.root_residual), tol, ctx.str());
}

inline Check check_cocycle(const GaudinModel& model, double tol) {
  return make_check("cocycle_identity", cocycle_residual(model), tol, "ansatz columns in alpha and beta");
}

// ---------------------------------------------------------------------------
// Negative multinomial regime (pointwise and truncated checks)

struct NegativeSetup {
  ModelParams params;          // formal p, N = -s
  KrawtchoukParam kappa;       // random point for the formal p
  int pointwise_radius = 6;    // |n|, |x| <= radius for the bispectral checks
  int truncation_radius = 40;  // |x| <= R for truncated orthogonality
  int orthogonality_degree = 2;
};

inline Check check_negative_bispectral_x(const NegativeSetup& s, double tol) {
  const auto& kappa = s.kappa;
  const int d = kappa.dim();
  const HypergeometricSum P(kappa.U, s.params.N, false);
  const LatticeGrid box(d, s.pointwise_radius);
  double worst = 0;
  std::string where;
  for (std::size_t a = 0; a < box.size(); ++a) {
    const auto n = box.unrank(a);
    auto f = [&](const MultiIndex& x) { return P(n.entries(), x.entries()); };
    for (int i = 1; i <= d; ++i) {
      detail::DefectRatio ratio;
      for (std::size_t b = 0; b < box.size(); ++b) {
        const auto x = box.unrank(b);
        const double lhs = n[static_cast<std::size_t>(i - 1)] * f(x);
        CompensatedSum<double> rhs;
        double mag = std::abs(lhs);
        for (int k = 0; k <= d; ++k)
          for (int l = k + 1; l <= d; ++l) {
            const double c = kappa.p_tilde[static_cast<std::size_t>(i)] / kappa.p[0] * kappa.U(k, i) * kappa.U(l, i);
            const double v = c * apply_L_at(k, l, kappa.p, s.params.N, x, f);
            rhs += v;
            mag += std::abs(v);
          }
        ratio.add(lhs, rhs.value(), mag);
      }
      if (ratio.value() >= worst) {
        worst = ratio.value();
        where = "i=" + std::to_string(i) + " n=" + n.to_string();
      }
    }
  }
  return make_check("negative_bispectral_x", worst, tol, "|n|,|x| <= " + std::to_string(s.pointwise_radius) + ", worst " + where);
}

inline Check check_negative_bispectral_n(const NegativeSetup& s, double tol) {
  const auto& kappa = s.kappa;
  const int d = kappa.dim();
  const HypergeometricSum P(kappa.U, s.params.N, false);
  const LatticeGrid box(d, s.pointwise_radius);
  double worst = 0;
  std::string where;
  for (std::size_t b = 0; b < box.size(); ++b) {
    const auto x = box.unrank(b);
    auto f = [&](const MultiIndex& n) { return P(n.entries(), x.entries()); };
    for (int i = 1; i <= d; ++i) {
      detail::DefectRatio ratio;
      for (std::size_t a = 0; a < box.size(); ++a) {
        const auto n = box.unrank(a);
        const double lhs = x[static_cast<std::size_t>(i - 1)] * f(n);
        CompensatedSum<double> rhs;
        double mag = std::abs(lhs);
        for (int k = 0; k <= d; ++k)
          for (int l = k + 1; l <= d; ++l) {
            const double c = kappa.p[static_cast<std::size_t>(i)] / kappa.p[0] * kappa.U(i, k) * kappa.U(i, l);
            const double v = c * apply_L_at(k, l, kappa.p_tilde, s.params.N, n, f);
            rhs += v;
            mag += std::abs(v);
          }
        ratio.add(lhs, rhs.value(), mag);
      }
      if (ratio.value() >= worst) {
        worst = ratio.value();
        where = "i=" + std::to_string(i) + " x=" + x.to_string();
      }
    }
  }
  return make_check("negative_bispectral_n", worst, tol, "|n|,|x| <= " + std::to_string(s.pointwise_radius) + ", worst " + where);
}

/// Truncated Gram matrix over |x| <= R against the formal norms, for |n|, |m|
/// up to the configured degree.
inline Check check_negative_orthogonality(const NegativeSetup& s, double tol) {
  const auto& kappa = s.kappa;
  const int d = kappa.dim();
  const HypergeometricSum P(kappa.U, s.params.N, false);
  const LatticeGrid xs(d, s.truncation_radius);
  const LatticeGrid ns(d, std::max(1, s.orthogonality_degree));
  const std::size_t count = ns.grade_begin(s.orthogonality_degree + 1);
  const auto w = grid_weights(s.params, xs);
  std::vector<std::vector<double>> vals(count, std::vector<double>(xs.size()));
  std::vector<double> h(count);
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t x = 0; x < xs.size(); ++x) vals[a][x] = P(ns.at(a), xs.at(x));
    h[a] = formal_norm_sq(ns.unrank(a), kappa, s.params.N);
  }
  double worst = 0, mass = compensated_sum<double>(w);
  std::string where;
  bool positive = true;
  for (std::size_t a = 0; a < count; ++a) {
    if (!(h[a] > 0)) positive = false;
    for (std::size_t b = 0; b < count; ++b) {
      const double g = mkg::inner_product(vals[a], vals[b], w);
      const double target = a == b ? h[a] : 0.0;
      const double r = std::abs(g - target) / std::sqrt(std::abs(h[a] * h[b]));
      if (r >= worst) {
        worst = r;
        where = "n=" + ns.unrank(a).to_string() + " m=" + ns.unrank(b).to_string();
      }
    }
  }
  std::ostringstream ctx;
  ctx << "R=" << s.truncation_radius << ", |n| <= " << s.orthogonality_degree << ", weight mass " << mass << ", worst " << where;
  auto c = make_check("negative_orthogonality", std::max(worst, std::abs(mass - 1.0)), tol, ctx.str());
  if (!positive) {
    c.passed = false;
    c.context += " (non-positive formal norm)";
  }
  return c;
}

// ---------------------------------------------------------------------------
// Suite

enum class SuiteMode { multinomial, negative, all };

struct SuiteConfig {
  // Multinomial part.
  std::vector<double> p;
  std::vector<double> alpha;  // d + 1 entries, alpha_0 = 0
  int N = 4;
  // Negative multinomial part.
  std::vector<double> c;
  double s = 0;
  int truncation_radius = 40;
  int pointwise_radius = 6;

  std::uint64_t seed = 0;
  SuiteMode mode = SuiteMode::multinomial;
  Tolerances tol;
  /// Solved model to verify instead of solving (p, alpha) in process.
  std::optional<GaudinModel> model;
  /// Routes a different kappa into the Gaudin-condition checks.
  std::optional<KrawtchoukParam> prop32_kappa;
  /// Basis-table checks are skipped above this lattice size.
  std::size_t dense_limit = 2000;
};

inline const std::vector<std::string>& multinomial_manifest() {
  static const std::vector<std::string> names{
      "lattice_normalization", "kd_disjoint_commute",  "kd_triple_commute",    "self_adjointness",
      "degree_preservation",   "linear_independence",  "cubic_relation",       "bracket_dependency",
      "hamiltonian_central",   "jucys_murphy_commute", "random_kappa_validity", "dual_gram_identity",
      "bispectral_x",          "bispectral_n",         "orthogonality",        "duality_transpose",
      "gaudin_solve",          "cocycle_identity",     "prop32_pairwise",      "prop32_triple",
      "gaudin_spectral_x",     "gaudin_spectral_n",    "gaudin_commutators",   "eigenvalue_agreement",
      "dual_R_identity",       "hamiltonian_spectrum"};
  return names;
}

inline const std::vector<std::string>& negative_manifest() {
  static const std::vector<std::string> names{"negative_weight_normalization", "negative_kappa_validity",
                                              "negative_bispectral_x", "negative_bispectral_n",
                                              "negative_orthogonality"};
  return names;
}

inline std::vector<std::string> suite_manifest(SuiteMode mode) {
  std::vector<std::string> out;
  if (mode != SuiteMode::negative) out = multinomial_manifest();
  if (mode != SuiteMode::multinomial) {
    const auto& neg = negative_manifest();
    out.insert(out.end(), neg.begin(), neg.end());
  }
  return out;
}

namespace detail {

/// Runs `body`, turning library errors into a failed entry per expected name.
inline void guarded(std::vector<Check>& out, const std::vector<std::string>& names, double tol,
                    const std::function<std::vector<Check>()>& body) {
  try {
    auto checks = body();
    out.insert(out.end(), checks.begin(), checks.end());
  } catch (const std::exception& e) {
    for (const auto& n : names) out.push_back(failed_check(n, tol, e.what()));
  }
}

inline void run_multinomial(const SuiteConfig& cfg, std::mt19937_64& rng, std::vector<Check>& out) {
  const auto& tol = cfg.tol;
  const int d = static_cast<int>(cfg.p.size()) - 1;
  std::optional<ModelParams> params;
  std::optional<LatticeGrid> grid;
  std::optional<LFamily> L;
  try {
    params = ModelParams::multinomial(cfg.p, cfg.N);
    grid.emplace(d, cfg.N);
    L.emplace(params->p, *grid);
  } catch (const std::exception& e) {
    for (const auto& n : multinomial_manifest()) out.push_back(failed_check(n, 0.0, e.what()));
    return;
  }
  const bool dense_ok = grid->size() <= cfg.dense_limit;

  guarded(out, {"lattice_normalization"}, tol.normalization,
          [&] { return std::vector{check_weight_normalization(*params, *grid, tol.normalization)}; });
  guarded(out, {"kd_disjoint_commute", "kd_triple_commute"}, tol.op,
          [&] { return check_kd_relations(*L, tol.op, rng); });
  const auto weights = grid_weights(*params, *grid);
  guarded(out, {"self_adjointness"}, tol.self_adjoint,
          [&] { return std::vector{check_self_adjointness(*L, weights, tol.self_adjoint)}; });
  guarded(out, {"degree_preservation"}, tol.degree_fit, [&] {
    if (!dense_ok) return std::vector{vacuous_check("degree_preservation", tol.degree_fit, "lattice above dense limit")};
    return std::vector{check_degree_preservation(*L, *grid, tol.degree_fit)};
  });
  guarded(out, {"linear_independence"}, tol.independence_condition,
          [&] { return std::vector{check_linear_independence(*L, *grid, tol.independence_condition)}; });
  guarded(out, {"cubic_relation"}, tol.op, [&] { return std::vector{check_cubic_relation(*L, tol.op, rng)}; });
  guarded(out, {"bracket_dependency"}, tol.op, [&] { return std::vector{check_bracket_dependency(*L, tol.op, rng)}; });
  guarded(out, {"hamiltonian_central"}, tol.op, [&] { return std::vector{check_hamiltonian_central(*L, *grid, tol.op)}; });
  guarded(out, {"jucys_murphy_commute"}, tol.op, [&] { return std::vector{check_jucys_murphy(*params, *grid, tol.op)}; });

  // Generic kappa: identities that hold for every point, not only Gaudin ones.
  std::optional<KrawtchoukParam> kappa;
  guarded(out, {"random_kappa_validity", "dual_gram_identity"}, tol.op, [&] {
    kappa = random_kappa(params->p, cfg.seed);
    return std::vector{check_kappa_validity(*kappa, tol.op), check_dual_gram(*kappa, tol.op)};
  });
  const std::vector<std::string> table_checks{"bispectral_x", "bispectral_n", "orthogonality", "duality_transpose"};
  guarded(out, table_checks, tol.hypergeometric, [&] {
    if (!kappa) throw Error(ErrorKind::domain, "no random kappa available");
    if (!dense_ok) {
      std::vector<Check> v;
      for (const auto& n : table_checks) v.push_back(vacuous_check(n, tol.hypergeometric, "lattice above dense limit"));
      return v;
    }
    const BasisTable table = basis_table(*kappa, *grid);
    return std::vector{check_bispectral_x(*kappa, table, tol.hypergeometric),
                       check_bispectral_n(*kappa, table, tol.hypergeometric),
                       check_orthogonality(*kappa, table, tol.hypergeometric),
                       check_duality(*kappa, table, tol.root)};
  });

  // Gaudin model.
  std::optional<GaudinModel> model;
  guarded(out, {"gaudin_solve"}, tol.root, [&] {
    model = cfg.model ? *cfg.model : solve(params->p, cfg.alpha);
    std::ostringstream ctx;
    ctx << "path " << to_string(model->solver.path) << ", beta " << join(model->beta) << ", kappa residual "
        << model->solver.kappa_residual;
    auto c = make_check("gaudin_solve", model->solver.root_residual, tol.root, ctx.str());
    if (!validate(model->kappa, tol.op).passed()) {
      c.passed = false;
      c.context += " (kappa invalid)";
    }
    return std::vector{c};
  });
  auto need_model = [&] {
    if (!model) throw Error(ErrorKind::no_real_solution, "Gaudin solve failed");
    return *model;
  };
  guarded(out, {"cocycle_identity"}, tol.op, [&] { return std::vector{check_cocycle(need_model(), tol.op)}; });
  guarded(out, {"prop32_pairwise", "prop32_triple"}, tol.op, [&] {
    const auto m = need_model();
    return check_prop32_entries(cfg.prop32_kappa ? *cfg.prop32_kappa : m.kappa, m.alpha, tol.op);
  });
  guarded(out, {"gaudin_spectral_x", "gaudin_spectral_n", "gaudin_commutators"}, tol.op, [&] {
    const auto m = need_model();
    if (!dense_ok) {
      std::vector<Check> v;
      for (const auto* n : {"gaudin_spectral_x", "gaudin_spectral_n", "gaudin_commutators"})
        v.push_back(vacuous_check(n, tol.op, "lattice above dense limit"));
      return v;
    }
    return check_gaudin_diagonalization(m, basis_table(m.kappa, *grid), tol.op);
  });
  guarded(out, {"eigenvalue_agreement"}, tol.eigen_agreement,
          [&] { return std::vector{check_eigenvalue_agreement(need_model(), *grid, tol.eigen_agreement, rng)}; });
  guarded(out, {"dual_R_identity"}, tol.op, [&] { return std::vector{check_dual_R(need_model(), tol.op)}; });
  guarded(out, {"hamiltonian_spectrum"}, tol.spectrum, [&] {
    if (!dense_ok) return std::vector{vacuous_check("hamiltonian_spectrum", tol.spectrum, "lattice above dense limit")};
    return std::vector{check_hamiltonian_spectrum(params->p, *grid, tol.spectrum)};
  });
}

inline void run_negative(const SuiteConfig& cfg, std::vector<Check>& out) {
  const auto& tol = cfg.tol;
  std::optional<NegativeSetup> setup;
  guarded(out, {"negative_weight_normalization", "negative_kappa_validity"}, tol.truncated, [&] {
    NegativeSetup s{ModelParams::negative_multinomial(cfg.c, cfg.s), {}, cfg.pointwise_radius, cfg.truncation_radius, 2};
    s.kappa = random_kappa(s.params.p, cfg.seed, {.allow_generic_p = true});
    setup = s;
    const LatticeGrid box(s.params.dim(), s.truncation_radius);
    const auto w = grid_weights(s.params, box);
    const double mass = compensated_sum<double>(w);
    auto norm = make_check("negative_weight_normalization", std::abs(mass - 1.0), tol.truncated,
                           "truncated at |x| <= " + std::to_string(s.truncation_radius));
    return std::vector{norm, check_kappa_validity(s.kappa, tol.op, "negative_kappa_validity")};
  });
  auto need = [&] {
    if (!setup) throw Error(ErrorKind::domain, "negative multinomial setup failed");
    return *setup;
  };
  guarded(out, {"negative_bispectral_x"}, tol.hypergeometric,
          [&] { return std::vector{check_negative_bispectral_x(need(), tol.hypergeometric)}; });
  guarded(out, {"negative_bispectral_n"}, tol.hypergeometric,
          [&] { return std::vector{check_negative_bispectral_n(need(), tol.hypergeometric)}; });
  guarded(out, {"negative_orthogonality"}, tol.truncated,
          [&] { return std::vector{check_negative_orthogonality(need(), tol.truncated)}; });
}

}  // namespace detail

/// Runs every check of the requested mode in manifest order. Check failures
/// never abort the suite; structural errors become failed entries. A final
/// audit entry compares the produced names against the manifest.
inline VerificationReport full_suite(const SuiteConfig& cfg) {
  VerificationReport rep;
  rep.seed = cfg.seed;
  std::mt19937_64 rng(cfg.seed);
  if (cfg.mode != SuiteMode::negative) detail::run_multinomial(cfg, rng, rep.checks);
  if (cfg.mode != SuiteMode::multinomial) detail::run_negative(cfg, rep.checks);

  const auto manifest = suite_manifest(cfg.mode);
  std::size_t mismatches = manifest.size() > rep.checks.size() ? manifest.size() - rep.checks.size()
                                                                  : rep.checks.size() - manifest.size();
  for (std::size_t k = 0; k < std::min(manifest.size(), rep.checks.size()); ++k) {
    if (manifest[k] != rep.checks[k].name) ++mismatches;
  }
  rep.checks.push_back(make_check("manifest_audit", static_cast<double>(mismatches), 0.0,
                                  std::to_string(manifest.size()) + " expected entries"));
  return rep;
}

}  // namespace mkg

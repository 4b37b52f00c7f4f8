#pragma once

// Difference operators L_{i,j} of the multinomial representation, their
// duals acting on degree indices, and the combinations built from them
// (Hamiltonian, Jucys-Murphy sums, Gaudin operators).
//
//   L_{i,j} f(x) = p_i x_j (f(x + e_i - e_j) - f(x)) + p_j x_i (f(x + e_j - e_i) - f(x))
//
// with homogeneous slot 0: x_0 = N - |x| and e_0 = 0.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mkg/error.hpp"
#include "mkg/kappa.hpp"
#include "mkg/lattice.hpp"
#include "mkg/sparse.hpp"
#include "mkg/summation.hpp"

namespace mkg {

namespace detail {

inline void check_pair(int i, int j, int d) {
  if (i == j) fail(ErrorKind::argument, "L_{i,j} needs i != j (got i = j = " + std::to_string(i) + ")");
  if (i < 0 || j < 0 || i > d || j > d) {
    fail(ErrorKind::argument, "L_{i,j} index out of range 0.." + std::to_string(d));
  }
}

inline int grid_bound_for(const ModelParams& params, const LatticeGrid& grid) {
  if (params.negative()) {
    fail(ErrorKind::domain, "operator matrices need a finite lattice; use the pointwise action in negative mode");
  }
  if (params.dim() != grid.dim()) fail(ErrorKind::dimension, "params and grid dimensions disagree");
  if (static_cast<int>(params.N) != grid.bound()) fail(ErrorKind::dimension, "params.N differs from the grid bound");
  return grid.bound();
}

/// Adds c * L_{i,j} to the builder. Shifts that would leave the lattice carry
/// an exactly-zero coefficient; reaching one with a nonzero coefficient means
/// an index bug, not a boundary effect.
inline void accumulate_pair(OperatorBuilder& b, double c, int i, int j, std::span<const double> p,
                            const LatticeGrid& grid) {
  if (c == 0.0) return;
  const int N = grid.bound();
  for (std::size_t r = 0; r < grid.size(); ++r) {
    const MultiIndex x = grid.unrank(r);
    for (const auto [to, from] : {std::pair{i, j}, std::pair{j, i}}) {
      const double coef = p[static_cast<std::size_t>(to)] * x.slot(static_cast<std::size_t>(from), N);
      if (coef == 0.0) continue;
      const MultiIndex y = shifted(x, static_cast<std::size_t>(to), static_cast<std::size_t>(from));
      if (!grid.contains(y)) {
        fail(ErrorKind::domain, "L assembly stepped off the lattice at " + x.to_string());
      }
      b.add(r, grid.rank(y), c * coef);
      b.add(r, r, -c * coef);
    }
  }
}

}  // namespace detail

/// Coefficient c_{k,l} for the pair k < l of a combination sum c_{k,l} L_{k,l}.
using PairCoefficient = std::function<double(int, int)>;

/// sum_{0 <= k < l <= d} coef(k, l) L_{k,l}, assembled in one pass in pair order.
inline SparseOperator build_pair_combination(const PairCoefficient& coef, std::span<const double> p,
                                             const LatticeGrid& grid) {
  const int d = grid.dim();
  if (static_cast<int>(p.size()) != d + 1) fail(ErrorKind::dimension, "p must have d + 1 entries");
  OperatorBuilder b(grid.size());
  for (int k = 0; k <= d; ++k) {
    for (int l = k + 1; l <= d; ++l) detail::accumulate_pair(b, coef(k, l), k, l, p, grid);
  }
  return std::move(b).finish();
}

inline SparseOperator build_L(int i, int j, std::span<const double> p, const LatticeGrid& grid) {
  detail::check_pair(i, j, grid.dim());
  if (static_cast<int>(p.size()) != grid.dim() + 1) fail(ErrorKind::dimension, "p must have d + 1 entries");
  OperatorBuilder b(grid.size());
  detail::accumulate_pair(b, 1.0, std::min(i, j), std::max(i, j), p, grid);
  return std::move(b).finish();
}

inline SparseOperator build_L(int i, int j, const ModelParams& params, const LatticeGrid& grid) {
  detail::grid_bound_for(params, grid);
  return build_L(i, j, params.p, grid);
}

/// L~_{i,j}: the same formula in the degree indices n, with p~ in place of p.
inline SparseOperator build_dual_L(int i, int j, const KrawtchoukParam& kappa, const LatticeGrid& grid) {
  if (kappa.dim() != grid.dim()) fail(ErrorKind::dimension, "kappa and grid dimensions disagree");
  return build_L(i, j, kappa.p_tilde, grid);
}

inline void check_distinct_alpha(std::span<const double> alpha, double rel_gap) {
  double scale = 0;
  for (double a : alpha) scale = std::max(scale, std::abs(a));
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    for (std::size_t j = i + 1; j < alpha.size(); ++j) {
      if (!(std::abs(alpha[i] - alpha[j]) >= rel_gap * scale) || alpha[i] == alpha[j]) {
        fail(ErrorKind::degenerate, "alpha_" + std::to_string(i) + " and alpha_" + std::to_string(j) +
                                        " coincide; Gaudin coefficients are undefined");
      }
    }
  }
}

/// G(alpha, p, N; zeta) = sum_{i<j} (zeta_i - zeta_j) / (alpha_i - alpha_j) L_{i,j}.
inline SparseOperator build_gaudin(std::span<const double> alpha, std::span<const double> zeta,
                                   std::span<const double> p, const LatticeGrid& grid) {
  const auto n = static_cast<std::size_t>(grid.dim() + 1);
  if (alpha.size() != n || zeta.size() != n) fail(ErrorKind::dimension, "alpha and zeta need d + 1 entries");
  check_distinct_alpha(alpha, 1e-12);
  return build_pair_combination(
      [&](int k, int l) {
        const auto a = static_cast<std::size_t>(k), b = static_cast<std::size_t>(l);
        return (zeta[a] - zeta[b]) / (alpha[a] - alpha[b]);
      },
      p, grid);
}

inline SparseOperator build_gaudin(std::span<const double> alpha, std::span<const double> zeta,
                                   const ModelParams& params, const LatticeGrid& grid) {
  detail::grid_bound_for(params, grid);
  return build_gaudin(alpha, zeta, params.p, grid);
}

/// H = sum_{i<j} L_{i,j}.
inline SparseOperator build_hamiltonian(std::span<const double> p, const LatticeGrid& grid) {
  return build_pair_combination([](int, int) { return 1.0; }, p, grid);
}

inline SparseOperator build_hamiltonian(const ModelParams& params, const LatticeGrid& grid) {
  detail::grid_bound_for(params, grid);
  return build_hamiltonian(params.p, grid);
}

/// Jucys-Murphy element sum_{j<k} L_{j,k}, for 1 <= k <= d.
inline SparseOperator build_jucys_murphy(int k, const ModelParams& params, const LatticeGrid& grid) {
  detail::grid_bound_for(params, grid);
  if (k < 1 || k > grid.dim()) fail(ErrorKind::argument, "Jucys-Murphy index must lie in 1..d");
  return build_pair_combination([k](int a, int b) { return b == k ? 1.0 : 0.0; }, params.p, grid);
}

/// (L_{i,j} f)(x) evaluated pointwise for any function on N0^d. This is the
/// only route for the negative multinomial regime, where x_0 = -s - |x| never
/// vanishes and the operator does not close on a finite lattice.
template <typename F>
double apply_L_at(int i, int j, std::span<const double> p, double N, const MultiIndex& x, F&& f) {
  detail::check_pair(i, j, static_cast<int>(x.size()));
  const double fx = f(x);
  CompensatedSum<double> acc;
  for (const auto [to, from] : {std::pair{i, j}, std::pair{j, i}}) {
    const double coef = p[static_cast<std::size_t>(to)] * x.slot(static_cast<std::size_t>(from), N);
    if (coef == 0.0) continue;
    acc += coef * (f(shifted(x, static_cast<std::size_t>(to), static_cast<std::size_t>(from))) - fx);
  }
  return acc.value();
}

}  // namespace mkg

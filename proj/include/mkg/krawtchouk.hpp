#pragma once

// Multivariate Krawtchouk polynomials as terminating Aomoto-Gelfand sums
//
//   P_n(x) = sum_A  prod_j (-n_j)_{col_j(A)} prod_i (-x_i)_{row_i(A)} / (-N)_{|A|}
//                   * prod_{i,j} (1 - u_{i,j})^{a_{i,j}} / a_{i,j}!
//
// over d x d matrices A of nonnegative integers with |A| <= N.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "mkg/error.hpp"
#include "mkg/kappa.hpp"
#include "mkg/lattice.hpp"
#include "mkg/summation.hpp"

namespace mkg {

enum class Pruning {
  on,  // stop each entry at the first vanishing Pochhammer factor
  off  // walk every A with |A| <= N; vanishing terms are summed as zeros
};

/// Odometer evaluation of the hypergeometric sum for one kappa. Each term is
/// obtained from its predecessor by one multiplicative update, and terms are
/// accumulated with compensated summation in a fixed order.
class HypergeometricSum {
 public:
  /// `N` enters only through (-N)_k. With `total_cap` the sum is restricted
  /// to |A| <= N (multinomial); without it only the row/column caps terminate
  /// the sum (the formal negative multinomial regime).
  HypergeometricSum(const Eigen::MatrixXd& U, double N, bool total_cap)
      : d_(static_cast<int>(U.rows()) - 1), N_(N), total_cap_(total_cap) {
    if (U.rows() != U.cols() || d_ < 1) fail(ErrorKind::dimension, "U must be (d+1) x (d+1) with d >= 1");
    one_minus_u_.resize(static_cast<std::size_t>(d_ * d_));
    for (int i = 0; i < d_; ++i) {
      for (int j = 0; j < d_; ++j) one_minus_u_[static_cast<std::size_t>(i * d_ + j)] = 1.0 - U(i + 1, j + 1);
    }
  }

  int dim() const { return d_; }

  double operator()(std::span<const int> n, std::span<const int> x, Pruning pruning = Pruning::on) const {
    if (n.size() != static_cast<std::size_t>(d_) || x.size() != static_cast<std::size_t>(d_)) {
      fail(ErrorKind::dimension, "P_n(x): n and x need d entries");
    }
    if (pruning == Pruning::off && !total_cap_) {
      fail(ErrorKind::argument, "unpruned enumeration needs the |A| <= N cap to terminate");
    }
    State st{n, x, pruning, std::vector<int>(static_cast<std::size_t>(d_), 0),
             std::vector<int>(static_cast<std::size_t>(d_), 0), 0, {}};
    visit(st, 0, 1.0);
    return st.acc.value();
  }

 private:
  struct State {
    std::span<const int> n, x;
    Pruning pruning;
    std::vector<int> row_used, col_used;
    int total;
    CompensatedSum<double> acc;
  };

  void visit(State& st, int k, double term) const {
    if (k == d_ * d_) {
      st.acc += term;
      return;
    }
    const auto i = static_cast<std::size_t>(k / d_);
    const auto j = static_cast<std::size_t>(k % d_);
    const double omu = one_minus_u_[static_cast<std::size_t>(k)];

    visit(st, k + 1, term);
    int a = 0;
    double t = term;
    while (true) {
      if (total_cap_ && st.total >= static_cast<int>(N_)) break;
      const int c = st.col_used[j], r = st.row_used[i];
      if (st.pruning == Pruning::on && (c == st.n[j] || r == st.x[i])) break;
      // (-n_j)_{c+1} = (-n_j)_c (c - n_j), likewise for rows and (-N)_{|A|}.
      t *= static_cast<double>(c - st.n[j]) * static_cast<double>(r - st.x[i]) / (st.total - N_) * omu / (a + 1);
      ++a;
      ++st.col_used[j];
      ++st.row_used[i];
      ++st.total;
      visit(st, k + 1, t);
    }
    st.col_used[j] -= a;
    st.row_used[i] -= a;
    st.total -= a;
  }

  int d_;
  double N_;
  bool total_cap_;
  std::vector<double> one_minus_u_;
};

namespace detail {

inline void check_in_simplex(const MultiIndex& v, int d, int N, const char* what) {
  if (static_cast<int>(v.size()) != d) fail(ErrorKind::dimension, std::string(what) + " must have d entries");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0) fail(ErrorKind::domain, std::string(what) + " has a negative entry");
  }
  if (v.total() > N) {
    fail(ErrorKind::domain, std::string(what) + " = " + v.to_string() + " lies outside V_N^d (N = " +
                                std::to_string(N) + ")");
  }
}

}  // namespace detail

/// P_n(x; kappa, N) for n, x in V_N^d.
inline double eval_poly(const MultiIndex& n, const MultiIndex& x, const KrawtchoukParam& kappa, int N,
                        Pruning pruning = Pruning::on) {
  detail::check_in_simplex(n, kappa.dim(), N, "n");
  detail::check_in_simplex(x, kappa.dim(), N, "x");
  return HypergeometricSum(kappa.U, N, true)(n.entries(), x.entries(), pruning);
}

/// Polynomials of the negative multinomial regime: N = -s and
/// p_j = -c_j / (1 - |c|) substituted formally; n, x range over N0^d.
inline double eval_neg_poly(const MultiIndex& n, const MultiIndex& x, const KrawtchoukParam& kappa,
                            std::span<const double> c, double s) {
  const auto params = ModelParams::negative_multinomial(std::vector<double>(c.begin(), c.end()), s);
  if (params.dim() != kappa.dim()) fail(ErrorKind::dimension, "kappa and c dimensions disagree");
  for (std::size_t j = 0; j < params.p.size(); ++j) {
    if (std::abs(params.p[j] - kappa.p[j]) > 1e-12 * std::max(1.0, std::abs(params.p[j]))) {
      fail(ErrorKind::domain, "kappa.p does not match the negative multinomial substitution for (c, s)");
    }
  }
  if (static_cast<int>(n.size()) != kappa.dim() || static_cast<int>(x.size()) != kappa.dim()) {
    fail(ErrorKind::dimension, "n and x need d entries");
  }
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < 0 || x[i] < 0) fail(ErrorKind::domain, "n and x must be in N0^d");
  }
  return HypergeometricSum(kappa.U, -s, false)(n.entries(), x.entries());
}

/// Values P_n(x) over V_N^d x V_N^d; rows are indexed by n-rank, columns by x-rank.
struct BasisTable {
  LatticeGrid grid;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values;

  std::span<const double> row(std::size_t n_rank) const {
    return {values.data() + n_rank * static_cast<std::size_t>(values.cols()), static_cast<std::size_t>(values.cols())};
  }
  std::vector<double> column(std::size_t x_rank) const {
    std::vector<double> out(static_cast<std::size_t>(values.rows()));
    for (Eigen::Index r = 0; r < values.rows(); ++r) out[static_cast<std::size_t>(r)] = values(r, static_cast<Eigen::Index>(x_rank));
    return out;
  }
};

/// Full table of P_n(x; kappa, N). Rows are independent and are split across
/// `threads` workers (0 = hardware concurrency); each row is written once.
inline BasisTable basis_table(const KrawtchoukParam& kappa, const LatticeGrid& grid, unsigned threads = 0) {
  if (kappa.dim() != grid.dim()) fail(ErrorKind::dimension, "kappa and grid dimensions disagree");
  const auto size = static_cast<Eigen::Index>(grid.size());
  BasisTable table{grid, decltype(BasisTable::values)(size, size)};
  const HypergeometricSum sum(kappa.U, grid.bound(), true);

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto n = grid.at(r);
      for (std::size_t c = 0; c < grid.size(); ++c) {
        table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum(n, grid.at(c));
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.size()));
  if (threads <= 1) {
    fill(0, grid.size());
    return table;
  }
  std::vector<std::jthread> workers;
  const std::size_t chunk = (grid.size() + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk, end = std::min(grid.size(), begin + chunk);
    if (begin < end) workers.emplace_back(fill, begin, end);
  }
  return table;
}

inline BasisTable basis_table(const KrawtchoukParam& kappa, int N, unsigned threads = 0) {
  return basis_table(kappa, LatticeGrid(kappa.dim(), N), threads);
}

/// <P_n, P_m> = p_0^N / W_{p~,N}(n) delta_{n,m}.
inline double norm_sq(const MultiIndex& n, const KrawtchoukParam& kappa, int N) {
  detail::check_in_simplex(n, kappa.dim(), N, "n");
  const double w = multinomial_weight(n.entries(), kappa.p_tilde, N);
  return std::pow(kappa.p[0], N) / w;
}

/// The same norm written so that it continues to real N and sign-indefinite
/// p~: prod n_j! / ( N (N-1) ... (N-|n|+1) * prod (p~_j / p~_0)^{n_j} ).
/// With N = -s this is the squared norm for the negative multinomial weight.
inline double formal_norm_sq(const MultiIndex& n, const KrawtchoukParam& kappa, double N) {
  if (static_cast<int>(n.size()) != kappa.dim()) fail(ErrorKind::dimension, "n must have d entries");
  double falling = 1;
  for (int k = 0; k < n.total(); ++k) falling *= N - k;
  double r = 1 / falling;
  for (std::size_t j = 0; j < n.size(); ++j) {
    const double ratio = kappa.p_tilde[0] / kappa.p_tilde[j + 1];
    for (int i = 1; i <= n[j]; ++i) r *= i * ratio;
  }
  return r;
}

/// Gram matrix of the table rows under the given grid weights, with
/// compensated accumulation in x-rank order.
inline Eigen::MatrixXd gram_matrix(const BasisTable& table, std::span<const double> weights) {
  const auto size = table.values.rows();
  if (static_cast<std::size_t>(table.values.cols()) != weights.size()) {
    fail(ErrorKind::dimension, "gram_matrix: weights do not match the table");
  }
  Eigen::MatrixXd G(size, size);
  for (Eigen::Index a = 0; a < size; ++a) {
    for (Eigen::Index b = a; b < size; ++b) {
      CompensatedSum<double> acc;
      for (Eigen::Index x = 0; x < table.values.cols(); ++x) {
        acc += table.values(a, x) * table.values(b, x) * weights[static_cast<std::size_t>(x)];
      }
      G(a, b) = G(b, a) = acc.value();
    }
  }
  return G;
}

}  // namespace mkg

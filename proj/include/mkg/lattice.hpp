#pragma once

// Simplex lattice {x in N0^d : |x| <= N}, graded-lexicographic ranking, and
// the multinomial / negative multinomial weights living on it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mkg/error.hpp"
#include "mkg/summation.hpp"

namespace mkg {

/// A point of N0^d. Used both for lattice variables x and degree indices n.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t d) : entries_(d, 0) {}
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {}
  MultiIndex(std::initializer_list<int> entries) : entries_(entries) {}

  std::size_t size() const { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  int& operator[](std::size_t i) { return entries_[i]; }
  std::span<const int> entries() const { return entries_; }

  int total() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

  /// Entry of the homogenized vector (x_0, x_1, ..., x_d) with x_0 = N - |x|.
  double slot(std::size_t k, double N) const {
    return k == 0 ? N - total() : static_cast<double>(entries_[k - 1]);
  }

  std::string to_string(char sep = '-') const {
    std::string out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) out += sep;
      out += std::to_string(entries_[i]);
    }
    return out;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
};

/// Moves slot `to` up and slot `from` down by one in homogeneous coordinates.
/// Slot 0 is the implicit x_0 and has no shift of its own.
inline MultiIndex shifted(const MultiIndex& x, std::size_t to, std::size_t from) {
  MultiIndex y = x;
  if (to > 0) ++y[to - 1];
  if (from > 0) --y[from - 1];
  return y;
}

inline constexpr std::uint64_t kDefaultGridCap = 200'000;

namespace detail {

/// binomial(n, k) saturating at `cap + 1` so callers can test against a cap
/// without overflow.
inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // C(n, i) grows monotonically for i <= k, so saturation is sticky.
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(r);
}

}  // namespace detail

/// Graded-lexicographic enumeration of V_N^d: grade |x| ascending, ties broken
/// lexicographically on (x_1, ..., x_d).
class LatticeGrid {
 public:
  LatticeGrid(int d, int N, std::uint64_t cap = kDefaultGridCap) : d_(d), N_(N) {
    if (d < 1) fail(ErrorKind::argument, "lattice dimension d must be >= 1");
    if (N < 1) fail(ErrorKind::argument, "lattice bound N must be >= 1");
    const auto size = detail::binomial_capped(static_cast<std::uint64_t>(N + d),
                                              static_cast<std::uint64_t>(d), cap);
    if (size > cap) {
      fail(ErrorKind::size_limit,
           "lattice size binomial(" + std::to_string(N + d) + "," + std::to_string(d) +
               ") exceeds the cap of " + std::to_string(cap) + " points");
    }
    size_ = static_cast<std::size_t>(size);

    // Pascal table C(n, k) for n <= N + d and k <= d; composition counts
    // never need more columns than that.
    const int top = N + d;
    binom_.assign(static_cast<std::size_t>((top + 1) * (d + 1)), 0);
    for (int n = 0; n <= top; ++n) {
      binom_[idx(n, 0)] = 1;
      for (int k = 1; k <= std::min(n, d); ++k) {
        binom_[idx(n, k)] = binom_[idx(n - 1, k - 1)] + (k <= n - 1 ? binom_[idx(n - 1, k)] : 0);
      }
    }

    points_.reserve(size_ * static_cast<std::size_t>(d));
    std::vector<int> x(static_cast<std::size_t>(d), 0);
    for (int g = 0; g <= N; ++g) {
      grade_start_.push_back(points_.size() / static_cast<std::size_t>(d));
      emit_grade(x, 0, g);
    }
    grade_start_.push_back(size_);
  }

  int dim() const { return d_; }
  int bound() const { return N_; }
  std::size_t size() const { return size_; }

  /// First rank of grade g; grade_begin(N + 1) == size().
  std::size_t grade_begin(int g) const { return grade_start_.at(static_cast<std::size_t>(g)); }

  bool contains(const MultiIndex& x) const {
    if (x.size() != static_cast<std::size_t>(d_)) return false;
    int t = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < 0) return false;
      t += x[i];
    }
    return t <= N_;
  }

  std::size_t rank(const MultiIndex& x) const {
    if (!contains(x)) fail(ErrorKind::domain, "multi-index " + x.to_string() + " is not in the lattice");
    const int g = x.total();
    std::size_t r = grade_start_[static_cast<std::size_t>(g)];
    int remaining = g;
    for (int i = 0; i + 1 < d_; ++i) {
      const int parts = d_ - i - 1;
      for (int v = 0; v < x[static_cast<std::size_t>(i)]; ++v) r += compositions(remaining - v, parts);
      remaining -= x[static_cast<std::size_t>(i)];
    }
    return r;
  }

  MultiIndex unrank(std::size_t k) const {
    if (k >= size_) fail(ErrorKind::domain, "rank " + std::to_string(k) + " out of range");
    const auto* first = points_.data() + k * static_cast<std::size_t>(d_);
    return MultiIndex(std::vector<int>(first, first + d_));
  }

  /// Entries of the point at rank k without allocating.
  std::span<const int> at(std::size_t k) const {
    return {points_.data() + k * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }

 private:
  std::size_t idx(int n, int k) const { return static_cast<std::size_t>(n * (d_ + 1) + k); }

  /// Weak compositions of m into `parts` nonnegative parts.
  std::size_t compositions(int m, int parts) const {
    if (parts == 0) return m == 0 ? 1 : 0;
    return static_cast<std::size_t>(binom_[idx(m + parts - 1, parts - 1)]);
  }

  void emit_grade(std::vector<int>& x, int pos, int remaining) {
    if (pos == d_ - 1) {
      x[static_cast<std::size_t>(pos)] = remaining;
      points_.insert(points_.end(), x.begin(), x.end());
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      x[static_cast<std::size_t>(pos)] = v;
      emit_grade(x, pos + 1, remaining - v);
    }
  }

  int d_;
  int N_;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> binom_;
  std::vector<std::size_t> grade_start_;
  std::vector<int> points_;
};

enum class Distribution { multinomial, negative_multinomial };

/// Parameters (p_0, ..., p_d; N) of the weight. In negative multinomial mode
/// the formal values p_j = -c_j / (1 - |c|), p_0 = 1 / (1 - |c|), N = -s are
/// stored alongside (c, s).
struct ModelParams {
  std::vector<double> p;
  double N = 0;
  Distribution mode = Distribution::multinomial;
  std::vector<double> c;
  double s = 0;

  int dim() const { return static_cast<int>(p.size()) - 1; }
  bool negative() const { return mode == Distribution::negative_multinomial; }

  static ModelParams multinomial(std::vector<double> p, int N, double sum_tol = 1e-12) {
    if (p.size() < 2) fail(ErrorKind::argument, "p needs d + 1 >= 2 entries");
    if (N < 1) fail(ErrorKind::domain, "N must be a positive integer");
    check_sum(p, sum_tol);
    for (double v : p) {
      if (!(v > 0)) fail(ErrorKind::domain, "multinomial probabilities must be positive");
    }
    return ModelParams{std::move(p), static_cast<double>(N), Distribution::multinomial, {}, 0};
  }

  /// Generic real p summing to one (no positivity requirement).
  static ModelParams generic(std::vector<double> p, double N, double sum_tol = 1e-12) {
    if (p.size() < 2) fail(ErrorKind::argument, "p needs d + 1 >= 2 entries");
    check_sum(p, sum_tol);
    for (double v : p) {
      if (v == 0) fail(ErrorKind::domain, "p entries must be nonzero");
    }
    return ModelParams{std::move(p), N, Distribution::multinomial, {}, 0};
  }

  static ModelParams negative_multinomial(std::vector<double> c, double s) {
    if (c.empty()) fail(ErrorKind::argument, "c needs d >= 1 entries");
    if (!(s > 0)) fail(ErrorKind::domain, "negative multinomial requires s > 0");
    double total = 0;
    for (double v : c) {
      if (!(v > 0)) fail(ErrorKind::domain, "negative multinomial requires c_j > 0");
      total += v;
    }
    if (!(total < 1)) fail(ErrorKind::domain, "negative multinomial requires |c| < 1");
    std::vector<double> p(c.size() + 1);
    p[0] = 1.0 / (1.0 - total);
    for (std::size_t j = 0; j < c.size(); ++j) p[j + 1] = -c[j] / (1.0 - total);
    return ModelParams{std::move(p), -s, Distribution::negative_multinomial, std::move(c), s};
  }

 private:
  static void check_sum(const std::vector<double>& p, double tol) {
    CompensatedSum<double> acc;
    for (double v : p) acc += v;
    if (std::abs(acc.value() - 1.0) > tol) {
      fail(ErrorKind::domain, "p must sum to 1 (got " + std::to_string(acc.value()) + ")");
    }
  }
};

namespace detail {

inline double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

/// Rising factorial (a)_k = a (a + 1) ... (a + k - 1).
inline double rising(double a, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r *= a + i;
  return r;
}

/// Number of terms above which weights switch to log-gamma accumulation.
inline constexpr int kDirectWeightLimit = 30;

}  // namespace detail

/// W_{p,N}(x) = binom(N; N - |x|, x_1, ..., x_d) p_0^{N-|x|} prod p_j^{x_j}.
inline double multinomial_weight(std::span<const int> x, std::span<const double> p, int N) {
  if (x.size() + 1 != p.size()) fail(ErrorKind::dimension, "weight: x and p sizes disagree");
  int total = 0;
  for (int v : x) {
    if (v < 0) fail(ErrorKind::domain, "weight: negative lattice coordinate");
    total += v;
  }
  if (total > N) fail(ErrorKind::domain, "weight: |x| exceeds N");
  const int x0 = N - total;

  if (N > detail::kDirectWeightLimit) {
    double lw = detail::log_factorial(N) - detail::log_factorial(x0) + x0 * std::log(p[0]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      lw += x[j] * std::log(p[j + 1]) - detail::log_factorial(x[j]);
    }
    return std::exp(lw);
  }

  // Product of binomials C(N, x_1) C(N - x_1, x_2) ..., each exact at this size.
  double w = std::pow(p[0], x0);
  int left = N;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double b = 1;
    for (int i = 1; i <= x[j]; ++i) b = b * (left - x[j] + i) / i;
    left -= x[j];
    w *= b * std::pow(p[j + 1], x[j]);
  }
  return w;
}

inline double multinomial_weight(const MultiIndex& x, const ModelParams& params) {
  if (params.negative()) fail(ErrorKind::domain, "multinomial_weight needs multinomial mode");
  return multinomial_weight(x.entries(), params.p, static_cast<int>(params.N));
}

/// W(x; c, s) = (1 - |c|)^s (s)_{|x|} prod c_j^{x_j} / x_j!.
inline double neg_multinomial_weight(std::span<const int> x, std::span<const double> c, double s) {
  if (x.size() != c.size()) fail(ErrorKind::dimension, "weight: x and c sizes disagree");
  const double csum = std::accumulate(c.begin(), c.end(), 0.0);
  if (!(csum < 1)) fail(ErrorKind::domain, "negative multinomial weight requires |c| < 1");
  int total = 0;
  for (int v : x) {
    if (v < 0) fail(ErrorKind::domain, "weight: negative lattice coordinate");
    total += v;
  }
  if (total > detail::kDirectWeightLimit) {
    double lw = s * std::log1p(-csum) + std::lgamma(s + total) - std::lgamma(s);
    for (std::size_t j = 0; j < x.size(); ++j) lw += x[j] * std::log(c[j]) - detail::log_factorial(x[j]);
    return std::exp(lw);
  }
  double w = std::pow(1.0 - csum, s) * detail::rising(s, total);
  for (std::size_t j = 0; j < x.size(); ++j) {
    for (int i = 1; i <= x[j]; ++i) w *= c[j] / i;
  }
  return w;
}

inline double neg_multinomial_weight(const MultiIndex& x, const ModelParams& params) {
  if (!params.negative()) fail(ErrorKind::domain, "neg_multinomial_weight needs negative multinomial mode");
  return neg_multinomial_weight(x.entries(), params.c, params.s);
}

/// Weight at every rank of the grid. In negative multinomial mode the grid
/// is the truncation |x| <= R of the infinite lattice.
inline std::vector<double> grid_weights(const ModelParams& params, const LatticeGrid& grid) {
  if (params.dim() != grid.dim()) fail(ErrorKind::dimension, "params and grid dimensions disagree");
  std::vector<double> w(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    w[k] = params.negative() ? neg_multinomial_weight(grid.at(k), params.c, params.s)
                             : multinomial_weight(grid.at(k), params.p, static_cast<int>(params.N));
  }
  return w;
}

/// sum_x f(x) g(x) w(x), accumulated in rank order.
inline double inner_product(std::span<const double> f, std::span<const double> g,
                            std::span<const double> weights) {
  if (f.size() != weights.size() || g.size() != weights.size()) {
    fail(ErrorKind::dimension, "inner_product: vector lengths do not match the grid");
  }
  CompensatedSum<double> acc;
  for (std::size_t k = 0; k < weights.size(); ++k) acc += f[k] * g[k] * weights[k];
  return acc.value();
}

inline double inner_product(std::span<const double> f, std::span<const double> g,
                            const ModelParams& params, const LatticeGrid& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    fail(ErrorKind::dimension, "inner_product: vector lengths do not match the grid");
  }
  const auto w = grid_weights(params, grid);
  return inner_product(f, g, w);
}

}  // namespace mkg

#pragma once

#include <cmath>
#include <span>

namespace mkg {

/// Neumaier's variant of Kahan summation.
///
/// Adding an exact zero never changes the state, so sums that skip zero
/// terms and sums that visit them agree bit for bit.
template <typename Real = double>
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(Real init) : sum_(init) {}

  constexpr CompensatedSum& operator+=(Real v) {
    const Real t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  constexpr CompensatedSum& operator-=(Real v) { return *this += -v; }

  constexpr Real value() const { return sum_ + comp_; }
  constexpr explicit operator Real() const { return value(); }

 private:
  Real sum_ = 0;
  Real comp_ = 0;
};

template <typename Real>
Real compensated_sum(std::span<const Real> values) {
  CompensatedSum<Real> acc;
  for (Real v : values) acc += v;
  return acc.value();
}

}  // namespace mkg

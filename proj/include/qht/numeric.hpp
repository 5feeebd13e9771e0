#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace qht {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Neumaier's variant of Kahan summation. Traces of ρ^s σ^(1-s) at large n mix
// terms spanning many orders of magnitude, so every reduction in the library
// goes through this accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log(e^x + e^y) with -inf as the additive identity.
inline double log_add_exp(double x, double y) noexcept {
  if (x == -kInf) return y;
  if (y == -kInf) return x;
  const double hi = x > y ? x : y;
  const double lo = x > y ? y : x;
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> xs) noexcept;

// log of a nonnegative value; 0 (and anything below it from rounding) maps to -inf.
inline double safe_log(double x) noexcept { return x > 0.0 ? std::log(x) : -kInf; }

}  // namespace qht

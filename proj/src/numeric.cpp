#include "qht/numeric.hpp"

#include <algorithm>

namespace qht {

double log_sum_exp(std::span<const double> xs) noexcept {
  double hi = -kInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == -kInf || hi == kInf) return hi;
  CompensatedSum sum;
  for (double x : xs) sum += std::exp(x - hi);
  return hi + std::log(sum.value());
}

}  // namespace qht

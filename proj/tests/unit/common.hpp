#pragma once

#include <cmath>
#include <initializer_list>
#include <limits>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "qht/error.hpp"
#include "qht/operator_core.hpp"
#include "qht/sampling.hpp"
#include "qht/state_models.hpp"

namespace testing {

using qht::Complex;
using qht::DensityOperator;
using qht::HermitianOperator;
using qht::Index;
using qht::Matrix;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline DensityOperator ket(std::initializer_list<Complex> amps) {
  qht::Vector v(static_cast<Index>(amps.size()));
  Index i = 0;
  for (Complex c : amps) v(i++) = c;
  return qht::pure_state(v);
}

inline DensityOperator diag_state(std::initializer_list<double> probs) {
  const std::vector<double> p(probs);
  return qht::diagonal_state(p);
}

inline HermitianOperator herm(const Matrix& m) { return HermitianOperator(m); }

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Relative comparison that treats equal infinities as a match.
inline bool close(double got, double want, double rel) {
  if (std::isinf(got) || std::isinf(want)) return got == want;
  return std::abs(got - want) <= rel * (1.0 + std::abs(want));
}

inline qht::Errc error_code(const auto& fn) {
  try {
    fn();
  } catch (const qht::Error& e) {
    return e.code();
  }
  FAIL("expected qht::Error");
  return qht::Errc::numerical_failure;
}

}  // namespace testing

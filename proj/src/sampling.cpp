#include "qht/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "qht/error.hpp"

namespace qht {

double Sampler::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Sampler::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

int Sampler::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

Matrix Sampler::ginibre(Index rows, Index cols, bool real) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal();
      const double im = real ? 0.0 : normal();
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

Matrix Sampler::haar_unitary(Index dim) {
  const Matrix g = ginibre(dim, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

DensityOperator Sampler::density(Index dim, Index rank, bool real) {
  if (rank <= 0 || rank > dim) rank = dim;
  const Matrix g = ginibre(dim, rank, real);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  if (real) rho = rho.real().cast<Complex>();
  return DensityOperator(HermitianOperator(std::move(rho)));
}

DensityOperator Sampler::pure_state(Index dim) {
  return qht::pure_state(ginibre(dim, 1).col(0));
}

DensityOperator Sampler::bloch_xz(double r_lo, double r_hi) {
  const double radius = uniform(r_lo, r_hi);
  const double angle = uniform(0.0, 2.0 * M_PI);
  const double x = radius * std::cos(angle);
  const double z = radius * std::sin(angle);
  RealMatrix m(2, 2);
  m << 0.5 * (1.0 + z), 0.5 * x, 0.5 * x, 0.5 * (1.0 - z);
  return DensityOperator(HermitianOperator(m));
}

HermitianOperator Sampler::projective_test(Index dim) {
  const Index rank = integer(0, static_cast<int>(dim));
  const Matrix u = haar_unitary(dim);
  const Matrix cols = u.leftCols(rank);
  return HermitianOperator(Matrix(cols * cols.adjoint()));
}

HermitianOperator Sampler::povm_element(Index dim) {
  const Matrix u = haar_unitary(dim);
  RealVector w(dim);
  for (Index i = 0; i < dim; ++i) w(i) = uniform();
  return HermitianOperator(Matrix(u * w.cast<Complex>().asDiagonal() * u.adjoint()));
}

RealMatrix Sampler::stochastic(Index n, bool strictly_positive, double floor) {
  if (n < 1) throw Error(Errc::invalid_model, "stochastic matrix needs n >= 1");
  RealMatrix t(n, n);
  for (Index x = 0; x < n; ++x) {
    double total = 0.0;
    for (Index y = 0; y < n; ++y) {
      t(x, y) = -std::log(uniform(1e-12, 1.0));
      total += t(x, y);
    }
    t.row(x) /= total;
    if (strictly_positive) {
      const double f = std::min(floor, 0.5 / static_cast<double>(n));
      t.row(x) = t.row(x) * (1.0 - n * f) + RealVector::Constant(n, f).transpose();
    }
    // Rebalance the last entry so the row sums to 1 to rounding.
    const double rest = t.row(x).head(n - 1).sum();
    t(x, n - 1) = 1.0 - rest;
  }
  return t;
}

}  // namespace qht

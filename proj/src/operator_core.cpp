#include "qht/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include <lapacke.h>

#include "qht/error.hpp"
#include "qht/numeric.hpp"

namespace qht {
namespace {

Matrix checked_hermitian(Matrix m) {
  if (m.rows() != m.cols()) {
    throw Error(Errc::dimension_mismatch, "operator must be square, got " +
                                              std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw Error(Errc::non_hermitian_input, "non-finite entry");
  const Index n = m.rows();
  // squared magnitudes, tiled so the transposed access stays in cache
  constexpr Index kTile = 64;
  double scale2 = 0.0;
  double deviation2 = 0.0;
  for (Index jb = 0; jb < n; jb += kTile) {
    for (Index ib = 0; ib <= jb; ib += kTile) {
      const Index je = std::min(n, jb + kTile);
      const Index ie = std::min(n, ib + kTile);
      for (Index j = jb; j < je; ++j) {
        for (Index i = ib; i < std::min(ie, j + 1); ++i) {
          const Complex upper = m(i, j);
          const Complex lower = m(j, i);
          scale2 = std::max({scale2, std::norm(upper), std::norm(lower)});
          deviation2 = std::max(deviation2, std::norm(upper - std::conj(lower)));
        }
      }
    }
  }
  const double scale = std::sqrt(scale2);
  const double deviation = std::sqrt(deviation2);
  if (deviation > kHermiticityTolerance * (1.0 + scale)) {
    throw Error(Errc::non_hermitian_input,
                "max |A - A*| = " + std::to_string(deviation) + " exceeds tolerance");
  }
  if (deviation > 0.0) {
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i <= j; ++i) {
        const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
        m(i, j) = avg;
        m(j, i) = std::conj(avg);
      }
    }
  }
  return m;
}

Eigensystem solve_real(const Matrix& m) {
  const auto n = static_cast<lapack_int>(m.rows());
  RealMatrix vectors = m.real();
  RealVector values(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, vectors.data(), n, values.data());
  if (info != 0) {
    throw Error(Errc::numerical_failure, "dsyevd failed with info " + std::to_string(info));
  }
  return Eigensystem(std::move(values), std::move(vectors));
}

Eigensystem solve_complex(const Matrix& m) {
  const auto n = static_cast<lapack_int>(m.rows());
  Matrix vectors = m;
  RealVector values(n);
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', n, reinterpret_cast<lapack_complex_double*>(vectors.data()), n,
      values.data());
  if (info != 0) {
    throw Error(Errc::numerical_failure, "zheevd failed with info " + std::to_string(info));
  }
  return Eigensystem(std::move(values), std::move(vectors));
}

bool is_diagonal(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

// Stable sort of the diagonal; eigenvectors are the permuted unit vectors.
Eigensystem solve_diagonal(const Matrix& m) {
  const Index n = m.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&m](Index a, Index b) { return m(a, a).real() < m(b, b).real(); });
  RealVector values(n);
  for (Index k = 0; k < n; ++k) values(k) = m(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
  return Eigensystem::from_permutation(std::move(values), std::move(order));
}

double max_abs(const RealVector& values) {
  return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix entries)
    : entries_(checked_hermitian(std::move(entries))) {
  real_ = (entries_.imag().array() == 0.0).all();
}

HermitianOperator HermitianOperator::assume_hermitian(Matrix entries) {
  HermitianOperator out;
  out.entries_ = std::move(entries);
  out.real_ = (out.entries_.imag().array() == 0.0).all();
  return out;
}

HermitianOperator::HermitianOperator(const RealMatrix& entries)
    : HermitianOperator(Matrix(entries.cast<Complex>())) {}

HermitianOperator HermitianOperator::identity(Index dim) {
  return HermitianOperator(Matrix(Matrix::Identity(dim, dim)));
}

HermitianOperator HermitianOperator::zero(Index dim) {
  return HermitianOperator(Matrix(Matrix::Zero(dim, dim)));
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
  Matrix m = Matrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(static_cast<Index>(i), static_cast<Index>(i)) = values[i];
  }
  return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::outer(const Vector& v) {
  return HermitianOperator(Matrix(v * v.adjoint()));
}

double HermitianOperator::trace() const {
  CompensatedSum sum;
  for (Index i = 0; i < dim(); ++i) sum += entries_(i, i).real();
  return sum.value();
}

double HermitianOperator::max_abs_entry() const {
  return entries_.size() == 0 ? 0.0 : entries_.cwiseAbs().maxCoeff();
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& rhs) const {
  require_same_dim(*this, rhs, "operator+");
  return HermitianOperator(Matrix(entries_ + rhs.entries_));
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& rhs) const {
  require_same_dim(*this, rhs, "operator-");
  return HermitianOperator(Matrix(entries_ - rhs.entries_));
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator(Matrix(factor * entries_));
}

Eigensystem::Eigensystem(RealVector values, RealMatrix vectors)
    : values_(std::move(values)), real_vectors_(std::move(vectors)), real_(true) {}

Eigensystem::Eigensystem(RealVector values, Matrix vectors)
    : values_(std::move(values)), complex_vectors_(std::move(vectors)), real_(false) {}

Eigensystem Eigensystem::from_permutation(RealVector values, std::vector<Index> order) {
  const Index n = values.size();
  RealMatrix vectors = RealMatrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) vectors(order[static_cast<std::size_t>(k)], k) = 1.0;
  Eigensystem out(std::move(values), std::move(vectors));
  out.permutation_ = std::move(order);
  return out;
}

Matrix Eigensystem::columns(Index first, Index count) const {
  if (real_) return real_vectors_.middleCols(first, count).cast<Complex>();
  return complex_vectors_.middleCols(first, count);
}

RealVector Eigensystem::quadratic_forms(const HermitianOperator& a, Index first,
                                        Index count) const {
  if (count == 0) return RealVector(0);
  if (!permutation_.empty()) {
    RealVector out(count);
    for (Index k = 0; k < count; ++k) {
      const Index i = permutation_[static_cast<std::size_t>(first + k)];
      out(k) = a.matrix()(i, i).real();
    }
    return out;
  }
  if (real_ && a.is_real()) {
    const auto block = real_vectors_.middleCols(first, count);
    const RealMatrix image = a.matrix().real() * block;
    return block.cwiseProduct(image).colwise().sum().transpose();
  }
  const Matrix block = columns(first, count);
  const Matrix image = a.matrix() * block;
  return block.conjugate().cwiseProduct(image).colwise().sum().real().transpose();
}

double Eigensystem::block_overlap(Index first, Index count, const Eigensystem& other,
                                  Index other_first, Index other_count) const {
  if (count == 0 || other_count == 0) return 0.0;
  if (real_ && other.real_) {
    return (real_vectors_.middleCols(first, count).transpose() *
            other.real_vectors_.middleCols(other_first, other_count))
        .squaredNorm();
  }
  return (columns(first, count).adjoint() * other.columns(other_first, other_count))
      .squaredNorm();
}

RealMatrix Eigensystem::overlap_weights(const Eigensystem& other) const {
  if (real_ && other.real_) {
    return (real_vectors_.transpose() * other.real_vectors_).array().square().matrix();
  }
  return (columns(0, dim()).adjoint() * other.columns(0, other.dim())).cwiseAbs2();
}

Matrix Eigensystem::apply(const std::function<double(double)>& f) const {
  RealVector mapped(values_.size());
  for (Index i = 0; i < values_.size(); ++i) mapped(i) = f(values_(i));
  if (real_) {
    const RealMatrix out = real_vectors_ * mapped.asDiagonal() * real_vectors_.transpose();
    return out.cast<Complex>();
  }
  return complex_vectors_ * mapped.asDiagonal() * complex_vectors_.adjoint();
}

Eigensystem eigensystem(const HermitianOperator& h) {
  if (h.dim() == 0) return Eigensystem(RealVector(0), RealMatrix(0, 0));
  if (h.is_real() && is_diagonal(h.matrix())) return solve_diagonal(h.matrix());
  return h.is_real() ? solve_real(h.matrix()) : solve_complex(h.matrix());
}

Projection Projection::from_basis(Matrix orthonormal_columns) {
  Projection p;
  p.basis_ = std::move(orthonormal_columns);
  return p;
}

Projection Projection::from_matrix(const Matrix& p) {
  const HermitianOperator op(p);
  const Matrix square = p * p;
  const double deviation = p.size() == 0 ? 0.0 : (square - p).cwiseAbs().maxCoeff();
  if (deviation > 1e-10) {
    throw Error(Errc::numerical_failure,
                "matrix is not idempotent (max |P^2 - P| = " + std::to_string(deviation) + ")");
  }
  const Eigensystem sys = eigensystem(op);
  Index first = 0;
  while (first < sys.dim() && sys.values()(first) < 0.5) ++first;
  return from_basis(sys.columns(first, sys.dim() - first));
}

Projection Projection::zero(Index dim) { return from_basis(Matrix(dim, 0)); }

Projection Projection::identity(Index dim) {
  return from_basis(Matrix(Matrix::Identity(dim, dim)));
}

Matrix Projection::matrix() const { return basis_ * basis_.adjoint(); }

double Projection::expectation(const HermitianOperator& a) const {
  if (rank() == 0) return 0.0;
  const Matrix image = a.matrix() * basis_;
  const RealVector diag =
      basis_.conjugate().cwiseProduct(image).colwise().sum().real().transpose();
  CompensatedSum sum;
  for (Index i = 0; i < diag.size(); ++i) sum += diag(i);
  return sum.value();
}

SpectralDecomposition::SpectralDecomposition(std::shared_ptr<const Eigensystem> system,
                                             std::vector<double> values,
                                             std::vector<Index> offsets)
    : system_(std::move(system)), values_(std::move(values)), offsets_(std::move(offsets)) {}

Projection SpectralDecomposition::projection(std::size_t i) const {
  return Projection::from_basis(system_->columns(offsets_[i], multiplicity(i)));
}

HermitianOperator SpectralDecomposition::reconstruct() const {
  Matrix out = Matrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < size(); ++i) {
    const Matrix block = system_->columns(offsets_[i], multiplicity(i));
    out += values_[i] * (block * block.adjoint());
  }
  return HermitianOperator(std::move(out));
}

SpectralDecomposition spectral_decompose(const HermitianOperator& h, double group_tol) {
  if (group_tol < 0.0) throw Error(Errc::numerical_failure, "group_tol must be >= 0");
  auto system = std::make_shared<const Eigensystem>(eigensystem(h));
  const RealVector& lambda = system->values();
  const double tol = group_tol * (1.0 + max_abs(lambda));

  std::vector<double> values;
  std::vector<Index> offsets;
  Index begin = 0;
  for (Index k = 1; k <= lambda.size(); ++k) {
    if (k == lambda.size() || lambda(k) - lambda(k - 1) > tol) {
      CompensatedSum sum;
      for (Index j = begin; j < k; ++j) sum += lambda(j);
      values.push_back(sum.value() / static_cast<double>(k - begin));
      offsets.push_back(begin);
      begin = k;
    }
  }
  offsets.push_back(lambda.size());
  return SpectralDecomposition(std::move(system), std::move(values), std::move(offsets));
}

double zero_threshold(const RealVector& eigenvalues) {
  if (eigenvalues.size() == 0) return 0.0;
  const double top = std::max(eigenvalues.maxCoeff(), 0.0);
  return static_cast<double>(eigenvalues.size()) * kZeroEigenvalueFactor * top;
}

void require_positive_semidefinite(const RealVector& eigenvalues) {
  if (eigenvalues.size() == 0) return;
  const double lowest = eigenvalues.minCoeff();
  if (lowest < -kPsdErrorTolerance * max_abs(eigenvalues)) {
    throw Error(Errc::not_positive_semidefinite,
                "minimum eigenvalue " + std::to_string(lowest));
  }
}

Projection support_projection(const HermitianOperator& a) {
  const Eigensystem sys = eigensystem(a);
  require_positive_semidefinite(sys.values());
  const double thr = zero_threshold(sys.values());
  Index first = 0;
  while (first < sys.dim() && sys.values()(first) <= thr) ++first;
  return Projection::from_basis(sys.columns(first, sys.dim() - first));
}

double spectral_norm(const HermitianOperator& h) { return max_abs(eigensystem(h).values()); }

double min_eigenvalue(const HermitianOperator& h) {
  const Eigensystem sys = eigensystem(h);
  return sys.dim() == 0 ? 0.0 : sys.values()(0);
}

HermitianOperator fractional_power(const HermitianOperator& a, double s) {
  const Eigensystem sys = eigensystem(a);
  require_positive_semidefinite(sys.values());
  const double thr = zero_threshold(sys.values());
  return HermitianOperator(
      sys.apply([thr, s](double lambda) { return lambda > thr ? std::pow(lambda, s) : 0.0; }));
}

Projection positive_spectral_projection(const HermitianOperator& h) {
  const Eigensystem sys = eigensystem(h);
  const double tol = kSignTolerance * (1.0 + max_abs(sys.values()));
  Index first = 0;
  while (first < sys.dim() && sys.values()(first) <= tol) ++first;
  return Projection::from_basis(sys.columns(first, sys.dim() - first));
}

double trace_norm(const HermitianOperator& h) {
  const Eigensystem sys = eigensystem(h);
  CompensatedSum sum;
  for (Index i = 0; i < sys.dim(); ++i) sum += std::abs(sys.values()(i));
  return sum.value();
}

double trace_product(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a, b, "trace_product");
  const Matrix& x = a.matrix();
  const Matrix& y = b.matrix();
  CompensatedSum sum;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      // Tr(AB) = Σ_ij A_ij B_ji and B_ji = conj(B_ij)
      sum += (x(i, j) * std::conj(y(i, j))).real();
    }
  }
  return sum.value();
}

double min_trace_overlap(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a, b, "min_trace_overlap");
  return 0.5 * (a.trace() + b.trace() - trace_norm(a - b));
}

MinDuality operator_min_duality(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a, b, "operator_min_duality");
  const HermitianOperator diff = a - b;
  const Projection s = positive_spectral_projection(diff);
  // X = A(I−S) + BS = A − (A−B)S, and (A−B)S = (A−B)_+ is Hermitian.
  const Matrix positive_part = diff.matrix() * s.matrix();
  MinDuality out;
  out.witness = HermitianOperator(Matrix(a.matrix() - positive_part));
  out.value = min_trace_overlap(a, b);
  out.witness_min_eigenvalue = min_eigenvalue(out.witness);
  out.witness_psd = out.witness_min_eigenvalue >= -1e-10;
  return out;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b, Index size_cap) {
  const Index da = a.dim();
  const Index db = b.dim();
  if (db != 0 && da > size_cap / db) {
    throw Error(Errc::size_overflow, "tensor product dimension " + std::to_string(da) + "*" +
                                         std::to_string(db) + " exceeds cap " +
                                         std::to_string(size_cap));
  }
  Matrix out(da * db, da * db);
  for (Index j = 0; j < da; ++j) {
    for (Index i = 0; i < da; ++i) {
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    }
  }
  return HermitianOperator::assume_hermitian(std::move(out));
}

HermitianOperator kron_power(const HermitianOperator& a, int n, Index size_cap) {
  if (n < 1) throw Error(Errc::index_out_of_range, "kron_power needs n >= 1");
  HermitianOperator out = a;
  for (int k = 1; k < n; ++k) out = kron(out, a, size_cap);
  return out;
}

HermitianOperator partial_trace_last(const HermitianOperator& a, Index last_dim) {
  if (last_dim <= 0 || a.dim() % last_dim != 0) {
    throw Error(Errc::dimension_mismatch, "partial trace factor does not divide dimension");
  }
  const Index d = a.dim() / last_dim;
  Matrix out = Matrix::Zero(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      Complex acc = 0.0;
      for (Index k = 0; k < last_dim; ++k) acc += a.matrix()(i * last_dim + k, j * last_dim + k);
      out(i, j) = acc;
    }
  }
  return HermitianOperator(std::move(out));
}

void require_same_dim(const HermitianOperator& a, const HermitianOperator& b, const char* where) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::dimension_mismatch, std::string(where) + ": dimensions " +
                                              std::to_string(a.dim()) + " and " +
                                              std::to_string(b.dim()));
  }
}

}  // namespace qht

#pragma once

// Dense Hermitian matrix calculus: eigensystems, grouped spectral
// decompositions, fractional powers with the 0^s := 0 convention, positive
// spectral projections, trace norms, tensor products and the operator-min
// duality.

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qht {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kDefaultGroupTolerance = 1e-9;
// λ counts as zero when λ ≤ dim · kZeroEigenvalueFactor · λ_max.
inline constexpr double kZeroEigenvalueFactor = 1e-12;
// Eigenvalues of an indefinite operator within this relative band around 0
// are treated as 0 when splitting into positive and nonpositive parts.
inline constexpr double kSignTolerance = 1e-12;
inline constexpr double kPsdClampTolerance = 1e-10;
inline constexpr double kPsdErrorTolerance = 1e-8;
inline constexpr Index kDefaultSizeCap = Index{1} << 16;

class HermitianOperator {
 public:
  HermitianOperator() = default;
  // Deviations from Hermiticity up to 1e-12·(1 + max|entry|) are symmetrized
  // away; anything larger throws Errc::non_hermitian_input.
  explicit HermitianOperator(Matrix entries);
  explicit HermitianOperator(const RealMatrix& entries);
  // For matrices that are exactly Hermitian by construction; only the real flag is computed.
  static HermitianOperator assume_hermitian(Matrix entries);

  static HermitianOperator identity(Index dim);
  static HermitianOperator zero(Index dim);
  static HermitianOperator diagonal(std::span<const double> values);
  // |v⟩⟨v| without normalization.
  static HermitianOperator outer(const Vector& v);

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  // True when every imaginary part is exactly zero; selects the real eigensolver.
  bool is_real() const noexcept { return real_; }

  double trace() const;
  double max_abs_entry() const;

  HermitianOperator operator+(const HermitianOperator& rhs) const;
  HermitianOperator operator-(const HermitianOperator& rhs) const;
  HermitianOperator scaled(double factor) const;

 private:
  Matrix entries_;
  bool real_ = true;
};

// Full eigensystem with ascending eigenvalues. Real symmetric input keeps real
// eigenvectors so large real problems avoid complex arithmetic.
class Eigensystem {
 public:
  Eigensystem(RealVector values, RealMatrix vectors);
  Eigensystem(RealVector values, Matrix vectors);
  // Eigenvectors are the unit vectors e_{order[k]} (diagonal input).
  static Eigensystem from_permutation(RealVector values, std::vector<Index> order);

  Index dim() const noexcept { return values_.size(); }
  const RealVector& values() const noexcept { return values_; }
  bool is_real() const noexcept { return real_; }

  // Copy of the column block [first, first + count).
  Matrix columns(Index first, Index count) const;
  // diag(V_S^* A V_S) over the column block S.
  RealVector quadratic_forms(const HermitianOperator& a, Index first, Index count) const;
  // ‖V_S^* W_T‖_F^2 = Tr P_S Q_T for column blocks of two eigensystems.
  double block_overlap(Index first, Index count, const Eigensystem& other, Index other_first,
                       Index other_count) const;
  // |V^* W|^2 entrywise: Tr p_i q_j for rank-1 eigenprojections of both systems.
  RealMatrix overlap_weights(const Eigensystem& other) const;
  // V f(Λ) V^*.
  Matrix apply(const std::function<double(double)>& f) const;

 private:
  RealVector values_;
  RealMatrix real_vectors_;
  Matrix complex_vectors_;
  std::vector<Index> permutation_;
  bool real_;
};

Eigensystem eigensystem(const HermitianOperator& h);

class Projection {
 public:
  Projection() = default;
  // Orthonormal columns spanning the range (dim × rank).
  static Projection from_basis(Matrix orthonormal_columns);
  // Validates P = P^*, P² = P within 1e-10.
  static Projection from_matrix(const Matrix& p);
  static Projection zero(Index dim);
  static Projection identity(Index dim);

  Index dim() const noexcept { return basis_.rows(); }
  Index rank() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }
  Matrix matrix() const;
  // Tr(A P).
  double expectation(const HermitianOperator& a) const;

 private:
  Matrix basis_;
};

class SpectralDecomposition {
 public:
  SpectralDecomposition(std::shared_ptr<const Eigensystem> system, std::vector<double> values,
                        std::vector<Index> offsets);

  Index dim() const noexcept { return system_->dim(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> eigenvalues() const noexcept { return values_; }
  Index block_begin(std::size_t i) const { return offsets_[i]; }
  Index multiplicity(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  Projection projection(std::size_t i) const;
  const Eigensystem& eigensystem() const noexcept { return *system_; }
  HermitianOperator reconstruct() const;

 private:
  std::shared_ptr<const Eigensystem> system_;
  std::vector<double> values_;
  std::vector<Index> offsets_;
};

// Eigenvalues within group_tol·(1 + spectral norm) of their neighbour are
// merged into one eigenprojection carrying the mean eigenvalue.
SpectralDecomposition spectral_decompose(const HermitianOperator& h,
                                         double group_tol = kDefaultGroupTolerance);

// Absolute threshold below which a PSD eigenvalue counts as zero.
double zero_threshold(const RealVector& eigenvalues);

// Throws not_positive_semidefinite when the minimum eigenvalue is below
// -1e-8·‖A‖; smaller negative parts are clamped to zero.
void require_positive_semidefinite(const RealVector& eigenvalues);

Projection support_projection(const HermitianOperator& a);
double spectral_norm(const HermitianOperator& h);
double min_eigenvalue(const HermitianOperator& h);

// Σ_{λ_i > 0} λ_i^s P_i; s = 0 yields the support projection.
HermitianOperator fractional_power(const HermitianOperator& a, double s);

// {H > 0}, excluding eigenvalues within 1e-12·(1 + ‖H‖) of zero.
Projection positive_spectral_projection(const HermitianOperator& h);

double trace_norm(const HermitianOperator& h);

// Tr(AB) for Hermitian A, B, accumulated with compensated summation.
double trace_product(const HermitianOperator& a, const HermitianOperator& b);

// ½Tr(A+B) − ½Tr|A−B| = min over 0 ≤ T ≤ I of Tr A(I−T) + Tr BT.
double min_trace_overlap(const HermitianOperator& a, const HermitianOperator& b);

struct MinDuality {
  double value = 0.0;
  HermitianOperator witness;  // X = A(I−S) + BS with S = {A−B > 0}
  double witness_min_eigenvalue = 0.0;
  bool witness_psd = false;
};

MinDuality operator_min_duality(const HermitianOperator& a, const HermitianOperator& b);

// Left factor major: (A⊗B)[(i,k),(j,l)] = A[i,j]·B[k,l].
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b,
                       Index size_cap = kDefaultSizeCap);
HermitianOperator kron_power(const HermitianOperator& a, int n, Index size_cap = kDefaultSizeCap);

// Traces out the trailing tensor factor of dimension last_dim.
HermitianOperator partial_trace_last(const HermitianOperator& a, Index last_dim);

void require_same_dim(const HermitianOperator& a, const HermitianOperator& b, const char* where);

}  // namespace qht

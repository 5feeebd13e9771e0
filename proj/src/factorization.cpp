#include "qht/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qht/error.hpp"
#include "qht/numeric.hpp"

namespace qht {
namespace {

constexpr double kLeakTolerance = 1e-10;

bool is_diagonal(const HermitianOperator& a) {
  const Matrix& m = a.matrix();
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

std::optional<double> diagonal_ratio(const HermitianOperator& a, const HermitianOperator& b) {
  const RealVector da = a.matrix().diagonal().real();
  const RealVector db = b.matrix().diagonal().real();
  const double za = zero_threshold(da);
  const double zb = zero_threshold(db);
  double best = 0.0;
  for (Index i = 0; i < da.size(); ++i) {
    if (db(i) > zb) {
      best = std::max(best, da(i) / db(i));
    } else if (da(i) > za) {
      return std::nullopt;
    }
  }
  return best;
}

}  // namespace

double FactorizationEstimate::eta() const {
  if (!upper_satisfiable || !lower_satisfiable) return kInf;
  return std::max(eta_upper, eta_lower);
}

std::optional<double> max_generalized_eigenvalue(const HermitianOperator& a,
                                                 const HermitianOperator& b) {
  require_same_dim(a, b, "max_generalized_eigenvalue");
  if (is_diagonal(a) && is_diagonal(b)) return diagonal_ratio(a, b);

  const Eigensystem sys = eigensystem(b);
  require_positive_semidefinite(sys.values());
  const double thr = zero_threshold(sys.values());
  Index first = 0;
  while (first < sys.dim() && sys.values()(first) <= thr) ++first;
  const Index rank = sys.dim() - first;

  const RealVector captured = sys.quadratic_forms(a, first, rank);
  const double leak = a.trace() - captured.sum();
  if (leak > kLeakTolerance * std::max(1.0, a.trace())) return std::nullopt;
  if (rank == 0) return 0.0;

  const Matrix v = sys.columns(first, rank);
  RealVector inv_sqrt(rank);
  for (Index i = 0; i < rank; ++i) inv_sqrt(i) = 1.0 / std::sqrt(sys.values()(first + i));
  const Matrix m = inv_sqrt.asDiagonal() * (v.adjoint() * a.matrix() * v) * inv_sqrt.asDiagonal();
  const Eigensystem inner = eigensystem(HermitianOperator(Matrix(0.5 * (m + m.adjoint()))));
  return inner.values()(rank - 1);
}

FactorizationEstimate factorization_constants(const StateFamily& model, int m, int n_max,
                                              Index size_cap) {
  if (m < 1 || n_max < 1) throw Error(Errc::config_error, "m and n_max must be >= 1");
  FactorizationEstimate est;
  est.m = m;
  est.checked_n_max = n_max;
  const DensityOperator block = restrict(model, m, size_cap);
  for (int n = m + 1; n <= n_max; ++n) {
    FactorizationStep step;
    step.n = n;
    step.k = (n - 1) / m;
    step.r = n - step.k * m;
    const DensityOperator omega = restrict(model, n, size_cap);
    HermitianOperator g = kron_power(block.op(), step.k, size_cap);
    g = kron(g, restrict(model, step.r, size_cap).op(), size_cap);
    const double inv_k = 1.0 / step.k;

    const auto up = max_generalized_eigenvalue(omega.op(), g);
    step.upper_satisfiable = up.has_value();
    step.eta_upper = up ? std::pow(std::max(*up, 0.0), inv_k) : kInf;
    const auto low = max_generalized_eigenvalue(g, omega.op());
    step.lower_satisfiable = low.has_value();
    step.eta_lower = low ? std::pow(std::max(*low, 0.0), inv_k) : kInf;

    est.upper_satisfiable = est.upper_satisfiable && step.upper_satisfiable;
    est.lower_satisfiable = est.lower_satisfiable && step.lower_satisfiable;
    if (step.upper_satisfiable) est.eta_upper = std::max(est.eta_upper, step.eta_upper);
    if (step.lower_satisfiable) est.eta_lower = std::max(est.eta_lower, step.eta_lower);
    est.steps.push_back(step);
  }
  if (!est.upper_satisfiable) est.eta_upper = kInf;
  if (!est.lower_satisfiable) est.eta_lower = kInf;
  est.certified = est.upper_satisfiable && est.lower_satisfiable;
  return est;
}

double sandwich_width(int m, double eta) {
  if (m < 1) throw Error(Errc::config_error, "block size must be >= 1");
  if (!(eta >= 1.0 - 1e-10)) throw Error(Errc::invalid_exponent, "eta must be >= 1");
  if (!std::isfinite(eta)) return kInf;
  return std::log(std::max(eta, 1.0)) / m;
}

PsiProfile psi_sandwich(const StateFamily& rho, const StateFamily& sigma, int m, double eta,
                        std::vector<double> grid, Index size_cap) {
  const double width = sandwich_width(m, eta);
  const DensityOperator rm = restrict(rho, m, size_cap);
  const DensityOperator sm = restrict(sigma, m, size_cap);
  PsiProfile p = build_profile(finite_psi(rm, sm, m), std::move(grid), PsiMethod::finite_n_sandwich);
  p.m = m;
  p.eta = eta;
  p.sandwich_width = width;
  return p;
}

Band psi_band(const PsiProfile& profile, double s) {
  const double v = profile(s);
  return {v - profile.sandwich_width, v, v + profile.sandwich_width};
}

Band phi_band(const PsiProfile& profile, double a) {
  const double v = legendre_phi(profile, a).value;
  return {v - profile.sandwich_width, v, v + profile.sandwich_width};
}

}  // namespace qht

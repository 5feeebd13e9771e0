#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qht/operator_core.hpp"
#include "qht/state_models.hpp"

namespace qht {

inline constexpr double kAtomPruneThreshold = 1e-14;
inline constexpr double kRatioMergeTolerance = 1e-12;
inline constexpr std::size_t kRatioLatticeCap = 1000000;

// Nussbaum–Szkoła measures p(i,j) = λ_i Tr P_iQ_j, q(i,j) = η_j Tr P_iQ_j.
struct ClassicalPair {
  std::vector<std::pair<Index, Index>> atoms;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> lambda;  // eigenvalue of ρ per atom
  std::vector<double> eta;     // eigenvalue of σ per atom

  std::size_t size() const noexcept { return p.size(); }
  double total_p() const;
  double total_q() const;
  // log Σ p^s q^(1−s), from the atom eigenvalues and overlaps in log domain.
  double log_moment(double s) const;
};

// Eigenvalue pairs with overlap Tr P_iQ_j ≤ 1e−14 are dropped; only the
// strictly positive parts of ρ and σ enter (the 0^s := 0 convention).
ClassicalPair nussbaum_szkola(const DensityOperator& rho, const DensityOperator& sigma,
                              double group_tol = kDefaultGroupTolerance);

struct MomentCheck {
  double classical = 0.0;
  double quantum = 0.0;
  double gap = 0.0;
};
MomentCheck moment_identity(const ClassicalPair& pair, const DensityOperator& rho,
                            const DensityOperator& sigma, double s);

// Tr ρ^s σ^(1−s) through fractional powers.
double quantum_moment(const DensityOperator& rho, const DensityOperator& sigma, double s);

struct MinSumCheck {
  double lower = 0.0;  // ½ Σ min(e^{−na} p, q)
  bool holds = false;
};
MinSumCheck min_sum_bound(const ClassicalPair& pair, double a, int n, double e_n);

struct RateVariable {
  std::vector<double> values;
  std::vector<double> weights;

  double mass() const;
  // weight of {value ≥ t} and {value > t}.
  double tail_at_least(double t) const;
  double tail_above(double t) const;
};

struct RateVariables {
  RateVariable x;  // (1/n) log(q/p) under p
  RateVariable y;  // (1/n) log(p/q) under q
};
RateVariables rate_variables(const ClassicalPair& pair, int n);

struct ProductError {
  double log_alpha = 0.0;  // log α_n, −inf when α_n = 0
  double log_beta = 0.0;
  bool degenerate = false;  // p1 ∝ q1 on the common support
  std::size_t lattice_size = 0;
};

// Exact α_n, β_n of the test {e^{−na} p1^{⊗n} > q1^{⊗n}} for product measures.
ProductError product_error_exact(std::span<const double> p1, std::span<const double> q1,
                                 double a, int n);

}  // namespace qht

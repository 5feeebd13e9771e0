#pragma once

#include <vector>

#include "qht/exponents.hpp"
#include "qht/state_models.hpp"

namespace qht {

struct FactorizationStep {
  int n = 0;
  int k = 0;  // n = km + r, 1 ≤ r ≤ m
  int r = 0;
  double eta_upper = 1.0;  // per-block constant, already raised to 1/k
  double eta_lower = 1.0;
  bool upper_satisfiable = true;
  bool lower_satisfiable = true;
};

struct FactorizationEstimate {
  int m = 0;
  double eta_upper = 1.0;
  double eta_lower = 1.0;
  int checked_n_max = 0;
  bool upper_satisfiable = true;
  bool lower_satisfiable = true;
  bool certified = true;
  std::vector<FactorizationStep> steps;

  // max(η_upper, η_lower), +inf when either direction is unsatisfiable.
  double eta() const;
};

// η(n) = λ_max(G^{+½} ω_n G^{+½})^{1/k} with G = ω_m^{⊗k} ⊗ ω_r, maximized over n ≤ n_max;
// the lower constant swaps the roles of ω_n and G.
FactorizationEstimate factorization_constants(const StateFamily& model, int m, int n_max,
                                              Index size_cap = kDefaultSizeCap);

// λ_max(B^{+½} A B^{+½}) over supp B; nullopt when supp A ⊄ supp B.
std::optional<double> max_generalized_eigenvalue(const HermitianOperator& a,
                                                 const HermitianOperator& b);

double sandwich_width(int m, double eta);

PsiProfile psi_sandwich(const StateFamily& rho, const StateFamily& sigma, int m, double eta,
                        std::vector<double> grid, Index size_cap = kDefaultSizeCap);

struct Band {
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
  bool contains(double x, double slack = 1e-12) const {
    return x >= lower - slack && x <= upper + slack;
  }
};
Band psi_band(const PsiProfile& profile, double s);
Band phi_band(const PsiProfile& profile, double a);

}  // namespace qht

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qht/classical_reduction.hpp"
#include "qht/operator_core.hpp"
#include "qht/state_models.hpp"

namespace qht {

inline constexpr int kDefaultGridSize = 513;
inline constexpr double kGoldenTolerance = 1e-11;
inline constexpr double kDerivativeCap = 1e6;

enum class PsiMethod { exact_iid, transfer_matrix, finite_n_sandwich };
const char* to_string(PsiMethod m) noexcept;

std::vector<double> uniform_grid(int points, double lo = 0.0, double hi = 1.0);

struct PsiProfile {
  std::vector<double> grid;
  std::vector<double> values;
  // ψ at any s (the grid only seeds the optimizers).
  std::function<double(double)> evaluator;
  double d_right_0 = 0.0;
  double d_left_1 = 0.0;
  PsiMethod method = PsiMethod::exact_iid;
  int m = 1;
  double eta = 1.0;
  double sandwich_width = 0.0;  // (1/m) log η
  std::vector<std::string> warnings;

  double operator()(double s) const { return evaluator(s); }
  double psi_at_0() const { return evaluator(0.0); }
  double psi_at_1() const { return evaluator(1.0); }
};

// Evaluates f on the grid, fills the boundary derivatives and attaches
// convexity / sign warnings.
PsiProfile build_profile(std::function<double(double)> f, std::vector<double> grid,
                         PsiMethod method);

// (1/n) log Tr ρ^s σ^(1−s) via fractional powers; −inf for orthogonal supports.
double psi_n(const DensityOperator& rho_n, const DensityOperator& sigma_n, int n, double s);

// s ↦ (1/n) log Σ p^s q^(1−s) over the Nussbaum–Szkoła atoms of (ρ_n, σ_n).
std::function<double(double)> finite_psi(const DensityOperator& rho_n,
                                         const DensityOperator& sigma_n, int n);

struct TransferMatrix {
  RealMatrix Q;
  RealVector a;
  RealVector b;
  double spectral_radius = 0.0;
  bool reducible = false;
};

struct SpectralRadius {
  double value = 0.0;
  bool reducible = false;
  bool converged = true;
};

// Perron root of a nonnegative matrix by shifted power iteration with
// Collatz–Wielandt bounds (relative tolerance 1e−13).
SpectralRadius perron_root(const RealMatrix& q);
bool is_irreducible(const RealMatrix& q);

// Precomputes the site-level moment data of a hidden-Markov pair so that
// Q(s), a(s), b(s) are cheap to form at many s.
class TransferFamily {
 public:
  TransferFamily(const HiddenMarkovModel& rho, const HiddenMarkovModel& sigma);

  Index alphabet() const noexcept { return T_.rows(); }
  TransferMatrix at(double s) const;
  double log_radius(double s) const;

 private:
  RealMatrix T_;
  RealMatrix S_;
  RealVector r_;
  RealVector p_;
  std::vector<std::optional<ClassicalPair>> site_pairs_;  // row-major (x, y)
  std::vector<ClassicalPair> boundary_pairs_;
};

TransferMatrix transfer_matrix_Q(const HiddenMarkovModel& rho, const HiddenMarkovModel& sigma,
                                 double s);
// ⟨a, Q^(n−1) b⟩.
double transfer_pairing(const TransferMatrix& t, int n);

// Hidden-Markov view of a model pair when both are Markov-type, else nullopt.
std::optional<std::pair<HiddenMarkovModel, HiddenMarkovModel>> as_markov_pair(
    const StateFamily& rho, const StateFamily& sigma);

struct PsiOptions {
  int grid_points = kDefaultGridSize;
  int sandwich_m = 0;      // 0: largest m with d^m ≤ 64
  int sandwich_n_max = 0;  // 0: largest n with d^n ≤ 1024
  Index size_cap = kDefaultSizeCap;
};

PsiProfile psi_limit(const StateFamily& rho, const StateFamily& sigma,
                     const PsiOptions& options = {});

struct PhiValue {
  double value = 0.0;
  double argmax = 0.0;
  double half_width = 0.0;  // sandwich profiles only
};

// φ(a) = max_{s∈[0,1]} {as − ψ(s)}.
PhiValue legendre_phi(const PsiProfile& profile, double a);
double hat_phi(const PsiProfile& profile, double a);
double chernoff_exponent(const PsiProfile& profile);

struct HoeffdingSolution {
  double r = 0.0;
  double a_r = 0.0;  // +inf sentinel allowed
  double s_r = 0.0;
  double b_r = 0.0;  // max_{0≤s<1} (−sr − ψ(s))/(1−s)
  double phi_at_a_r = 0.0;
  double exponent = 0.0;  // −b_r, or −inf when r < −ψ(1)
};
HoeffdingSolution hoeffding_solve(const PsiProfile& profile, double r);

struct BoundaryDerivatives {
  double d_right_0 = 0.0;
  double d_left_1 = 0.0;
};
BoundaryDerivatives psi_boundary_derivatives(const std::function<double(double)>& psi);
BoundaryDerivatives psi_boundary_derivatives(const PsiProfile& profile);
// (1/n)-normalized one-sided derivatives of ψ_n for a finite pair.
BoundaryDerivatives psi_boundary_derivatives(const DensityOperator& rho_n,
                                             const DensityOperator& sigma_n, int n);

// +inf when supp ρ ⊄ supp σ.
double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);
// Σ_x r_x S(T_x·||S_x·) + Σ_xy r_x T_xy S(θ_xy||φ_xy).
double markov_mean_relative_entropy(const HiddenMarkovModel& rho, const HiddenMarkovModel& sigma);

// Second derivative of s ↦ log Tr ρ^s σ^(1−s) (variance of log λ − log η).
double psi_second_derivative(const DensityOperator& rho_n, const DensityOperator& sigma_n,
                             double s);
double psi_second_derivative(const ClassicalPair& pair, double s);

struct AffineReport {
  bool is_affine = false;
  std::optional<double> delta;
  std::optional<std::vector<std::pair<Index, Index>>> pairing;
  bool pairing_verified = false;
  double second_derivative_at_half = 0.0;
  double max_second_derivative = 0.0;
};
AffineReport affine_structure(const DensityOperator& rho_n, const DensityOperator& sigma_n);

enum class SteinCase { equal_supports, support_mismatch, indeterminate };
const char* to_string(SteinCase c) noexcept;

struct SteinReport {
  SteinCase kind = SteinCase::indeterminate;
  double psi_at_1 = 0.0;
  double h0 = 0.0;            // −ψ′₋(1) when ψ(1) = 0, −inf when ψ(1) < 0
  double upper_bound = 0.0;   // B ≤ −ψ′₋(1), or −inf
  double mean_relative_entropy = 0.0;  // ψ′₋(1), or +inf when ψ(1) < 0
};
SteinReport stein_classify(const PsiProfile& profile, double d_left_1);

struct FullLegendre {
  double value = 0.0;
  double argmax = 0.0;
  bool boundary_warning = false;
};
// sup_{s∈[−s_max, 1+s_max]} {sx − ψ(s)}; exact_iid and transfer_matrix only.
FullLegendre legendre_full_line(const PsiProfile& profile, double x, double s_max = 8.0);

struct ExponentReport {
  double chernoff = 0.0;
  double psi_at_0 = 0.0;
  double psi_at_1 = 0.0;
  std::pair<double, double> interval_I_psi;
  SteinReport stein;
};
ExponentReport exponent_report(const PsiProfile& profile);

}  // namespace qht

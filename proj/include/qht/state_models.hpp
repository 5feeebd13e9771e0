#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qht/operator_core.hpp"

namespace qht {

// PSD with unit trace. The full eigenvalue check runs for dims up to
// kDensityCheckDimCap; the trace is always checked.
class DensityOperator {
 public:
  static constexpr Index kDensityCheckDimCap = 1024;

  DensityOperator() = default;
  explicit DensityOperator(HermitianOperator op);
  explicit DensityOperator(const Matrix& m) : DensityOperator(HermitianOperator(m)) {}
  // Skips validation; for outputs that are valid by construction.
  static DensityOperator trusted(HermitianOperator op);

  Index dim() const noexcept { return op_.dim(); }
  const HermitianOperator& op() const noexcept { return op_; }
  const Matrix& matrix() const noexcept { return op_.matrix(); }

 private:
  HermitianOperator op_;
};

DensityOperator maximally_mixed(Index dim);
DensityOperator pure_state(const Vector& v);
DensityOperator diagonal_state(std::span<const double> probabilities);

struct IidModel {
  DensityOperator rho1;
};

struct HiddenMarkovModel {
  RealMatrix T;
  RealVector r;
  Index site_dim = 0;
  // Row-major over (x, y); present where T(x, y) > 0, optional elsewhere.
  std::vector<std::optional<DensityOperator>> site_states;

  Index alphabet() const noexcept { return T.rows(); }
  bool has_site(Index x, Index y) const;
  const DensityOperator& site(Index x, Index y) const;
  // Θ_x = Σ_y T_xy θ_xy.
  HermitianOperator boundary(Index x) const;
};

struct ClassicalMarkovModel {
  RealMatrix T;
  RealVector r;
};

struct LocalGibbsModel {
  Index site_dim = 0;
  int range = 1;
  HermitianOperator h;  // acts on site_dim^range
};

struct ExplicitModel {
  std::vector<DensityOperator> states;  // states[k] lives on d^(k+1)
};

using StateFamily =
    std::variant<IidModel, HiddenMarkovModel, ClassicalMarkovModel, LocalGibbsModel, ExplicitModel>;

// Factories validate and throw Error(invalid_model / missing_site_state / ...).
StateFamily make_iid(DensityOperator rho1);
// r may be omitted, in which case the stationary distribution of T is used.
StateFamily make_hidden_markov(RealMatrix T, std::optional<RealVector> r,
                               std::map<std::pair<Index, Index>, DensityOperator> site_states);
StateFamily make_classical_markov(RealMatrix T, std::optional<RealVector> r = std::nullopt);
StateFamily make_local_gibbs(Index site_dim, int range, HermitianOperator h);
StateFamily make_explicit(std::vector<DensityOperator> states);

// Row sums, nonnegativity, stationarity and faithfulness of (T, r).
void validate_markov_kernel(const RealMatrix& T, const RealVector& r);
RealVector stationary_distribution(const RealMatrix& T);

// Site states δ_x on a |X|-dimensional site.
HiddenMarkovModel as_hidden_markov(const ClassicalMarkovModel& m);

Index site_dim(const StateFamily& model);
const char* family_name(const StateFamily& model);
// Exact textual serialization of the model content (hex floats).
std::string fingerprint(const StateFamily& model);
// Largest n with site_dim^n ≤ size_cap (Explicit: stored length).
int max_sites(const StateFamily& model, Index size_cap = kDefaultSizeCap);

// n-site density. Results up to dim 1024 are cached per (model, n).
DensityOperator restrict(const StateFamily& model, int n, Index size_cap = kDefaultSizeCap);
void clear_restrict_cache();

enum class SupportRelation { Equal, LeftDominates, RightDominates, Incomparable, Orthogonal };
const char* to_string(SupportRelation rel) noexcept;
SupportRelation support_relation(const DensityOperator& rho, const DensityOperator& sigma);
// True when supp a ≤ supp b.
bool support_contained(const HermitianOperator& a, const HermitianOperator& b);

enum class Tristate { False, True, Unknown };
const char* to_string(Tristate t) noexcept;

struct MarkovSupportReport {
  Tristate cond1 = Tristate::Unknown;
  bool cond2 = false;
  bool cond3 = false;
  std::vector<std::string> notes;
};

MarkovSupportReport markov_support_conditions(
    const HiddenMarkovModel& rho, const HiddenMarkovModel& sigma,
    const std::optional<std::vector<Projection>>& candidate_blocks = std::nullopt);

// P_x = supp Σ_y (θ_xy + φ_xy); the natural candidate for the block condition.
std::vector<Projection> canonical_block_projections(const HiddenMarkovModel& rho,
                                                    const HiddenMarkovModel& sigma);

}  // namespace qht

#pragma once

#include <cstdint>
#include <random>

#include "qht/operator_core.hpp"
#include "qht/state_models.hpp"

namespace qht {

// Seeded generators for random states, tests and Markov kernels. All draws
// go through std::mt19937_64 so a fixed seed reproduces the same objects.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  int integer(int lo, int hi);  // inclusive

  Matrix ginibre(Index rows, Index cols, bool real = false);
  Matrix haar_unitary(Index dim);

  // Ginibre density G G^*/Tr of the given rank (0: full rank).
  DensityOperator density(Index dim, Index rank = 0, bool real = false);
  DensityOperator pure_state(Index dim);
  // Real qubit state with Bloch vector in the xz-plane, radius in [r_lo, r_hi].
  DensityOperator bloch_xz(double r_lo, double r_hi);

  // Haar-rotated projection of uniformly drawn rank.
  HermitianOperator projective_test(Index dim);
  // U diag(u) U^* with u_i uniform in [0,1].
  HermitianOperator povm_element(Index dim);

  // Row-stochastic matrix; rows drawn uniformly from the simplex, entries
  // bounded below by floor when strictly_positive.
  RealMatrix stochastic(Index n, bool strictly_positive = true, double floor = 0.05);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qht

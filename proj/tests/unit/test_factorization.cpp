#include "common.hpp"
#include "qht/exponents.hpp"
#include "qht/factorization.hpp"

using namespace qht;
using namespace testing;

namespace {

RealMatrix flip(double t) {
  RealMatrix T(2, 2);
  T << 1 - t, t, t, 1 - t;
  return T;
}

}  // namespace

TEST_CASE("factorization: i.i.d. models have eta = 1") {
  Sampler rng(61);
  const StateFamily m = make_iid(rng.density(2));
  for (int block : {1, 2, 3}) {
    const FactorizationEstimate est = factorization_constants(m, block, 8);
    CHECK(est.certified);
    CHECK(est.eta() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(est.steps.size() == static_cast<std::size_t>(8 - block));
  }
  CHECK(sandwich_width(4, 1.0) == 0.0);
}

TEST_CASE("factorization: classical Markov against word ratios") {
  Sampler rng(62);
  for (int trial = 0; trial < 5; ++trial) {
    const RealMatrix T = rng.stochastic(2 + trial % 2);
    const RealVector r = stationary_distribution(T);
    const StateFamily m = make_classical_markov(T, r);
    for (int block : {1, 2}) {
      const int n_max = trial % 2 ? 5 : 7;
      const FactorizationEstimate est = factorization_constants(m, block, n_max);
      const oracle::RatioBounds want = oracle::markov_factorization(T, r, block, n_max);
      CHECK(est.eta_upper == doctest::Approx(want.upper).epsilon(1e-10));
      CHECK(est.eta_lower == doctest::Approx(want.lower).epsilon(1e-10));
    }
  }
}

TEST_CASE("factorization: one-step constant of a positive chain") {
  const RealMatrix T = flip(0.3);
  const RealVector r{{0.5, 0.5}};
  const FactorizationEstimate est = factorization_constants(make_classical_markov(T, r), 1, 2);
  REQUIRE(est.steps.size() == 1);
  // P(xy) / (r_x r_y) = T_xy / r_y
  CHECK(est.eta_upper == doctest::Approx(0.7 / 0.5).epsilon(1e-12));
  CHECK(est.eta_lower == doctest::Approx(0.5 / 0.3).epsilon(1e-12));
}

TEST_CASE("factorization: a forbidden transition makes the lower direction unsatisfiable") {
  RealMatrix T(2, 2);
  T << 0.5, 0.5, 1.0, 0.0;
  const FactorizationEstimate est = factorization_constants(make_classical_markov(T), 1, 4);
  CHECK(est.upper_satisfiable);
  CHECK_FALSE(est.lower_satisfiable);
  CHECK_FALSE(est.certified);
  CHECK(est.eta() == kInf);
  CHECK(sandwich_width(1, est.eta()) == kInf);
}

TEST_CASE("max generalized eigenvalue") {
  const HermitianOperator a(Matrix(diag_state({0.5, 0.5}).matrix()));
  const HermitianOperator b(Matrix(diag_state({0.8, 0.2}).matrix()));
  CHECK(*max_generalized_eigenvalue(a, b) == doctest::Approx(2.5));
  CHECK_FALSE(max_generalized_eigenvalue(a, diag_state({1.0, 0.0}).op()).has_value());
  CHECK(*max_generalized_eigenvalue(diag_state({1.0, 0.0}).op(), a) == doctest::Approx(2.0));

  Sampler rng(63);
  const DensityOperator x = rng.density(3);
  const DensityOperator y = rng.density(3);
  const double got = *max_generalized_eigenvalue(x.op(), y.op());
  const Eigen::GeneralizedSelfAdjointEigenSolver<oracle::CMatrix> ges(x.matrix(), y.matrix());
  CHECK(got == doctest::Approx(ges.eigenvalues().maxCoeff()).epsilon(1e-9));
}

TEST_CASE("sandwich: width shrinks with m and the band holds the limit") {
  Sampler rng(64);
  const RealMatrix T = rng.stochastic(2);
  const RealMatrix S = rng.stochastic(2);
  const StateFamily a = make_classical_markov(T);
  const StateFamily b = make_classical_markov(S);
  const PsiProfile exact = psi_limit(a, b);
  REQUIRE(exact.method == PsiMethod::transfer_matrix);

  double eta = 1.0;
  for (int m : {4, 8}) {
    eta = std::max({eta, factorization_constants(a, m, 10).eta(),
                    factorization_constants(b, m, 10).eta()});
  }
  REQUIRE(std::isfinite(eta));
  const PsiProfile p4 = psi_sandwich(a, b, 4, eta, uniform_grid(65));
  const PsiProfile p8 = psi_sandwich(a, b, 8, eta, uniform_grid(65));
  CHECK(p4.method == PsiMethod::finite_n_sandwich);
  CHECK(p8.sandwich_width == doctest::Approx(0.5 * p4.sandwich_width).epsilon(1e-12));
  for (double s : uniform_grid(11)) {
    CHECK(psi_band(p4, s).contains(exact(s)));
    CHECK(psi_band(p8, s).contains(exact(s)));
  }
  for (double x : {-0.5, 0.0, 0.5}) {
    const double phi = legendre_phi(exact, x).value;
    CHECK(phi_band(p4, x).contains(phi, 1e-9));
    CHECK(phi_band(p8, x).contains(phi, 1e-9));
  }
}

TEST_CASE("sandwich: argument validation") {
  CHECK(error_code([] { sandwich_width(0, 1.0); }) == Errc::config_error);
  CHECK(error_code([] { sandwich_width(2, 0.5); }) == Errc::invalid_exponent);
  CHECK(error_code([] { factorization_constants(make_iid(maximally_mixed(2)), 0, 3); }) ==
        Errc::config_error);
}

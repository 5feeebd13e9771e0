#include "common.hpp"
#include "qht/classical_reduction.hpp"
#include "qht/exponents.hpp"
#include "qht/hypothesis_tests.hpp"

using namespace qht;
using namespace testing;

namespace {

const double kR = 1.0 / std::sqrt(2.0);

// Finite-n polar sup_{s∈[0,1]} {as − ψ_n(s)}.
double finite_phi(const DensityOperator& rho_n, const DensityOperator& sigma_n, int n, double a) {
  const auto f = finite_psi(rho_n, sigma_n, n);
  return oracle::grid_maximize([&](double s) { return a * s - f(s); }, 0.0, 1.0);
}

}  // namespace

TEST_CASE("bayes: examples") {
  const DensityOperator mixed = maximally_mixed(2);
  CHECK(bayes_optimal_test(mixed, mixed, 0.5).min_error == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(bayes_optimal_test(ket({1.0, 0.0}), ket({0.0, 1.0}), 0.5).min_error) < 1e-14);

  const DensityOperator zero = ket({1.0, 0.0});
  const DensityOperator plus = ket({kR, kR});
  const double tn = oracle::qubit_trace_norm(zero.matrix() - plus.matrix());
  CHECK(tn == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const BayesResult b = bayes_optimal_test(zero, plus, 0.5);
  CHECK(b.min_error == doctest::Approx(0.5 * (1.0 - 0.5 * tn)).epsilon(1e-12));
  CHECK(bayes_error(zero, plus, 0.5, HermitianOperator(b.test.matrix())) == doctest::Approx(b.min_error).epsilon(1e-12));
}

TEST_CASE("bayes: invalid prior") {
  const DensityOperator mixed = maximally_mixed(2);
  for (double pi : {0.0, 1.0, -0.1, 1.5}) {
    CHECK(error_code([&] { bayes_optimal_test(mixed, mixed, pi); }) == Errc::invalid_prior);
    CHECK(error_code([&] { audenaert_bound(mixed, mixed, pi, 0.5); }) == Errc::invalid_prior);
  }
  CHECK(error_code([&] { audenaert_bound(mixed, mixed, 0.5, 1.5); }) == Errc::invalid_exponent);
  CHECK(error_code([&] { bayes_optimal_test(mixed, maximally_mixed(3), 0.5); }) ==
        Errc::dimension_mismatch);
}

TEST_CASE("bayes: no sampled test does better") {
  Sampler rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const Index d = 2 + trial % 3;
    const DensityOperator rho = rng.density(d);
    const DensityOperator sigma = rng.density(d);
    const double pi = rng.uniform(0.1, 0.9);
    const double best = bayes_optimal_test(rho, sigma, pi).min_error;
    double worst_gap = kInf;
    for (int k = 0; k < 1000; ++k) {
      const HermitianOperator t = k % 2 ? rng.povm_element(d) : rng.projective_test(d);
      worst_gap = std::min(worst_gap, bayes_error(rho, sigma, pi, t) - best);
    }
    CHECK(worst_gap >= -1e-10);
  }
}

TEST_CASE("threshold: examples") {
  Sampler rng(72);
  const DensityOperator rho = rng.density(3);
  const DensityOperator sigma = rng.density(3);
  const TestOutcome high = threshold_test(rho, sigma, 60.0, 1);
  CHECK(high.test_rank == 0);
  CHECK(high.alpha == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(high.beta == 0.0);
  CHECK(high.log_beta_over_n == -kInf);

  const TestOutcome low = threshold_test(rho, sigma, -60.0, 1);
  CHECK(low.test_rank == 3);
  CHECK(low.alpha == 0.0);
  CHECK(low.beta == doctest::Approx(1.0).epsilon(1e-12));

  const TestOutcome pure = threshold_test(ket({1.0, 0.0}), ket({kR, kR}), 0.0, 1);
  CHECK(pure.test_rank == 1);
  CHECK(pure.alpha + pure.beta == doctest::Approx(1.0 - kR).epsilon(1e-12));
  REQUIRE(pure.test.has_value());
  CHECK(pure.alpha ==
        doctest::Approx(1.0 - pure.test->expectation(ket({1.0, 0.0}).op())).epsilon(1e-12));
}

TEST_CASE("threshold: underflow switches to the reciprocal form") {
  const DensityOperator rho = diag_state({0.6, 0.4});
  const DensityOperator sigma = diag_state({0.3, 0.7});
  const TestOutcome big = threshold_test(rho, sigma, 800.0, 1);
  CHECK(big.underflow);
  CHECK(big.test_rank == 0);
  const TestOutcome small = threshold_test(rho, sigma, -800.0, 1);
  CHECK(small.underflow);
  CHECK(small.test_rank == 2);
  CHECK(error_code([&] { threshold_test(rho, sigma, kInf, 1); }) == Errc::invalid_exponent);
}

TEST_CASE("threshold: agrees with dense and Schur-Weyl oracles") {
  Sampler rng(73);
  for (int trial = 0; trial < 6; ++trial) {
    const DensityOperator rho = rng.bloch_xz(0.3, 0.9);
    const DensityOperator sigma = rng.bloch_xz(0.3, 0.9);
    const double a = rng.uniform(-0.5, 0.5);
    for (int n : {1, 3, 5}) {
      const DensityOperator rn = restrict(make_iid(rho), n);
      const DensityOperator sn = restrict(make_iid(sigma), n);
      const TestOutcome t = threshold_test(rn, sn, a, n);
      const oracle::Errors dense = oracle::threshold(rn.matrix(), sn.matrix(), a, n);
      const oracle::Errors sw = oracle::schur_weyl_threshold(rho.matrix(), sigma.matrix(), a, n);
      CHECK(t.alpha == doctest::Approx(dense.alpha).epsilon(1e-10));
      CHECK(t.beta == doctest::Approx(dense.beta).epsilon(1e-10));
      CHECK(t.alpha == doctest::Approx(sw.alpha).epsilon(1e-10));
      CHECK(t.beta == doctest::Approx(sw.beta).epsilon(1e-10));
    }
  }
}

TEST_CASE("threshold: errors are monotone in a") {
  Sampler rng(74);
  const DensityOperator rho = restrict(make_iid(rng.density(2)), 3);
  const DensityOperator sigma = restrict(make_iid(rng.density(2)), 3);
  double prev_alpha = -1.0;
  double prev_beta = 2.0;
  for (double a : uniform_grid(41, -3.0, 3.0)) {
    const TestOutcome t = threshold_test(rho, sigma, a, 3);
    CHECK(t.alpha >= prev_alpha - 1e-12);
    CHECK(t.beta <= prev_beta + 1e-12);
    prev_alpha = t.alpha;
    prev_beta = t.beta;
  }
}

TEST_CASE("threshold: direct-part bounds") {
  Sampler rng(75);
  for (int trial = 0; trial < 8; ++trial) {
    const DensityOperator rho1 = rng.density(2);
    const DensityOperator sigma1 = rng.density(2);
    for (int n : {1, 2, 4}) {
      const DensityOperator rn = restrict(make_iid(rho1), n);
      const DensityOperator sn = restrict(make_iid(sigma1), n);
      for (double a : {-1.0, -0.2, 0.0, 0.3, 1.0}) {
        const TestOutcome t = threshold_test(rn, sn, a, n);
        const double phi = finite_phi(rn, sn, n, a);
        CHECK(t.log_alpha_over_n <= -(phi - a) + 1e-9);
        CHECK(t.log_beta_over_n <= -phi + 1e-9);
      }
    }
  }
}

TEST_CASE("combined error: examples") {
  const DensityOperator mixed = maximally_mixed(2);
  CHECK(combined_error(mixed, mixed, 0.0, 1).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(combined_error(ket({1.0, 0.0}), ket({0.0, 1.0}), 0.0, 1).value == 0.0);
}

TEST_CASE("combined error: Bayes identity and moment bound") {
  Sampler rng(76);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityOperator rho = restrict(make_iid(rng.density(2)), 2);
    const DensityOperator sigma = restrict(make_iid(rng.density(2)), 2);
    const double a = rng.uniform(-1.0, 1.0);
    const int n = 2;
    const double w = std::exp(-n * a);
    const double e = combined_error(rho, sigma, a, n).value;
    const double bayes = bayes_optimal_test(rho, sigma, w / (1.0 + w)).min_error;
    CHECK(e == doctest::Approx((1.0 + w) * bayes).epsilon(1e-10));
    for (double s : uniform_grid(11)) {
      CHECK(e <= std::exp(-n * a * s) * oracle::moment(rho.matrix(), sigma.matrix(), s) + 1e-12);
    }
  }
}

TEST_CASE("combined error: rate approaches the Chernoff exponent") {
  Sampler rng(77);
  const DensityOperator rho1 = rng.bloch_xz(0.5, 0.9);
  const DensityOperator sigma1 = rng.bloch_xz(0.5, 0.9);
  const double c = -oracle::grid_minimize(
      [&](double s) { return std::log(oracle::qubit_moment(rho1.matrix(), sigma1.matrix(), s)); },
      0.0, 1.0);
  // Ties in the atom lattice make the gap oscillate with the parity of n.
  std::vector<double> gap;
  for (int n = 1; n <= 6; ++n) {
    const double rate = combined_error(restrict(make_iid(rho1), n), restrict(make_iid(sigma1), n),
                                       0.0, n).log_value / n;
    CHECK(rate <= -c + 1e-12);
    gap.push_back(-c - rate);
  }
  for (std::size_t i = 2; i < gap.size(); ++i) CHECK(gap[i] < gap[i - 2]);
}

TEST_CASE("audenaert: examples and random qutrits") {
  const DensityOperator mixed = maximally_mixed(2);
  const AudenaertCheck same = audenaert_bound(mixed, mixed, 0.5, 0.5);
  CHECK(same.lhs == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(same.rhs == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(same.holds);
  const AudenaertCheck orth = audenaert_bound(ket({1.0, 0.0}), ket({0.0, 1.0}), 0.5, 0.5);
  CHECK(orth.lhs == 0.0);
  CHECK(orth.rhs == 0.0);
  CHECK(orth.holds);

  Sampler rng(78);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityOperator rho = rng.density(3);
    const DensityOperator sigma = rng.density(3);
    const double pi = rng.uniform(0.05, 0.95);
    for (double s : uniform_grid(11)) CHECK(audenaert_bound(rho, sigma, pi, s).holds);
  }
}

TEST_CASE("sweep: identical models") {
  Sampler rng(79);
  const StateFamily m = make_iid(rng.density(2));
  const auto rows = exponent_sweep(m, m, -0.1, {4, 1, 2});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].n == 1);
  CHECK(rows[2].n == 4);
  for (const auto& row : rows) {
    CHECK(std::abs(row.pred_beta) < 1e-10);
    CHECK(std::abs(row.slope_beta) < 1e-12);
    CHECK(row.slope_alpha == -kInf);
  }
  // At a = 0 every eigenvalue ties and the strict test is empty.
  const auto tie = exponent_sweep(m, m, 0.0, {3});
  CHECK(std::abs(tie[0].slope_alpha) < 1e-12);
  CHECK(std::abs(tie[0].pred_alpha) < 1e-10);
  CHECK(tie[0].slope_beta == -kInf);
}

TEST_CASE("sweep: Bernoulli pair at n = 2000 through the exact evaluator") {
  const StateFamily p = make_iid(diag_state({0.5, 0.5}));
  const StateFamily q = make_iid(diag_state({0.9, 0.1}));
  const PsiProfile profile = psi_limit(p, q);
  const double a = 0.5 * (profile.d_right_0 + profile.d_left_1);
  const auto rows = exponent_sweep(p, q, profile, a, {2000});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].path == SweepPath::classical_exact);
  const double phi = legendre_phi(profile, a).value;
  CHECK(std::abs(rows[0].slope_beta + phi) <= 0.01);
  const oracle::LogErrors want = oracle::bernoulli_threshold(0.5, 0.9, a, 2000);
  CHECK(rows[0].slope_beta == doctest::Approx(want.log_beta / 2000).epsilon(1e-10));
  CHECK(rows[0].slope_alpha == doctest::Approx(want.log_alpha / 2000).epsilon(1e-10));
}

TEST_CASE("sweep: qubit gap shrinks with n") {
  Sampler rng(80);
  const StateFamily rho = make_iid(rng.bloch_xz(0.4, 0.9));
  const StateFamily sigma = make_iid(rng.bloch_xz(0.4, 0.9));
  const PsiProfile profile = psi_limit(rho, sigma);
  const double a = 0.5 * (profile.d_right_0 + profile.d_left_1);
  const auto rows = exponent_sweep(rho, sigma, profile, a, {2, 4, 8});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].path == SweepPath::dense);
  CHECK(rows[2].gap_beta < rows[0].gap_beta);
}

#include "common.hpp"

using namespace qht;
using namespace testing;

TEST_CASE("spectral_decompose groups the identity into one block") {
  const auto sd = spectral_decompose(HermitianOperator::identity(2), 1e-9);
  REQUIRE(sd.size() == 1);
  CHECK(sd.eigenvalues()[0] == doctest::Approx(1.0));
  CHECK(max_abs_diff(sd.projection(0).matrix(), Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("spectral_decompose of diag(1,2)") {
  const std::vector<double> d{1.0, 2.0};
  const auto sd = spectral_decompose(HermitianOperator::diagonal(d));
  REQUIRE(sd.size() == 2);
  CHECK(sd.eigenvalues()[0] == doctest::Approx(1.0));
  CHECK(sd.eigenvalues()[1] == doctest::Approx(2.0));
  CHECK(std::abs(sd.projection(0).matrix()(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(sd.projection(1).matrix()(1, 1) - 1.0) < 1e-12);
}

TEST_CASE("spectral_decompose invariants on random Hermitian matrices") {
  Sampler rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix g = rng.ginibre(8, 8);
    const HermitianOperator h(Matrix(0.5 * (g + g.adjoint())));
    const auto sd = spectral_decompose(h);
    const double norm = spectral_norm(h);
    CHECK(max_abs_diff(sd.reconstruct().matrix(), h.matrix()) <= 1e-9 * norm);

    Matrix sum = Matrix::Zero(8, 8);
    for (std::size_t i = 0; i < sd.size(); ++i) {
      const Matrix p = sd.projection(i).matrix();
      sum += p;
      CHECK(max_abs_diff(p * p, p) < 1e-10);
      for (std::size_t j = i + 1; j < sd.size(); ++j) {
        CHECK((p * sd.projection(j).matrix()).cwiseAbs().maxCoeff() < 1e-10);
      }
      if (i > 0) CHECK(sd.eigenvalues()[i] > sd.eigenvalues()[i - 1]);
    }
    CHECK(max_abs_diff(sum, Matrix::Identity(8, 8)) < 1e-10);

    // independent eigensolver
    const Eigen::VectorXd ref = oracle::eigenvalues(h.matrix());
    CHECK((eigensystem(h).values() - ref).cwiseAbs().maxCoeff() < 1e-12 * (1 + norm));
  }
}

TEST_CASE("spectral_decompose merges near-degenerate eigenvalues") {
  const std::vector<double> d{1.0, 1.0 + 1e-11, 3.0};
  const auto sd = spectral_decompose(HermitianOperator::diagonal(d), 1e-9);
  REQUIRE(sd.size() == 2);
  CHECK(sd.multiplicity(0) == 2);
  const auto fine = spectral_decompose(HermitianOperator::diagonal(d), 0.0);
  CHECK(fine.size() == 3);
}

TEST_CASE("non-Hermitian input is rejected, rounding noise is symmetrized") {
  Matrix m = mat2(1.0, 0.5, 0.0, 1.0);
  CHECK(error_code([&] { HermitianOperator h(m); }) == Errc::non_hermitian_input);

  Matrix near = mat2(1.0, 0.5, 0.5 + 1e-14, 1.0);
  const HermitianOperator h(near);
  CHECK(h.matrix()(0, 1) == h.matrix()(1, 0));

  Matrix bad = mat2(1.0, std::nan(""), std::nan(""), 1.0);
  CHECK(error_code([&] { HermitianOperator x(bad); }) == Errc::non_hermitian_input);
  CHECK(error_code([&] { HermitianOperator x(Matrix(Matrix::Zero(2, 3))); }) ==
        Errc::dimension_mismatch);
}

TEST_CASE("fractional_power examples") {
  const HermitianOperator half(Matrix(0.5 * Matrix::Identity(2, 2)));
  CHECK(max_abs_diff(fractional_power(half, 0.0).matrix(), Matrix::Identity(2, 2)) < 1e-12);

  const std::vector<double> d{4.0, 0.0};
  const Matrix root = fractional_power(HermitianOperator::diagonal(d), 0.5).matrix();
  CHECK(std::abs(root(0, 0) - 2.0) < 1e-12);
  CHECK(std::abs(root(1, 1)) < 1e-12);

  Sampler rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOperator a = rng.density(4, 1 + trial % 4);
    const Matrix prod = fractional_power(a.op(), 0.3).matrix() * fractional_power(a.op(), 0.7).matrix();
    CHECK(max_abs_diff(prod, a.matrix()) <= 1e-9);
    CHECK(max_abs_diff(fractional_power(a.op(), 1.0).matrix(), a.matrix()) < 1e-12);
    const Matrix p0 = fractional_power(a.op(), 0.0).matrix();
    CHECK(max_abs_diff(p0 * p0, p0) < 1e-10);
    CHECK(max_abs_diff(fractional_power(a.op(), 0.37).matrix(), oracle::power(a.matrix(), 0.37)) <
          1e-10);
  }
}

TEST_CASE("fractional_power rejects operators that are not PSD") {
  const std::vector<double> d{1.0, -0.5};
  CHECK(error_code([&] { fractional_power(HermitianOperator::diagonal(d), 0.5); }) ==
        Errc::not_positive_semidefinite);
  // tiny negative parts are clamped
  const std::vector<double> tiny{1.0, -1e-12};
  CHECK(fractional_power(HermitianOperator::diagonal(tiny), 0.5).matrix()(1, 1) == Complex(0.0));
}

TEST_CASE("positive_spectral_projection examples") {
  const std::vector<double> d{1.0, -1.0};
  const Projection p = positive_spectral_projection(HermitianOperator::diagonal(d));
  CHECK(p.rank() == 1);
  CHECK(max_abs_diff(p.matrix(), mat2(1, 0, 0, 0)) < 1e-12);

  CHECK(positive_spectral_projection(HermitianOperator::zero(3)).rank() == 0);

  const DensityOperator rho = ket({1, 0});
  const DensityOperator sigma = ket({1, 1});
  const HermitianOperator h = rho.op() - sigma.op();
  const Projection s = positive_spectral_projection(h);
  CHECK(s.rank() == 1);
  // Tr H{H>0} = ||H||_1 / 2 with ||H||_1 = √2
  CHECK(s.expectation(h) == doctest::Approx(oracle::qubit_trace_norm(h.matrix()) / 2).epsilon(1e-12));
  CHECK(s.expectation(h) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("trace_norm matches the closed form") {
  Sampler rng(2);
  for (int i = 0; i < 20; ++i) {
    const Matrix g = rng.ginibre(2, 2);
    const HermitianOperator h(Matrix(g + g.adjoint()));
    CHECK(trace_norm(h) == doctest::Approx(oracle::qubit_trace_norm(h.matrix())).epsilon(1e-12));
  }
}

TEST_CASE("min_trace_overlap examples") {
  Sampler rng(3);
  const DensityOperator rho = rng.density(3);
  CHECK(min_trace_overlap(rho.op(), rho.op()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(min_trace_overlap(ket({1, 0}).op(), ket({0, 1}).op())) < 1e-12);

  const DensityOperator a = rng.density(2);
  const DensityOperator b = rng.density(2);
  const double value = min_trace_overlap(a.op(), b.op());
  for (int k = 0; k <= 100; ++k) {
    const double s = k / 100.0;
    CHECK(value <= oracle::qubit_moment(a.matrix(), b.matrix(), s) + 1e-12);
  }
  CHECK(error_code([&] { min_trace_overlap(a.op(), rho.op()); }) == Errc::dimension_mismatch);
}

TEST_CASE("Audenaert inequality on random PSD pairs") {
  Sampler rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 2 + trial % 5;
    const double ta = rng.uniform(0.2, 3.0);
    const double tb = rng.uniform(0.2, 3.0);
    const HermitianOperator a(Matrix(ta * rng.density(d, 1 + trial % d).matrix()));
    const HermitianOperator b(Matrix(tb * rng.density(d).matrix()));
    const double lhs = min_trace_overlap(a, b);
    const double scale = std::max(ta, tb);
    for (int k = 0; k <= 100; ++k) {
      const double s = k / 100.0;
      CHECK(lhs <= oracle::moment(a.matrix(), b.matrix(), s) + 1e-12 * scale);
    }
  }
}

TEST_CASE("min_trace_overlap is the minimum over sampled tests") {
  Sampler rng(77);
  const DensityOperator rho = rng.density(3);
  const DensityOperator sigma = rng.density(3);
  const double best = min_trace_overlap(rho.op(), sigma.op());
  auto objective = [&](const HermitianOperator& t) {
    return 1.0 - trace_product(rho.op(), t) + trace_product(sigma.op(), t);
  };
  for (int i = 0; i < 500; ++i) {
    CHECK(objective(rng.projective_test(3)) >= best - 1e-10);
    CHECK(objective(rng.povm_element(3)) >= best - 1e-10);
  }
  const Projection s = positive_spectral_projection(rho.op() - sigma.op());
  CHECK(objective(HermitianOperator(s.matrix())) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("operator_min_duality: commuting operators give the entrywise minimum") {
  Sampler rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(4);
    std::vector<double> b(4);
    double expect = 0.0;
    for (int i = 0; i < 4; ++i) {
      a[i] = rng.uniform();
      b[i] = rng.uniform();
      expect += std::min(a[i], b[i]);
    }
    const auto md = operator_min_duality(HermitianOperator::diagonal(a), HermitianOperator::diagonal(b));
    CHECK(md.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(md.witness_psd);
  }
}

TEST_CASE("operator_min_duality counterexample has an indefinite witness") {
  const HermitianOperator a = HermitianOperator::outer(qht::Vector{{Complex(1, 0), Complex(0, 1)}});
  const HermitianOperator b = HermitianOperator::outer(qht::Vector{{Complex(1, 0), Complex(1, 0)}});
  const auto md = operator_min_duality(a, b);
  CHECK_FALSE(md.witness_psd);
  CHECK(md.witness_min_eigenvalue < 0.0);
  CHECK(oracle::eigenvalues(md.witness.matrix()).minCoeff() < 0.0);
}

TEST_CASE("operator_min_duality with identical operators") {
  Sampler rng(9);
  const HermitianOperator a(Matrix(2.0 * rng.density(3).matrix()));
  const auto md = operator_min_duality(a, a);
  CHECK(md.value == doctest::Approx(a.trace()).epsilon(1e-12));
  CHECK(max_abs_diff(md.witness.matrix(), a.matrix()) < 1e-12);
  CHECK(md.witness_psd);
}

TEST_CASE("operator_min_duality witness lies below both operators") {
  Sampler rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 2 + trial % 3;
    const HermitianOperator a(Matrix(rng.density(d).matrix()));
    const HermitianOperator b(Matrix(rng.uniform(0.5, 2.0) * rng.density(d).matrix()));
    const auto md = operator_min_duality(a, b);
    CHECK(md.value == doctest::Approx(md.witness.trace()).epsilon(1e-10));
    CHECK(md.value == doctest::Approx(min_trace_overlap(a, b)).epsilon(1e-10));
    CHECK(oracle::eigenvalues(a.matrix() - md.witness.matrix()).minCoeff() >= -1e-10);
    CHECK(oracle::eigenvalues(b.matrix() - md.witness.matrix()).minCoeff() >= -1e-10);
  }
}

TEST_CASE("kron examples") {
  const auto i2 = HermitianOperator::identity(2);
  CHECK(max_abs_diff(kron(i2, i2).matrix(), Matrix::Identity(4, 4)) == 0.0);
  const std::vector<double> e0{1.0, 0.0};
  const auto p = HermitianOperator::diagonal(e0);
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = 1.0;
  CHECK(max_abs_diff(kron(p, p).matrix(), expect) == 0.0);

  Sampler rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix ga = rng.ginibre(3, 3);
    const Matrix gb = rng.ginibre(3, 3);
    const HermitianOperator a(Matrix(ga + ga.adjoint()));
    const HermitianOperator b(Matrix(gb + gb.adjoint()));
    const HermitianOperator ab = kron(a, b);
    CHECK(std::abs(ab.trace() - a.trace() * b.trace()) <= 1e-12 * (1 + std::abs(a.trace() * b.trace())));
    CHECK(max_abs_diff(ab.matrix(), oracle::kron(a.matrix(), b.matrix())) < 1e-14 * (1 + ab.max_abs_entry()));
  }
}

TEST_CASE("kron enforces the size cap") {
  const auto i4 = HermitianOperator::identity(4);
  CHECK(error_code([&] { kron(i4, i4, 8); }) == Errc::size_overflow);
  CHECK(error_code([&] { kron_power(HermitianOperator::identity(2), 5, 16); }) == Errc::size_overflow);
  CHECK(kron_power(HermitianOperator::identity(2), 4, 16).dim() == 16);
}

TEST_CASE("partial_trace_last inverts a product") {
  Sampler rng(13);
  const DensityOperator a = rng.density(3);
  const DensityOperator b = rng.density(2);
  const auto ab = kron(a.op(), b.op());
  CHECK(max_abs_diff(partial_trace_last(ab, 2).matrix(), a.matrix()) < 1e-14);
  CHECK(error_code([&] { partial_trace_last(ab, 4); }) == Errc::dimension_mismatch);
}

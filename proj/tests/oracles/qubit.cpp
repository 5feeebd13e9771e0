#include <algorithm>
#include <cmath>

#include "oracles/oracles.hpp"

namespace oracle {

Eig2 eig2(const CMatrix& h) {
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const Complex b = h(0, 1);
  const double mid = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
  Eig2 out;
  out.lo = mid - rad;
  out.hi = mid + rad;
  if (std::abs(b) < 1e-300) {
    const bool first_low = a <= d;
    out.v_lo = first_low ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
    out.v_hi = first_low ? Eigen::Vector2cd(0, 1) : Eigen::Vector2cd(1, 0);
    return out;
  }
  // (h - λ) v = 0 with v = (b, λ - a)
  out.v_hi = Eigen::Vector2cd(b, out.hi - a).normalized();
  out.v_lo = Eigen::Vector2cd(b, out.lo - a).normalized();
  return out;
}

double qubit_moment(const CMatrix& rho, const CMatrix& sigma, double s) {
  const Eig2 r = eig2(rho);
  const Eig2 q = eig2(sigma);
  auto pw = [](double x, double e) { return x > 1e-14 ? std::pow(x, e) : 0.0; };
  const double lr[2] = {r.lo, r.hi};
  const double lq[2] = {q.lo, q.hi};
  const Eigen::Vector2cd vr[2] = {r.v_lo, r.v_hi};
  const Eigen::Vector2cd vq[2] = {q.v_lo, q.v_hi};
  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) total += pw(lr[i], s) * pw(lq[j], 1.0 - s) * std::norm(vr[i].dot(vq[j]));
  }
  return total;
}

double qubit_trace_norm(const CMatrix& h) {
  const Eig2 e = eig2(h);
  return std::abs(e.lo) + std::abs(e.hi);
}

CMatrix symmetric_power(const CMatrix& m, int k) {
  // column j: coefficients in t of (m00 + m10 t)^{k-j} (m01 + m11 t)^j
  CMatrix c = CMatrix::Zero(k + 1, k + 1);
  for (int j = 0; j <= k; ++j) {
    std::vector<Complex> poly{1.0};
    auto mul = [&poly](Complex c0, Complex c1) {
      std::vector<Complex> next(poly.size() + 1, 0.0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i] += poly[i] * c0;
        next[i + 1] += poly[i] * c1;
      }
      poly = std::move(next);
    };
    for (int i = 0; i < k - j; ++i) mul(m(0, 0), m(1, 0));
    for (int i = 0; i < j; ++i) mul(m(0, 1), m(1, 1));
    for (int i = 0; i <= k; ++i) c(i, j) = poly[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd sq(k + 1);
  for (int i = 0; i <= k; ++i) sq(i) = std::sqrt(std::exp(log_binomial(k, i)));
  return sq.cwiseInverse().asDiagonal() * c * sq.asDiagonal();
}

Errors schur_weyl_threshold(const CMatrix& rho1, const CMatrix& sigma1, double a, int n) {
  const double scale = std::exp(-n * a);
  const Complex det_r = rho1.determinant();
  const Complex det_s = sigma1.determinant();
  Errors out;
  for (int t = 0; 2 * t <= n; ++t) {
    const int k = n - 2 * t;
    const double mult =
        std::exp(log_binomial(n, t)) - (t > 0 ? std::exp(log_binomial(n, t - 1)) : 0.0);
    CMatrix r = std::pow(det_r, t) * symmetric_power(rho1, k);
    CMatrix q = std::pow(det_s, t) * symmetric_power(sigma1, k);
    r = 0.5 * (r + r.adjoint()).eval();
    q = 0.5 * (q + q.adjoint()).eval();
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(scale * r - q);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const auto v = es.eigenvectors().col(i);
      if (es.eigenvalues()(i) > 1e-12 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff())) {
        out.beta += mult * (v.adjoint() * q * v)(0, 0).real();
      } else {
        out.alpha += mult * (v.adjoint() * r * v)(0, 0).real();
      }
    }
  }
  return out;
}

}  // namespace oracle

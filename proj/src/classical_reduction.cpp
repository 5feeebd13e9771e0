#include "qht/classical_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qht/error.hpp"
#include "qht/numeric.hpp"

namespace qht {
namespace {

struct LatticePoint {
  double value;
  double log_p;
  double log_q;
};

bool merge_close(double a, double b) {
  return std::abs(a - b) <= kRatioMergeTolerance * (1.0 + std::abs(a));
}

// Sorts by value and merges neighbours within the ratio tolerance.
void normalize_lattice(std::vector<LatticePoint>& pts) {
  std::sort(pts.begin(), pts.end(),
            [](const LatticePoint& x, const LatticePoint& y) { return x.value < y.value; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (out > 0 && merge_close(pts[out - 1].value, pts[i].value)) {
      pts[out - 1].log_p = log_add_exp(pts[out - 1].log_p, pts[i].log_p);
      pts[out - 1].log_q = log_add_exp(pts[out - 1].log_q, pts[i].log_q);
    } else {
      pts[out++] = pts[i];
    }
  }
  pts.resize(out);
}

double log_mass(std::span<const double> w) {
  CompensatedSum sum;
  for (double x : w) sum += x;
  return safe_log(sum.value());
}

}  // namespace

double ClassicalPair::total_p() const { return std::exp(log_mass(p)); }
double ClassicalPair::total_q() const { return std::exp(log_mass(q)); }

double ClassicalPair::log_moment(double s) const {
  std::vector<double> terms;
  terms.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) {
    const double overlap = p[k] / lambda[k];
    terms.push_back(s * std::log(lambda[k]) + (1.0 - s) * std::log(eta[k]) + std::log(overlap));
  }
  return log_sum_exp(terms);
}

ClassicalPair nussbaum_szkola(const DensityOperator& rho, const DensityOperator& sigma,
                              double group_tol) {
  require_same_dim(rho.op(), sigma.op(), "nussbaum_szkola");
  const SpectralDecomposition dr = spectral_decompose(rho.op(), group_tol);
  const SpectralDecomposition ds = spectral_decompose(sigma.op(), group_tol);
  require_positive_semidefinite(dr.eigensystem().values());
  require_positive_semidefinite(ds.eigensystem().values());
  const double zr = zero_threshold(dr.eigensystem().values());
  const double zs = zero_threshold(ds.eigensystem().values());
  const RealMatrix w = dr.eigensystem().overlap_weights(ds.eigensystem());

  ClassicalPair pair;
  for (std::size_t i = 0; i < dr.size(); ++i) {
    const double li = dr.eigenvalues()[i];
    if (li <= zr) continue;
    for (std::size_t j = 0; j < ds.size(); ++j) {
      const double ej = ds.eigenvalues()[j];
      if (ej <= zs) continue;
      const double overlap =
          w.block(dr.block_begin(i), ds.block_begin(j), dr.multiplicity(i), ds.multiplicity(j))
              .sum();
      if (overlap <= kAtomPruneThreshold) continue;
      pair.atoms.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
      pair.p.push_back(li * overlap);
      pair.q.push_back(ej * overlap);
      pair.lambda.push_back(li);
      pair.eta.push_back(ej);
    }
  }
  return pair;
}

double quantum_moment(const DensityOperator& rho, const DensityOperator& sigma, double s) {
  require_same_dim(rho.op(), sigma.op(), "quantum_moment");
  return trace_product(fractional_power(rho.op(), s), fractional_power(sigma.op(), 1.0 - s));
}

MomentCheck moment_identity(const ClassicalPair& pair, const DensityOperator& rho,
                            const DensityOperator& sigma, double s) {
  MomentCheck out;
  out.classical = std::exp(pair.log_moment(s));
  out.quantum = quantum_moment(rho, sigma, s);
  out.gap = std::abs(out.classical - out.quantum);
  return out;
}

MinSumCheck min_sum_bound(const ClassicalPair& pair, double a, int n, double e_n) {
  std::vector<double> terms;
  terms.reserve(pair.size());
  const double shift = static_cast<double>(n) * a;
  for (std::size_t k = 0; k < pair.size(); ++k) {
    terms.push_back(std::min(std::log(pair.p[k]) - shift, std::log(pair.q[k])));
  }
  MinSumCheck out;
  const double ls = log_sum_exp(terms);
  out.lower = ls == -kInf ? 0.0 : 0.5 * std::exp(ls);
  out.holds = e_n >= out.lower - 1e-12;
  return out;
}

double RateVariable::mass() const {
  CompensatedSum sum;
  for (double w : weights) sum += w;
  return sum.value();
}

double RateVariable::tail_at_least(double t) const {
  CompensatedSum sum;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] >= t) sum += weights[k];
  }
  return sum.value();
}

double RateVariable::tail_above(double t) const {
  CompensatedSum sum;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] > t) sum += weights[k];
  }
  return sum.value();
}

RateVariables rate_variables(const ClassicalPair& pair, int n) {
  if (n < 1) throw Error(Errc::index_out_of_range, "rate_variables needs n >= 1");
  RateVariables out;
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < pair.size(); ++k) {
    const double llr = std::log(pair.q[k]) - std::log(pair.p[k]);
    out.x.values.push_back(inv * llr);
    out.x.weights.push_back(pair.p[k]);
    out.y.values.push_back(-inv * llr);
    out.y.weights.push_back(pair.q[k]);
  }
  return out;
}

ProductError product_error_exact(std::span<const double> p1, std::span<const double> q1, double a,
                                 int n) {
  if (p1.size() != q1.size()) {
    throw Error(Errc::dimension_mismatch, "p1 and q1 have different lengths");
  }
  if (n < 1) throw Error(Errc::index_out_of_range, "product_error_exact needs n >= 1");
  if (!std::isfinite(a)) throw Error(Errc::invalid_exponent, "threshold a must be finite");
  for (std::size_t k = 0; k < p1.size(); ++k) {
    if (!(p1[k] >= 0.0) || !(q1[k] >= 0.0) || !std::isfinite(p1[k]) || !std::isfinite(q1[k])) {
      throw Error(Errc::invalid_model, "distributions must be finite and nonnegative");
    }
  }

  std::vector<LatticePoint> atoms;
  for (std::size_t k = 0; k < p1.size(); ++k) {
    if (p1[k] > 0.0 && q1[k] > 0.0) {
      const double lp = std::log(p1[k]);
      const double lq = std::log(q1[k]);
      atoms.push_back({lp - lq, lp, lq});
    }
  }
  ProductError out;
  if (atoms.empty()) {
    out.log_alpha = -kInf;
    out.log_beta = -kInf;
    out.degenerate = true;
    return out;
  }
  normalize_lattice(atoms);

  const double na = static_cast<double>(n) * a;
  const double threshold = na + kRatioMergeTolerance * (1.0 + std::abs(na));

  if (atoms.size() == 1) {
    // Every word has the same likelihood ratio δ^n.
    const double total = static_cast<double>(n) * atoms[0].value;
    out.degenerate = true;
    out.lattice_size = 1;
    if (total > threshold) {
      out.log_alpha = -kInf;
      out.log_beta = static_cast<double>(n) * atoms[0].log_q;
    } else {
      out.log_alpha = static_cast<double>(n) * atoms[0].log_p;
      out.log_beta = -kInf;
    }
    return out;
  }

  std::vector<LatticePoint> state{{0.0, 0.0, 0.0}};
  std::vector<LatticePoint> next;
  for (int step = 0; step < n; ++step) {
    next.clear();
    next.reserve(state.size() * atoms.size());
    for (const LatticePoint& atom : atoms) {
      const auto begin = static_cast<std::ptrdiff_t>(next.size());
      for (const LatticePoint& pt : state) {
        next.push_back({pt.value + atom.value, pt.log_p + atom.log_p, pt.log_q + atom.log_q});
      }
      std::inplace_merge(next.begin(), next.begin() + begin, next.end(),
                         [](const LatticePoint& x, const LatticePoint& y) { return x.value < y.value; });
    }
    normalize_lattice(next);
    if (next.size() > kRatioLatticeCap) {
      throw Error(Errc::ratio_lattice_overflow,
                  "likelihood-ratio lattice exceeds " + std::to_string(kRatioLatticeCap) +
                      " points at step " + std::to_string(step + 1));
    }
    state.swap(next);
  }

  std::vector<double> alpha_terms;
  std::vector<double> beta_terms;
  for (const LatticePoint& pt : state) {
    if (pt.value > threshold) {
      beta_terms.push_back(pt.log_q);
    } else {
      alpha_terms.push_back(pt.log_p);
    }
  }
  out.log_alpha = alpha_terms.empty() ? -kInf : log_sum_exp(alpha_terms);
  out.log_beta = beta_terms.empty() ? -kInf : log_sum_exp(beta_terms);
  out.lattice_size = state.size();
  return out;
}

}  // namespace qht

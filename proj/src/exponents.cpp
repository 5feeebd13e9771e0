#include "qht/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <string>

#include "qht/error.hpp"
#include "qht/factorization.hpp"
#include "qht/numeric.hpp"

namespace qht {
namespace {

constexpr double kInvPhi = 0.6180339887498949;

double pow0(double x, double t) { return x > 0.0 ? std::pow(x, t) : 0.0; }

struct Argmax {
  double x;
  double value;
};

// Maximizes a unimodal g on [lo, hi].
Argmax golden_max(const std::function<double(double)>& g, double lo, double hi,
                  double tol = kGoldenTolerance) {
  Argmax best{lo, g(lo)};
  const double ghi = g(hi);
  if (ghi > best.value) best = {hi, ghi};
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double gc = g(c);
  double gd = g(d);
  while (b - a > tol) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kInvPhi * (b - a);
      gd = g(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double gm = g(mid);
  for (const Argmax cand : {Argmax{c, gc}, Argmax{d, gd}, Argmax{mid, gm}}) {
    if (cand.value > best.value) best = cand;
  }
  return best;
}

// Grid scan followed by golden refinement in the neighbouring cells.
Argmax grid_golden_max(const std::function<double(double)>& g, const std::vector<double>& grid) {
  std::size_t best = 0;
  double best_value = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = g(grid[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo = grid[best > 0 ? best - 1 : 0];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  Argmax refined = golden_max(g, lo, hi);
  if (best_value > refined.value) refined = {grid[best], best_value};
  return refined;
}

double richardson(const std::function<double(double)>& diff_quotient) {
  const double d1 = diff_quotient(1e-3);
  const double d2 = diff_quotient(5e-4);
  const double d3 = diff_quotient(2.5e-4);
  const double r1 = 2.0 * d2 - d1;
  const double r2 = 2.0 * d3 - d2;
  const double est = (4.0 * r2 - r1) / 3.0;
  if (std::isnan(est)) {
    throw Error(Errc::numerical_failure, "derivative estimate is not a number");
  }
  if (std::abs(est) > kDerivativeCap) return est > 0 ? kInf : -kInf;
  return est;
}

struct Eig {
  Eigensystem sys;
  Index first;  // first column of the support
};

Eig positive_part(const HermitianOperator& a) {
  Eigensystem sys = eigensystem(a);
  require_positive_semidefinite(sys.values());
  const double thr = zero_threshold(sys.values());
  Index first = 0;
  while (first < sys.dim() && sys.values()(first) <= thr) ++first;
  return {std::move(sys), first};
}

}  // namespace

const char* to_string(PsiMethod m) noexcept {
  switch (m) {
    case PsiMethod::exact_iid: return "exact_iid";
    case PsiMethod::transfer_matrix: return "transfer_matrix";
    case PsiMethod::finite_n_sandwich: return "finite_n_sandwich";
  }
  return "unknown";
}

const char* to_string(SteinCase c) noexcept {
  switch (c) {
    case SteinCase::equal_supports: return "psi1_zero";
    case SteinCase::support_mismatch: return "psi1_negative";
    case SteinCase::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

std::vector<double> uniform_grid(int points, double lo, double hi) {
  if (points < 2) throw Error(Errc::config_error, "grid needs at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  }
  out.back() = hi;
  return out;
}

PsiProfile build_profile(std::function<double(double)> f, std::vector<double> grid,
                         PsiMethod method) {
  PsiProfile p;
  p.evaluator = std::move(f);
  p.grid = std::move(grid);
  p.method = method;
  p.values.reserve(p.grid.size());
  for (double s : p.grid) p.values.push_back(p.evaluator(s));
  const BoundaryDerivatives d = psi_boundary_derivatives(p.evaluator);
  p.d_right_0 = d.d_right_0;
  p.d_left_1 = d.d_left_1;

  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < p.values.size(); ++i) {
    const double h1 = p.grid[i] - p.grid[i - 1];
    const double h2 = p.grid[i + 1] - p.grid[i];
    const double dd = (p.values[i + 1] - p.values[i]) / h2 - (p.values[i] - p.values[i - 1]) / h1;
    worst = std::min(worst, dd * std::min(h1, h2));
  }
  if (worst < -1e-9) {
    p.warnings.push_back("discrete convexity violated (min second difference " +
                         std::to_string(worst) + ")");
  }
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (p.grid[i] >= 0.0 && p.grid[i] <= 1.0 && p.values[i] > 1e-12) {
      p.warnings.push_back("psi positive on [0,1] at s = " + std::to_string(p.grid[i]));
      break;
    }
  }
  return p;
}

double psi_n(const DensityOperator& rho_n, const DensityOperator& sigma_n, int n, double s) {
  require_same_dim(rho_n.op(), sigma_n.op(), "psi_n");
  if (n < 1) throw Error(Errc::index_out_of_range, "psi_n needs n >= 1");
  const Eig a = positive_part(rho_n.op());
  const Eig b = positive_part(sigma_n.op());
  const Index ra = a.sys.dim() - a.first;
  const Index rb = b.sys.dim() - b.first;
  if (ra == 0 || rb == 0) return -kInf;
  if (a.sys.block_overlap(a.first, ra, b.sys, b.first, rb) <= kAtomPruneThreshold) return -kInf;

  const double za = zero_threshold(a.sys.values());
  const double zb = zero_threshold(b.sys.values());
  const HermitianOperator pa(a.sys.apply([s, za](double l) { return l > za ? std::pow(l, s) : 0.0; }));
  const HermitianOperator pb(
      b.sys.apply([s, zb](double l) { return l > zb ? std::pow(l, 1.0 - s) : 0.0; }));
  const double t = trace_product(pa, pb);
  return t > 0.0 ? std::log(t) / n : -kInf;
}

std::function<double(double)> finite_psi(const DensityOperator& rho_n,
                                         const DensityOperator& sigma_n, int n) {
  auto pair = std::make_shared<const ClassicalPair>(nussbaum_szkola(rho_n, sigma_n));
  if (pair->size() == 0) {
    throw Error(Errc::orthogonal_supports, "Tr rho^s sigma^(1-s) vanishes (orthogonal supports)");
  }
  const double inv = 1.0 / n;
  return [pair, inv](double s) { return inv * pair->log_moment(s); };
}

bool is_irreducible(const RealMatrix& q) {
  const Index n = q.rows();
  if (n <= 1) return true;
  auto reaches_all = [n](const auto& edge) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::deque<Index> todo{0};
    seen[0] = 1;
    Index count = 1;
    while (!todo.empty()) {
      const Index x = todo.front();
      todo.pop_front();
      for (Index y = 0; y < n; ++y) {
        if (!seen[static_cast<std::size_t>(y)] && edge(x, y)) {
          seen[static_cast<std::size_t>(y)] = 1;
          ++count;
          todo.push_back(y);
        }
      }
    }
    return count == n;
  };
  return reaches_all([&q](Index x, Index y) { return q(x, y) > 0.0; }) &&
         reaches_all([&q](Index x, Index y) { return q(y, x) > 0.0; });
}

SpectralRadius perron_root(const RealMatrix& q) {
  SpectralRadius out;
  const Index n = q.rows();
  if (n == 0) return out;
  if (q.minCoeff() < 0.0) throw Error(Errc::numerical_failure, "perron_root needs a nonnegative matrix");
  out.reducible = !is_irreducible(q);
  if (n == 1) {
    out.value = q(0, 0);
    return out;
  }
  if (out.reducible) {
    const Eigen::EigenSolver<RealMatrix> es(q, false);
    double best = 0.0;
    for (Index i = 0; i < n; ++i) best = std::max(best, std::abs(es.eigenvalues()(i)));
    out.value = best;
    return out;
  }
  const double c = 0.5 * q.rowwise().sum().maxCoeff();
  const RealMatrix m = q + c * RealMatrix::Identity(n, n);
  RealVector v = RealVector::Constant(n, 1.0 / static_cast<double>(n));
  for (int iter = 0; iter < 200000; ++iter) {
    const RealVector w = m * v;
    const RealVector ratio = w.cwiseQuotient(v);
    const double lo = ratio.minCoeff();
    const double hi = ratio.maxCoeff();
    if (hi - lo <= 1e-13 * hi) {
      out.value = 0.5 * (lo + hi) - c;
      return out;
    }
    v = w / w.sum();
  }
  out.converged = false;
  const Eigen::EigenSolver<RealMatrix> es(q, false);
  double best = 0.0;
  for (Index i = 0; i < n; ++i) best = std::max(best, std::abs(es.eigenvalues()(i)));
  out.value = best;
  return out;
}

TransferFamily::TransferFamily(const HiddenMarkovModel& rho, const HiddenMarkovModel& sigma)
    : T_(rho.T), S_(sigma.T), r_(rho.r), p_(sigma.r) {
  if (rho.alphabet() != sigma.alphabet() || rho.site_dim != sigma.site_dim) {
    throw Error(Errc::dimension_mismatch, "hidden Markov models differ in alphabet or site dim");
  }
  const Index nx = rho.alphabet();
  site_pairs_.resize(static_cast<std::size_t>(nx * nx));
  for (Index x = 0; x < nx; ++x) {
    for (Index y = 0; y < nx; ++y) {
      if (T_(x, y) > 0.0 && S_(x, y) > 0.0) {
        site_pairs_[static_cast<std::size_t>(x * nx + y)] =
            nussbaum_szkola(rho.site(x, y), sigma.site(x, y));
      }
    }
    boundary_pairs_.push_back(nussbaum_szkola(DensityOperator::trusted(rho.boundary(x)),
                                              DensityOperator::trusted(sigma.boundary(x))));
  }
}

TransferMatrix TransferFamily::at(double s) const {
  const Index nx = alphabet();
  TransferMatrix t;
  t.Q = RealMatrix::Zero(nx, nx);
  t.a = RealVector::Zero(nx);
  t.b = RealVector::Zero(nx);
  for (Index x = 0; x < nx; ++x) {
    for (Index y = 0; y < nx; ++y) {
      const auto& pair = site_pairs_[static_cast<std::size_t>(x * nx + y)];
      if (!pair) continue;
      t.Q(x, y) = pow0(T_(x, y), s) * pow0(S_(x, y), 1.0 - s) * std::exp(pair->log_moment(s));
    }
    t.a(x) = pow0(r_(x), s) * pow0(p_(x), 1.0 - s);
    t.b(x) = std::exp(boundary_pairs_[static_cast<std::size_t>(x)].log_moment(s));
  }
  const SpectralRadius sr = perron_root(t.Q);
  t.spectral_radius = sr.value;
  t.reducible = sr.reducible;
  return t;
}

double TransferFamily::log_radius(double s) const { return safe_log(at(s).spectral_radius); }

TransferMatrix transfer_matrix_Q(const HiddenMarkovModel& rho, const HiddenMarkovModel& sigma,
                                 double s) {
  return TransferFamily(rho, sigma).at(s);
}

double transfer_pairing(const TransferMatrix& t, int n) {
  if (n < 1) throw Error(Errc::index_out_of_range, "pairing needs n >= 1");
  RealVector v = t.b;
  for (int k = 1; k < n; ++k) v = t.Q * v;
  CompensatedSum sum;
  for (Index x = 0; x < v.size(); ++x) sum += t.a(x) * v(x);
  return sum.value();
}

std::optional<std::pair<HiddenMarkovModel, HiddenMarkovModel>> as_markov_pair(
    const StateFamily& rho, const StateFamily& sigma) {
  auto view = [](const StateFamily& m) -> std::optional<HiddenMarkovModel> {
    if (const auto* h = std::get_if<HiddenMarkovModel>(&m)) return *h;
    if (const auto* c = std::get_if<ClassicalMarkovModel>(&m)) return as_hidden_markov(*c);
    return std::nullopt;
  };
  auto a = view(rho);
  auto b = view(sigma);
  if (!a || !b || a->alphabet() != b->alphabet() || a->site_dim != b->site_dim) {
    return std::nullopt;
  }
  return std::make_pair(std::move(*a), std::move(*b));
}

PsiProfile psi_limit(const StateFamily& rho, const StateFamily& sigma, const PsiOptions& options) {
  const Index d = site_dim(rho);
  if (d != site_dim(sigma)) {
    throw Error(Errc::dimension_mismatch, "models have different one-site dimensions");
  }
  std::vector<double> grid = uniform_grid(options.grid_points);

  const auto* iid_r = std::get_if<IidModel>(&rho);
  const auto* iid_s = std::get_if<IidModel>(&sigma);
  if (iid_r && iid_s) {
    return build_profile(finite_psi(iid_r->rho1, iid_s->rho1, 1), std::move(grid),
                         PsiMethod::exact_iid);
  }

  std::vector<std::string> notes;
  if (auto pair = as_markov_pair(rho, sigma)) {
    const auto& [hr, hs] = *pair;
    const MarkovSupportReport report =
        markov_support_conditions(hr, hs, canonical_block_projections(hr, hs));
    auto family = std::make_shared<const TransferFamily>(hr, hs);
    const bool irreducible = !family->at(0.5).reducible;
    if (report.cond1 == Tristate::True && irreducible) {
      PsiProfile p = build_profile([family](double s) { return family->log_radius(s); },
                                   std::move(grid), PsiMethod::transfer_matrix);
      return p;
    }
    if (report.cond1 != Tristate::True) {
      notes.push_back("block condition fails; transfer matrix does not reproduce the moments");
    }
    if (!irreducible) notes.push_back("ReducibleTransfer: Q(1/2) is reducible");
  }

  const Index small_cap = std::min<Index>(64, options.size_cap);
  const Index large_cap = std::min<Index>(1024, options.size_cap);
  int m = options.sandwich_m;
  if (m <= 0) m = std::max(1, std::min(max_sites(rho, small_cap), max_sites(sigma, small_cap)));
  int n_max = options.sandwich_n_max;
  if (n_max <= 0) n_max = std::min(max_sites(rho, large_cap), max_sites(sigma, large_cap));
  n_max = std::max(n_max, m);
  const FactorizationEstimate fr = factorization_constants(rho, m, n_max, options.size_cap);
  const FactorizationEstimate fs = factorization_constants(sigma, m, n_max, options.size_cap);
  const double eta = std::max(fr.eta(), fs.eta());
  PsiProfile p = psi_sandwich(rho, sigma, m, eta, std::move(grid), options.size_cap);
  for (auto& note : notes) p.warnings.push_back(note);
  if (n_max <= m) p.warnings.push_back("factorization constants not exercised (n_max <= m)");
  if (!std::isfinite(eta)) p.warnings.push_back("factorization unsatisfiable at checked sizes");
  p.warnings.push_back("eta estimated from n <= " + std::to_string(n_max) +
                       "; a lower bound on the true constant");
  return p;
}

PhiValue legendre_phi(const PsiProfile& profile, double a) {
  const auto g = [&profile, a](double s) { return a * s - profile(s); };
  const Argmax best = grid_golden_max(g, profile.grid.empty() ? uniform_grid(kDefaultGridSize)
                                                              : profile.grid);
  PhiValue out;
  out.value = best.value;
  out.argmax = best.x;
  out.half_width = profile.sandwich_width;
  return out;
}

double hat_phi(const PsiProfile& profile, double a) { return legendre_phi(profile, a).value - a; }

double chernoff_exponent(const PsiProfile& profile) { return legendre_phi(profile, 0.0).value; }

HoeffdingSolution hoeffding_solve(const PsiProfile& profile, double r) {
  HoeffdingSolution out;
  out.r = r;
  const double psi1 = profile.psi_at_1();
  const double floor = -psi1;
  const double tie = 1e-14 * (1.0 + std::abs(floor));
  if (r < floor - tie) {
    out.a_r = kInf;
    out.s_r = 1.0;
    out.b_r = kInf;
    out.phi_at_a_r = kInf;
    out.exponent = -kInf;
    return out;
  }

  // b(r) by direct maximization of the quasi-concave ratio.
  const double limit_at_1 = profile.d_left_1 - psi1;
  const auto ratio = [&profile, r](double s) { return (-s * r - profile(s)) / (1.0 - s); };
  std::vector<double> inner;
  for (double s : profile.grid) {
    if (s < 1.0) inner.push_back(s);
  }
  if (inner.back() > 1.0 - 1e-6) inner.back() = 1.0 - 1e-6;
  const Argmax direct = grid_golden_max(ratio, inner);
  out.b_r = direct.value;
  if (direct.x > 1.0 - 1e-5 && limit_at_1 > out.b_r) out.b_r = limit_at_1;

  if (r <= floor + tie) {
    out.a_r = profile.d_left_1;
    out.s_r = 1.0;
    out.phi_at_a_r = std::isfinite(out.a_r) ? out.a_r + r : kInf;
    if (!std::isfinite(out.a_r)) out.b_r = kInf;
    out.exponent = -out.b_r;
    return out;
  }

  double hi = profile.d_left_1;
  if (!std::isfinite(hi)) {
    hi = 1.0;
    while (hat_phi(profile, hi) > r) {
      hi *= 2.0;
      if (hi > 1e12) throw Error(Errc::numerical_failure, "cannot bracket a_r");
    }
  }
  double lo = std::min(-r - profile.psi_at_0() - 1.0, hi - 1.0);
  while (hat_phi(profile, lo) < r) lo -= 2.0 * (hi - lo);

  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    mid = 0.5 * (lo + hi);
    const double v = hat_phi(profile, mid);
    if (std::abs(v - r) <= 1e-12) break;
    if (v > r) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * (1.0 + std::abs(mid))) break;
  }
  out.a_r = mid;
  const PhiValue phi = legendre_phi(profile, mid);
  out.s_r = phi.argmax;
  out.phi_at_a_r = phi.value;
  out.exponent = -out.b_r;
  return out;
}

BoundaryDerivatives psi_boundary_derivatives(const std::function<double(double)>& psi) {
  const double f0 = psi(0.0);
  const double f1 = psi(1.0);
  BoundaryDerivatives out;
  out.d_right_0 = richardson([&](double h) { return (psi(h) - f0) / h; });
  out.d_left_1 = richardson([&](double h) { return (f1 - psi(1.0 - h)) / h; });
  return out;
}

BoundaryDerivatives psi_boundary_derivatives(const PsiProfile& profile) {
  return {profile.d_right_0, profile.d_left_1};
}

BoundaryDerivatives psi_boundary_derivatives(const DensityOperator& rho_n,
                                             const DensityOperator& sigma_n, int n) {
  return psi_boundary_derivatives(finite_psi(rho_n, sigma_n, n));
}

double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho.op(), sigma.op(), "relative_entropy");
  const Eig a = positive_part(rho.op());
  const Eig b = positive_part(sigma.op());
  const Index ra = a.sys.dim() - a.first;
  const Index rb = b.sys.dim() - b.first;
  const double captured = a.sys.block_overlap(a.first, ra, b.sys, b.first, rb);
  if (captured < static_cast<double>(ra) - 1e-8) return kInf;

  CompensatedSum sum;
  for (Index i = a.first; i < a.sys.dim(); ++i) {
    const double l = a.sys.values()(i);
    sum += l * std::log(l);
  }
  const RealVector q = b.sys.quadratic_forms(rho.op(), b.first, rb);
  for (Index j = 0; j < rb; ++j) sum += -q(j) * std::log(b.sys.values()(b.first + j));
  return sum.value();
}

double markov_mean_relative_entropy(const HiddenMarkovModel& rho, const HiddenMarkovModel& sigma) {
  const MarkovSupportReport report = markov_support_conditions(rho, sigma);
  if (!report.cond2 || !report.cond3) {
    throw Error(Errc::support_violation,
                "mean relative entropy is infinite (absolute continuity conditions fail)");
  }
  CompensatedSum sum;
  const Index nx = rho.alphabet();
  for (Index x = 0; x < nx; ++x) {
    for (Index y = 0; y < nx; ++y) {
      const double t = rho.T(x, y);
      if (t <= 0.0) continue;
      sum += rho.r(x) * t * std::log(t / sigma.T(x, y));
      sum += rho.r(x) * t * relative_entropy(rho.site(x, y), sigma.site(x, y));
    }
  }
  return sum.value();
}

double psi_second_derivative(const ClassicalPair& pair, double s) {
  if (pair.size() == 0) throw Error(Errc::orthogonal_supports, "no common support");
  std::vector<double> logw(pair.size());
  std::vector<double> f(pair.size());
  for (std::size_t k = 0; k < pair.size(); ++k) {
    logw[k] = s * std::log(pair.p[k]) + (1.0 - s) * std::log(pair.q[k]);
    f[k] = std::log(pair.lambda[k]) - std::log(pair.eta[k]);
  }
  const double z = log_sum_exp(logw);
  CompensatedSum mean;
  for (std::size_t k = 0; k < pair.size(); ++k) mean += std::exp(logw[k] - z) * f[k];
  const double mu = mean.value();
  CompensatedSum var;
  for (std::size_t k = 0; k < pair.size(); ++k) {
    const double dev = f[k] - mu;
    var += std::exp(logw[k] - z) * dev * dev;
  }
  return std::max(0.0, var.value());
}

double psi_second_derivative(const DensityOperator& rho_n, const DensityOperator& sigma_n,
                             double s) {
  return psi_second_derivative(nussbaum_szkola(rho_n, sigma_n), s);
}

AffineReport affine_structure(const DensityOperator& rho_n, const DensityOperator& sigma_n) {
  const ClassicalPair pair = nussbaum_szkola(rho_n, sigma_n);
  if (pair.size() == 0) throw Error(Errc::orthogonal_supports, "no common support");
  AffineReport out;
  out.second_derivative_at_half = psi_second_derivative(pair, 0.5);
  for (double s : uniform_grid(11)) {
    out.max_second_derivative = std::max(out.max_second_derivative, psi_second_derivative(pair, s));
  }
  out.is_affine = out.second_derivative_at_half <= 1e-8;
  if (!out.is_affine) return out;

  const double delta = pair.lambda[0] / pair.eta[0];
  out.delta = delta;
  out.pairing = pair.atoms;
  bool ok = true;
  std::vector<Index> is;
  std::vector<Index> js;
  for (std::size_t k = 0; k < pair.size(); ++k) {
    if (std::abs(pair.lambda[k] - delta * pair.eta[k]) > 1e-9) ok = false;
    is.push_back(pair.atoms[k].first);
    js.push_back(pair.atoms[k].second);
  }
  std::sort(is.begin(), is.end());
  std::sort(js.begin(), js.end());
  // A repeated index means two paired blocks share an eigenprojection.
  if (std::adjacent_find(is.begin(), is.end()) != is.end()) ok = false;
  if (std::adjacent_find(js.begin(), js.end()) != js.end()) ok = false;
  out.pairing_verified = ok;
  return out;
}

SteinReport stein_classify(const PsiProfile& profile, double d_left_1) {
  SteinReport out;
  out.psi_at_1 = profile.psi_at_1();
  if (out.psi_at_1 < -1e-9) {
    out.kind = SteinCase::support_mismatch;
    out.h0 = -kInf;
    out.upper_bound = -kInf;
    out.mean_relative_entropy = kInf;
  } else if (std::abs(out.psi_at_1) <= 1e-9) {
    out.kind = SteinCase::equal_supports;
    out.h0 = -d_left_1;
    out.upper_bound = -d_left_1;
    out.mean_relative_entropy = d_left_1;
  } else {
    out.kind = SteinCase::indeterminate;
    out.h0 = -d_left_1;
    out.upper_bound = -d_left_1;
    out.mean_relative_entropy = d_left_1;
  }
  return out;
}

FullLegendre legendre_full_line(const PsiProfile& profile, double x, double s_max) {
  if (profile.method == PsiMethod::finite_n_sandwich) {
    throw Error(Errc::invalid_exponent,
                "full-line transform needs an exact or transfer-matrix profile");
  }
  const std::vector<double> grid = uniform_grid(1025, -s_max, 1.0 + s_max);
  const auto g = [&profile, x](double s) { return s * x - profile(s); };
  const Argmax best = grid_golden_max(g, grid);
  FullLegendre out;
  out.value = best.value;
  out.argmax = best.x;
  const double step = grid[1] - grid[0];
  out.boundary_warning = best.x <= grid.front() + step || best.x >= grid.back() - step;
  return out;
}

ExponentReport exponent_report(const PsiProfile& profile) {
  ExponentReport out;
  out.chernoff = chernoff_exponent(profile);
  out.psi_at_0 = profile.psi_at_0();
  out.psi_at_1 = profile.psi_at_1();
  out.interval_I_psi = {profile.d_right_0, profile.d_left_1};
  out.stein = stein_classify(profile, profile.d_left_1);
  return out;
}

}  // namespace qht

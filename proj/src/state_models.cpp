#include "qht/state_models.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <future>
#include <memory>
#include <mutex>
#include <string>

#include "qht/error.hpp"
#include "qht/numeric.hpp"

namespace qht {
namespace {

constexpr double kKernelTolerance = 1e-12;
constexpr double kSubspaceTolerance = 1e-8;
constexpr Index kCacheDimCap = 1024;

void append_hex(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a,", v);
  out += buf;
}

void append_matrix(std::string& out, const Matrix& m) {
  out += std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ":";
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      append_hex(out, m(i, j).real());
      append_hex(out, m(i, j).imag());
    }
  }
}

void append_real(std::string& out, const RealMatrix& m) {
  append_matrix(out, m.cast<Complex>());
}

Index checked_power(Index d, int n, Index cap) {
  Index dim = 1;
  for (int k = 0; k < n; ++k) {
    if (d != 0 && dim > cap / d) {
      throw Error(Errc::size_overflow, "dimension " + std::to_string(d) + "^" +
                                           std::to_string(n) + " exceeds cap " +
                                           std::to_string(cap));
    }
    dim *= d;
  }
  return dim;
}

Matrix kron_matrix(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix support_basis(const HermitianOperator& a) { return support_projection(a).basis(); }

// Largest singular value of A^* B for orthonormal bases; 1 iff the ranges meet.
double max_principal_cosine(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0 || b.cols() == 0) return 0.0;
  const Matrix m = a.adjoint() * b;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

bool basis_contained(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0) return true;
  if (b.cols() == 0) return false;
  const double captured = (b.adjoint() * a).squaredNorm();
  return captured >= static_cast<double>(a.cols()) - kSubspaceTolerance;
}

DensityOperator restrict_iid(const IidModel& m, int n, Index cap) {
  checked_power(m.rho1.dim(), n, cap);
  return DensityOperator::trusted(kron_power(m.rho1.op(), n, cap));
}

DensityOperator restrict_hidden_markov(const HiddenMarkovModel& m, int n, Index cap) {
  checked_power(m.site_dim, n, cap);
  const Index nx = m.alphabet();
  std::vector<Matrix> tails(static_cast<std::size_t>(nx));
  for (Index x = 0; x < nx; ++x) tails[static_cast<std::size_t>(x)] = m.boundary(x).matrix();
  for (int k = 2; k <= n; ++k) {
    std::vector<Matrix> next(static_cast<std::size_t>(nx));
    const Index dim = tails[0].rows() * m.site_dim;
    for (Index x = 0; x < nx; ++x) {
      Matrix acc = Matrix::Zero(dim, dim);
      for (Index y = 0; y < nx; ++y) {
        if (m.T(x, y) <= 0.0) continue;
        acc += m.T(x, y) * kron_matrix(m.site(x, y).matrix(), tails[static_cast<std::size_t>(y)]);
      }
      next[static_cast<std::size_t>(x)] = std::move(acc);
    }
    tails = std::move(next);
  }
  Matrix rho = Matrix::Zero(tails[0].rows(), tails[0].rows());
  for (Index x = 0; x < nx; ++x) rho += m.r(x) * tails[static_cast<std::size_t>(x)];
  return DensityOperator::trusted(HermitianOperator(std::move(rho)));
}

DensityOperator restrict_classical(const ClassicalMarkovModel& m, int n, Index cap) {
  const Index nx = m.T.rows();
  const Index dim = checked_power(nx, n, cap);
  std::vector<double> probs(m.r.data(), m.r.data() + nx);
  for (int k = 2; k <= n; ++k) {
    std::vector<double> next(probs.size() * static_cast<std::size_t>(nx));
    for (std::size_t w = 0; w < probs.size(); ++w) {
      const Index last = static_cast<Index>(w % static_cast<std::size_t>(nx));
      for (Index y = 0; y < nx; ++y) {
        next[w * static_cast<std::size_t>(nx) + static_cast<std::size_t>(y)] =
            probs[w] * m.T(last, y);
      }
    }
    probs = std::move(next);
  }
  (void)dim;
  return DensityOperator::trusted(HermitianOperator::diagonal(probs));
}

DensityOperator restrict_gibbs(const LocalGibbsModel& m, int n, Index cap) {
  const Index dim = checked_power(m.site_dim, n, cap);
  if (n < m.range) return maximally_mixed(dim);
  Matrix h = Matrix::Zero(dim, dim);
  for (int k = 0; k + m.range <= n; ++k) {
    const Index left = checked_power(m.site_dim, k, cap);
    const Index right = checked_power(m.site_dim, n - k - m.range, cap);
    Matrix term = kron_matrix(Matrix::Identity(left, left), m.h.matrix());
    h += kron_matrix(term, Matrix::Identity(right, right));
  }
  const Eigensystem sys = eigensystem(HermitianOperator(std::move(h)));
  const double lowest = sys.values()(0);
  CompensatedSum z;
  for (Index i = 0; i < sys.dim(); ++i) z += std::exp(-(sys.values()(i) - lowest));
  const double norm = z.value();
  return DensityOperator::trusted(HermitianOperator(
      sys.apply([lowest, norm](double l) { return std::exp(-(l - lowest)) / norm; })));
}

DensityOperator restrict_explicit(const ExplicitModel& m, int n, Index cap) {
  if (n > static_cast<int>(m.states.size())) {
    throw Error(Errc::index_out_of_range, "explicit model stores " +
                                              std::to_string(m.states.size()) +
                                              " sites, requested " + std::to_string(n));
  }
  const DensityOperator& out = m.states[static_cast<std::size_t>(n - 1)];
  if (out.dim() > cap) throw Error(Errc::size_overflow, "explicit state exceeds size cap");
  return out;
}

DensityOperator compute_restrict(const StateFamily& model, int n, Index cap) {
  return std::visit(
      [n, cap](const auto& m) -> DensityOperator {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, IidModel>) return restrict_iid(m, n, cap);
        if constexpr (std::is_same_v<M, HiddenMarkovModel>) return restrict_hidden_markov(m, n, cap);
        if constexpr (std::is_same_v<M, ClassicalMarkovModel>) return restrict_classical(m, n, cap);
        if constexpr (std::is_same_v<M, LocalGibbsModel>) return restrict_gibbs(m, n, cap);
        if constexpr (std::is_same_v<M, ExplicitModel>) return restrict_explicit(m, n, cap);
      },
      model);
}

struct RestrictCache {
  std::mutex mutex;
  std::map<std::string, std::shared_future<std::shared_ptr<const DensityOperator>>> entries;
};

RestrictCache& restrict_cache() {
  static RestrictCache cache;
  return cache;
}

}  // namespace

DensityOperator::DensityOperator(HermitianOperator op) : op_(std::move(op)) {
  if (op_.dim() == 0) throw Error(Errc::invalid_model, "density operator of dimension 0");
  const double tr = op_.trace();
  if (std::abs(tr - 1.0) > 1e-10) {
    throw Error(Errc::invalid_model, "density operator trace " + std::to_string(tr) + " != 1");
  }
  if (op_.dim() <= kDensityCheckDimCap) {
    const double lowest = min_eigenvalue(op_);
    if (lowest < -kPsdClampTolerance) {
      throw Error(Errc::not_positive_semidefinite,
                  "density operator has eigenvalue " + std::to_string(lowest));
    }
  }
}

DensityOperator DensityOperator::trusted(HermitianOperator op) {
  DensityOperator out;
  out.op_ = std::move(op);
  return out;
}

DensityOperator maximally_mixed(Index dim) {
  return DensityOperator::trusted(HermitianOperator::identity(dim).scaled(1.0 / static_cast<double>(dim)));
}

DensityOperator pure_state(const Vector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw Error(Errc::invalid_model, "zero state vector");
  return DensityOperator(HermitianOperator::outer(v / norm));
}

DensityOperator diagonal_state(std::span<const double> probabilities) {
  return DensityOperator(HermitianOperator::diagonal(probabilities));
}

bool HiddenMarkovModel::has_site(Index x, Index y) const {
  return site_states[static_cast<std::size_t>(x * alphabet() + y)].has_value();
}

const DensityOperator& HiddenMarkovModel::site(Index x, Index y) const {
  const auto& s = site_states[static_cast<std::size_t>(x * alphabet() + y)];
  if (!s) {
    throw Error(Errc::missing_site_state,
                "no site state for (" + std::to_string(x) + ", " + std::to_string(y) + ")");
  }
  return *s;
}

HermitianOperator HiddenMarkovModel::boundary(Index x) const {
  Matrix acc = Matrix::Zero(site_dim, site_dim);
  for (Index y = 0; y < alphabet(); ++y) {
    if (T(x, y) > 0.0) acc += T(x, y) * site(x, y).matrix();
  }
  return HermitianOperator(std::move(acc));
}

void validate_markov_kernel(const RealMatrix& T, const RealVector& r) {
  if (T.rows() == 0 || T.rows() != T.cols()) {
    throw Error(Errc::invalid_model, "transition matrix must be square and nonempty");
  }
  if (!T.allFinite() || !r.allFinite()) throw Error(Errc::invalid_model, "non-finite entries");
  if (T.minCoeff() < 0.0) throw Error(Errc::invalid_model, "transition matrix has negative entries");
  for (Index x = 0; x < T.rows(); ++x) {
    const double row = T.row(x).sum();
    if (std::abs(row - 1.0) > kKernelTolerance) {
      throw Error(Errc::invalid_model, "row sums: row " + std::to_string(x) + " sums to " +
                                           std::to_string(row));
    }
  }
  if (r.size() != T.rows()) throw Error(Errc::dimension_mismatch, "stationary vector length");
  if (r.minCoeff() <= 0.0) throw Error(Errc::invalid_model, "stationary distribution not faithful");
  if (std::abs(r.sum() - 1.0) > kKernelTolerance) {
    throw Error(Errc::invalid_model, "stationary distribution does not sum to 1");
  }
  const double drift = (r.transpose() * T - r.transpose()).cwiseAbs().maxCoeff();
  if (drift > kKernelTolerance) {
    throw Error(Errc::invalid_model, "r is not stationary (max |rT - r| = " +
                                         std::to_string(drift) + ")");
  }
}

RealVector stationary_distribution(const RealMatrix& T) {
  const Index n = T.rows();
  if (n == 0 || T.cols() != n) throw Error(Errc::invalid_model, "transition matrix must be square");
  RealMatrix a = T.transpose() - RealMatrix::Identity(n, n);
  a.row(n - 1).setOnes();
  RealVector rhs = RealVector::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<RealMatrix> lu(a);
  if (!lu.isInvertible()) {
    throw Error(Errc::invalid_model, "stationary distribution is not unique (reducible chain)");
  }
  RealVector r = lu.solve(rhs);
  // One refinement step.
  r += lu.solve(rhs - a * r);
  return r;
}

StateFamily make_iid(DensityOperator rho1) { return IidModel{std::move(rho1)}; }

StateFamily make_hidden_markov(RealMatrix T, std::optional<RealVector> r,
                               std::map<std::pair<Index, Index>, DensityOperator> site_states) {
  RealVector stat = r ? *r : stationary_distribution(T);
  validate_markov_kernel(T, stat);
  HiddenMarkovModel m;
  const Index nx = T.rows();
  m.site_states.resize(static_cast<std::size_t>(nx * nx));
  for (auto& [key, state] : site_states) {
    const auto [x, y] = key;
    if (x < 0 || y < 0 || x >= nx || y >= nx) {
      throw Error(Errc::index_out_of_range, "site state index (" + std::to_string(x) + ", " +
                                                std::to_string(y) + ") outside alphabet");
    }
    if (m.site_dim == 0) m.site_dim = state.dim();
    if (state.dim() != m.site_dim) {
      throw Error(Errc::dimension_mismatch, "site states have different dimensions");
    }
    m.site_states[static_cast<std::size_t>(x * nx + y)] = std::move(state);
  }
  for (Index x = 0; x < nx; ++x) {
    for (Index y = 0; y < nx; ++y) {
      if (T(x, y) > 0.0 && !m.site_states[static_cast<std::size_t>(x * nx + y)]) {
        throw Error(Errc::missing_site_state, "T(" + std::to_string(x) + ", " +
                                                  std::to_string(y) + ") > 0 but no site state");
      }
    }
  }
  m.T = std::move(T);
  m.r = std::move(stat);
  return m;
}

StateFamily make_classical_markov(RealMatrix T, std::optional<RealVector> r) {
  RealVector stat = r ? *r : stationary_distribution(T);
  validate_markov_kernel(T, stat);
  return ClassicalMarkovModel{std::move(T), std::move(stat)};
}

StateFamily make_local_gibbs(Index site_dim, int range, HermitianOperator h) {
  if (site_dim < 1 || range < 1) throw Error(Errc::invalid_model, "site_dim and range must be >= 1");
  const Index expected = checked_power(site_dim, range, kDefaultSizeCap);
  if (h.dim() != expected) {
    throw Error(Errc::dimension_mismatch, "local term has dim " + std::to_string(h.dim()) +
                                              ", expected " + std::to_string(expected));
  }
  return LocalGibbsModel{site_dim, range, std::move(h)};
}

StateFamily make_explicit(std::vector<DensityOperator> states) {
  if (states.empty()) throw Error(Errc::invalid_model, "explicit model needs at least one state");
  const Index d = states[0].dim();
  Index expected = d;
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].dim() != expected) {
      throw Error(Errc::dimension_mismatch, "explicit state " + std::to_string(k + 1) +
                                                " has dim " + std::to_string(states[k].dim()) +
                                                ", expected " + std::to_string(expected));
    }
    expected *= d;
  }
  return ExplicitModel{std::move(states)};
}

HiddenMarkovModel as_hidden_markov(const ClassicalMarkovModel& m) {
  const Index nx = m.T.rows();
  HiddenMarkovModel out;
  out.T = m.T;
  out.r = m.r;
  out.site_dim = nx;
  out.site_states.resize(static_cast<std::size_t>(nx * nx));
  for (Index x = 0; x < nx; ++x) {
    std::vector<double> delta(static_cast<std::size_t>(nx), 0.0);
    delta[static_cast<std::size_t>(x)] = 1.0;
    const DensityOperator state = DensityOperator::trusted(HermitianOperator::diagonal(delta));
    for (Index y = 0; y < nx; ++y) out.site_states[static_cast<std::size_t>(x * nx + y)] = state;
  }
  return out;
}

Index site_dim(const StateFamily& model) {
  return std::visit(
      [](const auto& m) -> Index {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, IidModel>) return m.rho1.dim();
        if constexpr (std::is_same_v<M, HiddenMarkovModel>) return m.site_dim;
        if constexpr (std::is_same_v<M, ClassicalMarkovModel>) return m.T.rows();
        if constexpr (std::is_same_v<M, LocalGibbsModel>) return m.site_dim;
        if constexpr (std::is_same_v<M, ExplicitModel>) return m.states[0].dim();
      },
      model);
}

const char* family_name(const StateFamily& model) {
  static constexpr const char* names[] = {"iid", "hidden_markov", "classical_markov",
                                          "local_gibbs", "explicit"};
  return names[model.index()];
}

std::string fingerprint(const StateFamily& model) {
  std::string out = family_name(model);
  out += '|';
  std::visit(
      [&out](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, IidModel>) {
          append_matrix(out, m.rho1.matrix());
        } else if constexpr (std::is_same_v<M, HiddenMarkovModel>) {
          append_real(out, m.T);
          append_real(out, m.r);
          for (const auto& s : m.site_states) {
            if (s) {
              append_matrix(out, s->matrix());
            } else {
              out += "-;";
            }
          }
        } else if constexpr (std::is_same_v<M, ClassicalMarkovModel>) {
          append_real(out, m.T);
          append_real(out, m.r);
        } else if constexpr (std::is_same_v<M, LocalGibbsModel>) {
          out += std::to_string(m.site_dim) + "," + std::to_string(m.range) + ";";
          append_matrix(out, m.h.matrix());
        } else {
          for (const auto& s : m.states) append_matrix(out, s.matrix());
        }
      },
      model);
  return out;
}

int max_sites(const StateFamily& model, Index size_cap) {
  if (const auto* e = std::get_if<ExplicitModel>(&model)) {
    int n = 0;
    for (const auto& s : e->states) {
      if (s.dim() > size_cap) break;
      ++n;
    }
    return n;
  }
  const Index d = site_dim(model);
  if (d <= 1) return 64;
  int n = 0;
  Index dim = 1;
  while (dim <= size_cap / d && n < 64) {
    dim *= d;
    ++n;
  }
  return n;
}

DensityOperator restrict(const StateFamily& model, int n, Index size_cap) {
  if (n < 1) throw Error(Errc::index_out_of_range, "restrict needs n >= 1");
  if (std::holds_alternative<ExplicitModel>(model)) return compute_restrict(model, n, size_cap);
  const Index d = site_dim(model);
  bool cacheable = true;
  Index dim = 1;
  for (int k = 0; k < n && cacheable; ++k) {
    dim *= d;
    cacheable = dim <= kCacheDimCap;
  }
  if (!cacheable) return compute_restrict(model, n, size_cap);

  const std::string key = fingerprint(model) + "#" + std::to_string(n);
  RestrictCache& cache = restrict_cache();
  std::promise<std::shared_ptr<const DensityOperator>> promise;
  std::shared_future<std::shared_ptr<const DensityOperator>> future;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(cache.mutex);
    auto it = cache.entries.find(key);
    if (it == cache.entries.end()) {
      future = promise.get_future().share();
      cache.entries.emplace(key, future);
      owner = true;
    } else {
      future = it->second;
    }
  }
  if (owner) {
    try {
      promise.set_value(
          std::make_shared<const DensityOperator>(compute_restrict(model, n, size_cap)));
    } catch (...) {
      {
        std::lock_guard<std::mutex> lock(cache.mutex);
        cache.entries.erase(key);
      }
      promise.set_exception(std::current_exception());
    }
  }
  return *future.get();
}

void clear_restrict_cache() {
  RestrictCache& cache = restrict_cache();
  std::lock_guard<std::mutex> lock(cache.mutex);
  cache.entries.clear();
}

const char* to_string(SupportRelation rel) noexcept {
  switch (rel) {
    case SupportRelation::Equal: return "Equal";
    case SupportRelation::LeftDominates: return "LeftDominates";
    case SupportRelation::RightDominates: return "RightDominates";
    case SupportRelation::Incomparable: return "Incomparable";
    case SupportRelation::Orthogonal: return "Orthogonal";
  }
  return "Unknown";
}

const char* to_string(Tristate t) noexcept {
  switch (t) {
    case Tristate::False: return "false";
    case Tristate::True: return "true";
    case Tristate::Unknown: return "unknown";
  }
  return "unknown";
}

SupportRelation support_relation(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho.op(), sigma.op(), "support_relation");
  const Matrix a = support_basis(rho.op());
  const Matrix b = support_basis(sigma.op());
  if ((a.adjoint() * b).squaredNorm() <= kSubspaceTolerance * kSubspaceTolerance) {
    return SupportRelation::Orthogonal;
  }
  const bool a_in_b = basis_contained(a, b);
  const bool b_in_a = basis_contained(b, a);
  if (a_in_b && b_in_a) return SupportRelation::Equal;
  if (a_in_b) return SupportRelation::LeftDominates;
  if (b_in_a) return SupportRelation::RightDominates;
  return SupportRelation::Incomparable;
}

bool support_contained(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a, b, "support_contained");
  return basis_contained(support_basis(a), support_basis(b));
}

std::vector<Projection> canonical_block_projections(const HiddenMarkovModel& rho,
                                                    const HiddenMarkovModel& sigma) {
  const Index nx = rho.alphabet();
  std::vector<Projection> out;
  for (Index x = 0; x < nx; ++x) {
    Matrix acc = Matrix::Zero(rho.site_dim, rho.site_dim);
    for (Index y = 0; y < nx; ++y) {
      if (rho.has_site(x, y)) acc += rho.site(x, y).matrix();
      if (sigma.has_site(x, y)) acc += sigma.site(x, y).matrix();
    }
    out.push_back(support_projection(HermitianOperator(std::move(acc))));
  }
  return out;
}

MarkovSupportReport markov_support_conditions(
    const HiddenMarkovModel& rho, const HiddenMarkovModel& sigma,
    const std::optional<std::vector<Projection>>& candidate_blocks) {
  if (rho.alphabet() != sigma.alphabet() || rho.site_dim != sigma.site_dim) {
    throw Error(Errc::dimension_mismatch, "hidden Markov models differ in alphabet or site dim");
  }
  const Index nx = rho.alphabet();
  MarkovSupportReport report;

  report.cond2 = true;
  report.cond3 = true;
  for (Index x = 0; x < nx; ++x) {
    for (Index y = 0; y < nx; ++y) {
      if (sigma.T(x, y) <= 0.0 && rho.T(x, y) > 0.0) report.cond2 = false;
      if (rho.T(x, y) > 0.0) {
        if (!sigma.has_site(x, y)) {
          report.cond3 = false;
          report.notes.push_back("no sigma site state at (" + std::to_string(x) + ", " +
                                 std::to_string(y) + ")");
        } else if (!support_contained(rho.site(x, y).op(), sigma.site(x, y).op())) {
          report.cond3 = false;
        }
      }
    }
  }

  if (!candidate_blocks) return report;
  const auto& blocks = *candidate_blocks;
  if (static_cast<Index>(blocks.size()) != nx) {
    throw Error(Errc::dimension_mismatch, "need one block projection per alphabet letter");
  }
  bool ok = true;
  for (Index x = 0; x < nx && ok; ++x) {
    const Projection& px = blocks[static_cast<std::size_t>(x)];
    if (px.dim() != rho.site_dim) throw Error(Errc::dimension_mismatch, "block projection dim");
    if (px.rank() == 0) {
      ok = false;
      report.notes.push_back("block " + std::to_string(x) + " is zero");
    }
    for (Index z = x + 1; z < nx && ok; ++z) {
      const Projection& pz = blocks[static_cast<std::size_t>(z)];
      if (px.rank() > 0 && pz.rank() > 0 &&
          (px.basis().adjoint() * pz.basis()).cwiseAbs().maxCoeff() > kSubspaceTolerance) {
        ok = false;
        report.notes.push_back("blocks " + std::to_string(x) + " and " + std::to_string(z) +
                               " are not orthogonal");
      }
    }
    for (Index y = 0; y < nx && ok; ++y) {
      const bool has_t = rho.has_site(x, y);
      const bool has_p = sigma.has_site(x, y);
      Matrix st;
      Matrix sp;
      if (has_t) {
        st = support_basis(rho.site(x, y).op());
        if (!basis_contained(st, px.basis())) ok = false;
      }
      if (has_p) {
        sp = support_basis(sigma.site(x, y).op());
        if (!basis_contained(sp, px.basis())) ok = false;
      }
      if (has_t && has_p && max_principal_cosine(st, sp) < 1.0 - kSubspaceTolerance) ok = false;
      if (!ok) {
        report.notes.push_back("block condition fails at (" + std::to_string(x) + ", " +
                               std::to_string(y) + ")");
      }
    }
  }
  report.cond1 = ok ? Tristate::True : Tristate::False;
  return report;
}

}  // namespace qht

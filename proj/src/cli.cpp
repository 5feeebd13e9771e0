#include "qht/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qht/classical_reduction.hpp"
#include "qht/error.hpp"
#include "qht/exponents.hpp"
#include "qht/factorization.hpp"
#include "qht/hypothesis_tests.hpp"
#include "qht/numeric.hpp"
#include "qht/sampling.hpp"

namespace qht::cli {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(Errc::config_error, (path.empty() ? std::string("config") : path) + ": " + message);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) fail(join(path, item.key()), "unknown key");
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(join(path, key), "missing required key");
  return obj.at(key);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "number must be finite");
  return v;
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

Complex get_entry(const json& j, const std::string& path) {
  if (j.is_number()) return {get_number(j, path), 0.0};
  if (j.is_array() && j.size() == 2) {
    return {get_number(j[0], index_path(path, 0)), get_number(j[1], index_path(path, 1))};
  }
  fail(path, "matrix entry must be a number or a [re, im] pair");
}

Matrix get_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  Matrix m;
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = j[i];
    const std::string rp = index_path(path, i);
    if (!row.is_array()) fail(rp, "expected a row array");
    if (i == 0) m.resize(static_cast<Index>(rows), static_cast<Index>(row.size()));
    if (static_cast<Index>(row.size()) != m.cols()) fail(rp, "ragged matrix row");
    for (std::size_t k = 0; k < row.size(); ++k) {
      m(static_cast<Index>(i), static_cast<Index>(k)) = get_entry(row[k], index_path(rp, k));
    }
  }
  if (m.rows() != m.cols()) fail(path, "matrix must be square");
  return m;
}

RealMatrix get_real_matrix(const json& j, const std::string& path) {
  const Matrix m = get_matrix(j, path);
  if ((m.imag().array() != 0.0).any()) fail(path, "expected a real matrix");
  return m.real();
}

std::vector<double> get_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], index_path(path, i)));
  return out;
}

template <class F>
auto wrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::config_error) throw;
    fail(path, e.what());
  }
}

DensityOperator get_density(const json& j, const std::string& path) {
  const Matrix m = get_matrix(j, path);
  return wrap(path, [&] { return DensityOperator(HermitianOperator(m)); });
}

StateFamily get_model(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a model object");
  const json& type = require(j, "type", path);
  if (!type.is_string()) fail(join(path, "type"), "expected a string");
  const std::string t = type.get<std::string>();
  if (t == "iid") {
    check_keys(j, path, {"type", "rho1"});
    return make_iid(get_density(require(j, "rho1", path), join(path, "rho1")));
  }
  if (t == "classical_markov" || t == "hidden_markov") {
    if (t == "classical_markov") {
      check_keys(j, path, {"type", "T", "r"});
    } else {
      check_keys(j, path, {"type", "T", "r", "site_states"});
    }
    RealMatrix T = get_real_matrix(require(j, "T", path), join(path, "T"));
    std::optional<RealVector> r;
    if (j.contains("r")) {
      const std::vector<double> rv = get_vector(j.at("r"), join(path, "r"));
      r = Eigen::Map<const RealVector>(rv.data(), static_cast<Index>(rv.size()));
    }
    if (t == "classical_markov") {
      return wrap(join(path, "T"), [&] { return make_classical_markov(T, r); });
    }
    const json& sites = require(j, "site_states", path);
    const std::string sp = join(path, "site_states");
    if (!sites.is_array()) fail(sp, "expected an array of {x, y, state}");
    std::map<std::pair<Index, Index>, DensityOperator> states;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const std::string ep = index_path(sp, i);
      check_keys(sites[i], ep, {"x", "y", "state"});
      const int x = get_int(require(sites[i], "x", ep), join(ep, "x"));
      const int y = get_int(require(sites[i], "y", ep), join(ep, "y"));
      if (states.count({x, y})) fail(ep, "duplicate site state");
      states.emplace(std::make_pair(Index{x}, Index{y}),
                     get_density(require(sites[i], "state", ep), join(ep, "state")));
    }
    return wrap(path, [&] { return make_hidden_markov(T, r, states); });
  }
  if (t == "local_gibbs") {
    check_keys(j, path, {"type", "site_dim", "range", "h"});
    const int d = get_int(require(j, "site_dim", path), join(path, "site_dim"));
    const int range = get_int(require(j, "range", path), join(path, "range"));
    const Matrix h = get_matrix(require(j, "h", path), join(path, "h"));
    return wrap(path, [&] { return make_local_gibbs(d, range, HermitianOperator(h)); });
  }
  if (t == "explicit") {
    check_keys(j, path, {"type", "states"});
    const json& states = require(j, "states", path);
    if (!states.is_array()) fail(join(path, "states"), "expected an array of matrices");
    std::vector<DensityOperator> list;
    for (std::size_t i = 0; i < states.size(); ++i) {
      list.push_back(get_density(states[i], index_path(join(path, "states"), i)));
    }
    return wrap(path, [&] { return make_explicit(std::move(list)); });
  }
  fail(join(path, "type"), "unknown model type '" + t + "'");
}

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  // byte counts the offending character itself
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

// Numbers are printed with 15 significant digits; ±inf become tokens and NaN is refused.
std::string fmt(double v) {
  if (std::isnan(v)) throw Error(Errc::numerical_failure, "computation produced NaN");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

ojson jnum(double v) {
  if (std::isnan(v)) throw Error(Errc::numerical_failure, "computation produced NaN");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return std::stod(fmt(v));
}

ojson jlist(const std::vector<double>& xs) {
  ojson out = ojson::array();
  for (double x : xs) out.push_back(jnum(x));
  return out;
}

void require_models(const RunConfig& c) {
  if (!c.model_rho || !c.model_sigma) fail("", "model_rho and model_sigma are required");
}

PsiOptions psi_options(const RunConfig& c) {
  PsiOptions o;
  o.grid_points = c.s_grid;
  o.size_cap = c.size_cap;
  return o;
}

std::vector<double> sorted_unique(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) out.push_back(lo + (hi - lo) * i / (points - 1));
  return out;
}

struct Check {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  double tolerance = 0.0;
  int instances = 0;
  std::string note;

  void record(double measured, bool ok) {
    ++instances;
    if (instances == 1 || measured > worst) worst = measured;
    passed = passed && ok;
  }
};

struct Instance {
  DensityOperator rho;
  DensityOperator sigma;
  int n;
};

// Sampled states kept a quarter away from the boundary so that tensor powers up to
// dimension 256 stay well above the zero-eigenvalue cutoff.
DensityOperator mixed_sample(Sampler& sampler, Index d) {
  const Matrix g = sampler.density(d).matrix();
  const Matrix id = Matrix::Identity(d, d);
  return DensityOperator(HermitianOperator(Matrix(0.75 * g + (0.25 / static_cast<double>(d)) * id)));
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config_error, "invalid JSON at " + location(text, e.byte) + ": " + e.what());
  }
  check_keys(root, "", {"model_rho", "model_sigma", "s_grid", "a_values", "r_values", "n_list",
                        "seed", "size_cap", "tolerances", "format", "p1", "q1"});
  RunConfig c;
  if (root.contains("size_cap")) {
    if (!root["size_cap"].is_number_integer() || root["size_cap"].get<long long>() < 1) {
      fail("size_cap", "expected a positive integer");
    }
    c.size_cap = root["size_cap"].get<Index>();
  }
  if (root.contains("model_rho")) c.model_rho = get_model(root["model_rho"], "model_rho");
  if (root.contains("model_sigma")) c.model_sigma = get_model(root["model_sigma"], "model_sigma");
  if (root.contains("s_grid")) {
    c.s_grid = get_int(root["s_grid"], "s_grid");
    if (c.s_grid < 3) fail("s_grid", "need at least 3 grid points");
  }
  if (root.contains("a_values")) c.a_values = get_vector(root["a_values"], "a_values");
  if (root.contains("r_values")) c.r_values = get_vector(root["r_values"], "r_values");
  if (root.contains("n_list")) {
    const json& nl = root["n_list"];
    if (!nl.is_array()) fail("n_list", "expected an array of integers");
    for (std::size_t i = 0; i < nl.size(); ++i) {
      const int n = get_int(nl[i], index_path("n_list", i));
      if (n < 1) fail(index_path("n_list", i), "sizes must be >= 1");
      c.n_list.push_back(n);
    }
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    c.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("tolerances")) {
    check_keys(root["tolerances"], "tolerances", {"eigenvalue_grouping"});
    if (root["tolerances"].contains("eigenvalue_grouping")) {
      c.group_tolerance = get_number(root["tolerances"]["eigenvalue_grouping"],
                                     "tolerances.eigenvalue_grouping");
      if (c.group_tolerance < 0.0) fail("tolerances.eigenvalue_grouping", "must be >= 0");
    }
  }
  if (root.contains("format")) {
    const json& f = root["format"];
    if (f == "csv") {
      c.format = Format::csv;
    } else if (f == "json") {
      c.format = Format::json;
    } else {
      fail("format", "expected \"csv\" or \"json\"");
    }
  }
  if (root.contains("p1")) c.p1 = get_vector(root["p1"], "p1");
  if (root.contains("q1")) c.q1 = get_vector(root["q1"], "q1");
  if (c.model_rho && c.model_sigma && site_dim(*c.model_rho) != site_dim(*c.model_sigma)) {
    fail("model_sigma", "one-site dimension differs from model_rho");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_error, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string cmd_exponents(const RunConfig& c) {
  require_models(c);
  const PsiProfile profile = psi_limit(*c.model_rho, *c.model_sigma, psi_options(c));
  const ExponentReport rep = exponent_report(profile);

  std::vector<double> a_values = c.a_values;
  if (a_values.empty()) {
    const double lo = std::isfinite(profile.d_right_0) ? profile.d_right_0 : -1.0;
    const double hi = std::isfinite(profile.d_left_1) ? profile.d_left_1 : lo + 1.0;
    a_values = linspace(lo - 0.5, hi + 0.5, 21);
  }
  a_values = sorted_unique(a_values);
  std::vector<double> r_values = c.r_values;
  if (r_values.empty()) r_values = linspace(-rep.psi_at_1, -rep.psi_at_1 + 2.0, 11);
  r_values = sorted_unique(r_values);

  std::vector<std::pair<double, double>> phis;
  for (double a : a_values) phis.emplace_back(legendre_phi(profile, a).value, hat_phi(profile, a));
  std::vector<HoeffdingSolution> hoeff;
  for (double r : r_values) hoeff.push_back(hoeffding_solve(profile, r));

  std::ostringstream out;
  if (c.format == Format::csv) {
    out << "quantity,argument,value\n";
    out << "units,,nats\n";
    out << "method," << to_string(profile.method) << ",\n";
    out << "sandwich_width,," << fmt(profile.sandwich_width) << "\n";
    for (std::size_t i = 0; i < profile.grid.size(); ++i) {
      out << "psi," << fmt(profile.grid[i]) << "," << fmt(profile.values[i]) << "\n";
    }
    out << "psi_at_0,," << fmt(rep.psi_at_0) << "\n";
    out << "psi_at_1,," << fmt(rep.psi_at_1) << "\n";
    out << "d_right_0,," << fmt(profile.d_right_0) << "\n";
    out << "d_left_1,," << fmt(profile.d_left_1) << "\n";
    out << "chernoff,," << fmt(rep.chernoff) << "\n";
    for (std::size_t i = 0; i < a_values.size(); ++i) {
      out << "phi," << fmt(a_values[i]) << "," << fmt(phis[i].first) << "\n";
      out << "hat_phi," << fmt(a_values[i]) << "," << fmt(phis[i].second) << "\n";
    }
    out << "stein_case," << to_string(rep.stein.kind) << ",\n";
    out << "stein_h0,," << fmt(rep.stein.h0) << "\n";
    out << "stein_upper_bound,," << fmt(rep.stein.upper_bound) << "\n";
    out << "mean_relative_entropy,," << fmt(rep.stein.mean_relative_entropy) << "\n";
    for (const auto& h : hoeff) {
      out << "hoeffding_a_r," << fmt(h.r) << "," << fmt(h.a_r) << "\n";
      out << "hoeffding_s_r," << fmt(h.r) << "," << fmt(h.s_r) << "\n";
      out << "hoeffding_b_r," << fmt(h.r) << "," << fmt(h.b_r) << "\n";
      out << "hoeffding_exponent," << fmt(h.r) << "," << fmt(h.exponent) << "\n";
    }
    return out.str();
  }

  ojson j;
  j["units"] = "nats";
  j["method"] = to_string(profile.method);
  j["m"] = profile.m;
  j["eta"] = jnum(profile.eta);
  j["sandwich_width"] = jnum(profile.sandwich_width);
  j["warnings"] = profile.warnings;
  j["psi"] = {{"s", jlist(profile.grid)}, {"value", jlist(profile.values)}};
  j["psi_at_0"] = jnum(rep.psi_at_0);
  j["psi_at_1"] = jnum(rep.psi_at_1);
  j["I_psi"] = {jnum(rep.interval_I_psi.first), jnum(rep.interval_I_psi.second)};
  j["chernoff"] = jnum(rep.chernoff);
  ojson phi = ojson::array();
  for (std::size_t i = 0; i < a_values.size(); ++i) {
    phi.push_back({{"a", jnum(a_values[i])}, {"phi", jnum(phis[i].first)},
                   {"hat_phi", jnum(phis[i].second)}});
  }
  j["phi"] = phi;
  j["stein"] = {{"case", to_string(rep.stein.kind)},
                {"h0", jnum(rep.stein.h0)},
                {"upper_bound", jnum(rep.stein.upper_bound)},
                {"mean_relative_entropy", jnum(rep.stein.mean_relative_entropy)}};
  ojson hj = ojson::array();
  for (const auto& h : hoeff) {
    hj.push_back({{"r", jnum(h.r)},
                  {"a_r", jnum(h.a_r)},
                  {"s_r", jnum(h.s_r)},
                  {"b_r", jnum(h.b_r)},
                  {"exponent", jnum(h.exponent)}});
  }
  j["hoeffding"] = hj;
  return j.dump(2) + "\n";
}

std::string cmd_sweep(const RunConfig& c) {
  require_models(c);
  if (c.a_values.empty()) fail("a_values", "sweep needs at least one threshold");
  if (c.n_list.empty()) fail("n_list", "sweep needs at least one size");
  const PsiProfile profile = psi_limit(*c.model_rho, *c.model_sigma, psi_options(c));
  std::vector<SweepRow> rows;
  for (double a : sorted_unique(c.a_values)) {
    for (const SweepRow& row :
         exponent_sweep(*c.model_rho, *c.model_sigma, profile, a, c.n_list, c.size_cap)) {
      rows.push_back(row);
    }
  }
  std::ostringstream out;
  if (c.format == Format::csv) {
    out << "n,a,slope_alpha,slope_beta,pred_alpha,pred_beta,gap_alpha,gap_beta\n";
    for (const SweepRow& r : rows) {
      out << r.n << "," << fmt(r.a) << "," << fmt(r.slope_alpha) << "," << fmt(r.slope_beta) << ","
          << fmt(r.pred_alpha) << "," << fmt(r.pred_beta) << "," << fmt(r.gap_alpha) << ","
          << fmt(r.gap_beta) << "\n";
    }
    return out.str();
  }
  ojson j;
  j["units"] = "nats";
  j["method"] = to_string(profile.method);
  ojson list = ojson::array();
  for (const SweepRow& r : rows) {
    list.push_back({{"n", r.n},
                    {"a", jnum(r.a)},
                    {"slope_alpha", jnum(r.slope_alpha)},
                    {"slope_beta", jnum(r.slope_beta)},
                    {"pred_alpha", jnum(r.pred_alpha)},
                    {"pred_beta", jnum(r.pred_beta)},
                    {"gap_alpha", jnum(r.gap_alpha)},
                    {"gap_beta", jnum(r.gap_beta)},
                    {"path", to_string(r.path)}});
  }
  j["rows"] = list;
  return j.dump(2) + "\n";
}

std::string cmd_classical(const RunConfig& c) {
  if (c.p1.empty() || c.q1.empty()) fail("p1", "classical needs p1 and q1");
  if (c.p1.size() != c.q1.size()) fail("q1", "length differs from p1");
  if (c.a_values.empty()) fail("a_values", "classical needs at least one threshold");
  if (c.n_list.empty()) fail("n_list", "classical needs at least one size");
  const DensityOperator rho = wrap("p1", [&] { return diagonal_state(c.p1); });
  const DensityOperator sigma = wrap("q1", [&] { return diagonal_state(c.q1); });
  const PsiProfile profile =
      build_profile(finite_psi(rho, sigma, 1), uniform_grid(c.s_grid), PsiMethod::exact_iid);
  std::vector<int> ns = c.n_list;
  std::sort(ns.begin(), ns.end());

  std::ostringstream out;
  ojson list = ojson::array();
  if (c.format == Format::csv) {
    out << "n,a,log_alpha,log_beta,slope_alpha,slope_beta,pred_alpha,pred_beta,degenerate\n";
  }
  for (double a : sorted_unique(c.a_values)) {
    const double phi = legendre_phi(profile, a).value;
    for (int n : ns) {
      const ProductError pe = product_error_exact(c.p1, c.q1, a, n);
      const double sa = pe.log_alpha == -kInf ? -kInf : pe.log_alpha / n;
      const double sb = pe.log_beta == -kInf ? -kInf : pe.log_beta / n;
      if (c.format == Format::csv) {
        out << n << "," << fmt(a) << "," << fmt(pe.log_alpha) << "," << fmt(pe.log_beta) << ","
            << fmt(sa) << "," << fmt(sb) << "," << fmt(-(phi - a)) << "," << fmt(-phi) << ","
            << (pe.degenerate ? "true" : "false") << "\n";
      } else {
        list.push_back({{"n", n},
                        {"a", jnum(a)},
                        {"log_alpha", jnum(pe.log_alpha)},
                        {"log_beta", jnum(pe.log_beta)},
                        {"slope_alpha", jnum(sa)},
                        {"slope_beta", jnum(sb)},
                        {"pred_alpha", jnum(-(phi - a))},
                        {"pred_beta", jnum(-phi)},
                        {"degenerate", pe.degenerate}});
      }
    }
  }
  if (c.format == Format::csv) return out.str();
  ojson j;
  j["units"] = "nats";
  j["rows"] = list;
  return j.dump(2) + "\n";
}

VerifyResult cmd_verify(const RunConfig& c) {
  std::vector<std::pair<StateFamily, StateFamily>> pairs;
  if (c.model_rho || c.model_sigma) {
    require_models(c);
    pairs.emplace_back(*c.model_rho, *c.model_sigma);
  } else {
    Sampler sampler(c.seed);
    for (int i = 0; i < 10; ++i) {
      const Index d = 2 + i % 3;
      StateFamily a = make_iid(mixed_sample(sampler, d));
      StateFamily b = make_iid(mixed_sample(sampler, d));
      pairs.emplace_back(std::move(a), std::move(b));
    }
  }
  std::vector<int> ns = c.n_list;
  if (ns.empty()) ns = {1, 2, 3};
  std::sort(ns.begin(), ns.end());
  const Index verify_cap = std::min<Index>(256, c.size_cap);

  Check moment{"moment_identity", true, 0.0, 1e-10, 0, "gap / (1 + quantum)"};
  Check audenaert{"audenaert", true, 0.0, 1e-12, 0, "lhs - rhs"};
  Check min_sum{"min_sum", true, 0.0, 1e-12, 0, "lower - e_n"};
  Check sandwich{"sandwich", true, 0.0, 1e-12, 0, "distance outside band psi_m +- (1/m) log eta"};
  Check duality{"duality_chain", true, 0.0, 1e-8, 0, "max(|b - phi(a_r)|, |hat_phi(a_r) - r|)"};

  for (const auto& [mr, ms] : pairs) {
    std::vector<Instance> instances;
    for (int n : ns) {
      if (n > std::min(max_sites(mr, verify_cap), max_sites(ms, verify_cap))) continue;
      instances.push_back({restrict(mr, n, c.size_cap), restrict(ms, n, c.size_cap), n});
    }
    for (const Instance& inst : instances) {
      const ClassicalPair pair = nussbaum_szkola(inst.rho, inst.sigma, c.group_tolerance);
      if (pair.size() == 0) {
        throw Error(Errc::orthogonal_supports, "pair has orthogonal supports at n = " +
                                                   std::to_string(inst.n));
      }
      for (double s : linspace(0.0, 1.0, 11)) {
        const MomentCheck m = moment_identity(pair, inst.rho, inst.sigma, s);
        const double rel = m.gap / (1.0 + m.quantum);
        moment.record(rel, rel <= moment.tolerance);
        for (double pi : {0.1, 0.3, 0.5, 0.7, 0.9}) {
          const AudenaertCheck ab = audenaert_bound(inst.rho, inst.sigma, pi, s);
          audenaert.record(ab.lhs - ab.rhs, ab.holds);
        }
      }
      for (double a : {-1.0, 0.0, 1.0}) {
        const CombinedError e = combined_error(inst.rho, inst.sigma, a, inst.n);
        const MinSumCheck ms_check = min_sum_bound(pair, a, inst.n, e.value);
        min_sum.record(ms_check.lower - e.value, ms_check.holds);
      }
    }

    PsiOptions opts = psi_options(c);
    const PsiProfile profile = psi_limit(mr, ms, opts);
    const double psi1 = profile.psi_at_1();
    for (double r : linspace(-psi1 + 1e-3, -psi1 + 2.0, 10)) {
      const HoeffdingSolution h = hoeffding_solve(profile, r);
      const double e1 = std::abs(h.b_r - h.phi_at_a_r);
      const double e2 = std::abs(hat_phi(profile, h.a_r) - r);
      duality.record(std::max(e1, e2), e1 <= 1e-8 && e2 <= 1e-10);
    }

    int m = 1;
    while (2 * (m + 1) <= std::min(max_sites(mr, verify_cap), max_sites(ms, verify_cap))) ++m;
    if (2 * m <= std::min(max_sites(mr, verify_cap), max_sites(ms, verify_cap))) {
      const double eta = std::max(factorization_constants(mr, m, 2 * m, c.size_cap).eta(),
                                  factorization_constants(ms, m, 2 * m, c.size_cap).eta());
      if (std::isfinite(eta)) {
        const PsiProfile band = psi_sandwich(mr, ms, m, eta, uniform_grid(11), c.size_cap);
        const auto psi2m = finite_psi(restrict(mr, 2 * m, c.size_cap),
                                      restrict(ms, 2 * m, c.size_cap), 2 * m);
        for (double s : linspace(0.0, 1.0, 11)) {
          const Band b = psi_band(band, s);
          const double v = psi2m(s);
          const double outside = std::max(b.lower - v, v - b.upper);
          sandwich.record(outside, b.contains(v));
        }
      } else {
        sandwich.note += "; skipped a pair without factorization at checked sizes";
      }
    }
  }

  VerifyResult result;
  result.passed = true;
  std::ostringstream out;
  for (const Check* chk : {&moment, &audenaert, &min_sum, &sandwich, &duality}) {
    ojson line;
    line["check"] = chk->name;
    line["passed"] = chk->passed;
    line["instances"] = chk->instances;
    line["worst"] = jnum(chk->worst);
    line["tolerance"] = jnum(chk->tolerance);
    line["measure"] = chk->note;
    out << line.dump() << "\n";
    result.passed = result.passed && chk->passed;
  }
  result.report = out.str();
  return result;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum hypothesis testing: error exponents and finite-n checks (nats)"};
  std::string verb;
  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<Index> size_cap;
  std::optional<int> s_grid;
  app.add_option("verb", verb, "exponents | sweep | verify | classical")
      ->required()
      ->check(CLI::IsMember({"exponents", "sweep", "verify", "classical"}));
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "seed for sampled checks");
  app.add_option("--size-cap", size_cap, "largest allowed Hilbert-space dimension")
      ->check(CLI::PositiveNumber);
  app.add_option("--s-grid", s_grid, "number of s grid points")->check(CLI::Range(3, 1 << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      config = load_config(config_path);
    } else if (verb != "verify") {
      throw Error(Errc::config_error, "--config is required for '" + verb + "'");
    }
    if (!format.empty()) config.format = format == "csv" ? Format::csv : Format::json;
    if (seed) config.seed = *seed;
    if (size_cap) config.size_cap = *size_cap;
    if (s_grid) config.s_grid = *s_grid;

    std::string text;
    int code = kExitOk;
    if (verb == "exponents") {
      text = cmd_exponents(config);
    } else if (verb == "sweep") {
      text = cmd_sweep(config);
    } else if (verb == "classical") {
      text = cmd_classical(config);
    } else {
      const VerifyResult v = cmd_verify(config);
      text = v.report;
      code = v.passed ? kExitOk : kExitVerification;
    }
    if (out_path.empty()) {
      out << text;
    } else {
      std::ofstream file(out_path);
      if (!file) throw Error(Errc::config_error, "cannot write '" + out_path + "'");
      file << text;
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::config_error ? kExitConfig : kExitComputation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}

}  // namespace qht::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qht/state_models.hpp"

namespace qht::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitComputation = 3,
  kExitVerification = 4,
};

enum class Format { csv, json };

struct RunConfig {
  std::optional<StateFamily> model_rho;
  std::optional<StateFamily> model_sigma;
  int s_grid = 513;
  std::vector<double> a_values;
  std::vector<double> r_values;
  std::vector<int> n_list;
  std::uint64_t seed = 1;
  Index size_cap = kDefaultSizeCap;
  double group_tolerance = kDefaultGroupTolerance;
  Format format = Format::json;
  std::vector<double> p1;
  std::vector<double> q1;
};

// Errors carry Errc::config_error with "line L, column C" or a field path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string cmd_exponents(const RunConfig& config);
std::string cmd_sweep(const RunConfig& config);
std::string cmd_classical(const RunConfig& config);

struct VerifyResult {
  std::string report;  // one JSON object per line
  bool passed = false;
};
VerifyResult cmd_verify(const RunConfig& config);

// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qht::cli

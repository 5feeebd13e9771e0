#pragma once

#include <stdexcept>
#include <string>

namespace qht {

enum class Errc {
  non_hermitian_input,
  numerical_failure,
  not_positive_semidefinite,
  dimension_mismatch,
  size_overflow,
  index_out_of_range,
  missing_site_state,
  invalid_prior,
  invalid_exponent,
  invalid_model,
  orthogonal_supports,
  reducible_transfer,
  support_violation,
  ratio_lattice_overflow,
  config_error,
};

const char* to_string(Errc code) noexcept;

// All library failures are reported through this type; `code()` lets callers
// (the CLI in particular) map failures onto exit codes without parsing text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qht

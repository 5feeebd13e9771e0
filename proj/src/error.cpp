#include "qht/error.hpp"

namespace qht {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::non_hermitian_input: return "NonHermitianInput";
    case Errc::numerical_failure: return "NumericalFailure";
    case Errc::not_positive_semidefinite: return "NotPositiveSemidefinite";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::size_overflow: return "SizeOverflow";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::missing_site_state: return "MissingSiteState";
    case Errc::invalid_prior: return "InvalidPrior";
    case Errc::invalid_exponent: return "InvalidExponent";
    case Errc::invalid_model: return "InvalidModel";
    case Errc::orthogonal_supports: return "OrthogonalSupports";
    case Errc::reducible_transfer: return "ReducibleTransfer";
    case Errc::support_violation: return "SupportViolation";
    case Errc::ratio_lattice_overflow: return "RatioLatticeOverflow";
    case Errc::config_error: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace qht

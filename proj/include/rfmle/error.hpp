#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rfmle {

enum class Errc {
  invalid_argument,
  monotonicity_violation,
  endpoint_mismatch,
  non_positive_ordinate,
  strip_overlap,
  circle_not_in_positive_quadrant,
  out_of_rectangle,
  wrong_model_variant,
  non_positive_coordinate,
  singular_matrix,
  quadrature_failure,
  parse_error,
  io_error,
};

std::string_view to_string(Errc code);

// All library failures are reported through this type; `code()` identifies
// the failure class, `what()` carries the location details.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::monotonicity_violation: return "MonotonicityViolation";
    case Errc::endpoint_mismatch: return "EndpointMismatch";
    case Errc::non_positive_ordinate: return "NonPositiveOrdinate";
    case Errc::strip_overlap: return "StripOverlap";
    case Errc::circle_not_in_positive_quadrant: return "CircleNotInPositiveQuadrant";
    case Errc::out_of_rectangle: return "OutOfRectangle";
    case Errc::wrong_model_variant: return "WrongModelVariant";
    case Errc::non_positive_coordinate: return "NonPositiveCoordinate";
    case Errc::singular_matrix: return "SingularMatrix";
    case Errc::quadrature_failure: return "QuadratureFailure";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

}  // namespace rfmle

#include "fixpoint/types.hpp"

namespace fixpoint {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorKind::RepresentationMismatch:
      return "RepresentationMismatch";
    case ErrorKind::IndefiniteCovariance:
      return "IndefiniteCovariance";
    case ErrorKind::SingularInnovation:
      return "SingularInnovation";
    case ErrorKind::SingularPrediction:
      return "SingularPrediction";
    case ErrorKind::SingularCovariance:
      return "SingularCovariance";
    case ErrorKind::InvalidModel:
      return "InvalidModel";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& message,
                           std::optional<std::size_t> step) {
  std::string out = std::string(to_string(kind)) + ": " + message;
  if (step) {
    out += " (step " + std::to_string(*step) + ")";
  }
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> step)
    : std::runtime_error(format_message(kind, message, step)),
      kind_(kind),
      message_(message),
      step_(step) {}

Error Error::at_step(std::size_t k) const { return Error(kind_, message_, k); }

}  // namespace fixpoint

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixpoint {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
using Observations = std::vector<Vector<T>>;

using Index = Eigen::Index;

/// Numerical thresholds shared by every module. The float values are the
/// double values scaled to single-precision round-off.
template <typename T>
struct Tolerance;

template <>
struct Tolerance<double> {
  /// Relative pivot size below which a triangular or LU solve is rejected.
  static constexpr double singular = 1e-14;
  /// Relative eigenvalue below which a covariance counts as indefinite.
  static constexpr double indefinite = 1e-8;
};

template <>
struct Tolerance<float> {
  static constexpr float singular = 1e-6f;
  static constexpr float indefinite = 1e-4f;
};

enum class ErrorKind {
  DimensionMismatch,
  RepresentationMismatch,
  IndefiniteCovariance,
  SingularInnovation,
  SingularPrediction,
  SingularCovariance,
  InvalidModel,
};

const char* to_string(ErrorKind kind);

/// Raised by every operation in the library. Step-wise runs attach the index
/// k of the failing step.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> step = std::nullopt);

  ErrorKind kind() const { return kind_; }
  std::optional<std::size_t> step() const { return step_; }

  /// Copy of this error tagged with step index k.
  Error at_step(std::size_t k) const;

 private:
  ErrorKind kind_;
  std::string message_;
  std::optional<std::size_t> step_;
};

}  // namespace fixpoint

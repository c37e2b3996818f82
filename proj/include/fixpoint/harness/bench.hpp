#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fixpoint/fixed_point.hpp"
#include "fixpoint/harness/random_model.hpp"
#include "fixpoint/harness/report.hpp"

namespace fixpoint::harness {

/// Ways of computing p(x_0 | y_{1:K}).
enum class Method {
  ViaRts,     ///< element 0 of an RTS smoother
  ViaFilter,  ///< filter on the augmented state (x_k, x_0)
  Fps,        ///< fixed-point recursion
};

const char* to_string(Method method);
Method method_from_string(const std::string& text);

inline const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::ViaRts, Method::ViaFilter, Method::Fps};
  return methods;
}

struct BenchConfig {
  int d = 2;  ///< observation dimension; the state has D = 2d
  std::size_t K = 1000;
  std::uint64_t seed = 0;
  Precision precision = Precision::F64;
  Rep rep = Rep::Factor;
  Method method = Method::Fps;
  int repeats = 3;
  /// Flush subnormal floats to zero while timing. The benchmark models decay
  /// into the subnormal range, where x86 arithmetic is orders of magnitude slower.
  bool flush_subnormals = true;

  void validate() const;
};

/// Floats a method keeps alive: mean and covariance factor of every
/// distribution it stores.
///   fps:        3D^2 + 2D      (filtering marginal + conditional of x_0)
///   via-filter: 4D^2 + 2D      (mean and factor of the 2D-dim state)
///   via-rts:    K (3D^2 + 2D)  (K backward conditionals + K marginals)
std::uint64_t memory_floats(Method method, std::uint64_t state_dim, std::uint64_t steps);

/// memory_floats for D = 2d, at 4 bytes per float whatever the compute precision.
std::uint64_t memory_bytes(Method method, int d, std::uint64_t steps);

template <typename T>
Gaussian<T> run_method(Method method, const Lgssm<T>& model, const Observations<T>& ys, Rep rep);

struct Timing {
  double seconds = 0.0;       ///< minimum over the timed runs
  std::vector<double> runs;   ///< every timed run, in order
  bool diverged = false;      ///< an estimator error or a non-finite result
  std::string failure;
};

/// One untimed warm-up, then `config.repeats` timed runs on `problem`.
/// Failures are reported through Timing::diverged, not thrown.
Timing time_method(const BenchConfig& config, const Problem<double>& problem);

/// Same, on gen_random_model(config.d, config.K, config.seed).
Timing time_method(const BenchConfig& config);

struct BenchOptions {
  std::vector<int> ds{2, 5, 10, 20, 50, 100};
  std::size_t K = 1000;
  int repeats = 3;
  std::uint64_t seed = 0;
  Precision precision = Precision::F64;
  Rep rep = Rep::Factor;
  bool memory_only = false;
  bool flush_subnormals = true;
};

/// "memory" rows for every (method, d); unless memory_only also "runtime"
/// rows with wall times and the deviation of each method's mean from the
/// augmented-filter result.
ExperimentReport run_bench(const BenchOptions& options);

}  // namespace fixpoint::harness

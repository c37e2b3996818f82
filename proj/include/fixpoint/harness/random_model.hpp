#pragma once

#include <cstdint>
#include <string>

#include "fixpoint/linear_ssm.hpp"

namespace fixpoint::harness {

enum class Precision { F32, F64 };

const char* to_string(Precision precision);
Precision precision_from_string(const std::string& text);

/// FIXPOINT_PRECISION if set ("f32" or "f64"), otherwise `fallback`.
Precision precision_from_env(Precision fallback = Precision::F64);

template <typename T>
struct Problem {
  Lgssm<T> model;
  Observations<T> ys;

  template <typename U>
  Problem<U> cast() const {
    Problem<U> out{model.template cast<U>(), {}};
    out.ys.reserve(ys.size());
    for (const auto& y : ys) {
      out.ys.push_back(y.template cast<U>());
    }
    return out;
  }
};

/// Benchmark model: D = 2d, every matrix, bias and covariance-factor entry
/// drawn i.i.d. from N(0, 1/K^2); covariances are stored as those factors.
/// The data are sampled from the model itself.
Problem<double> gen_random_model(int d, std::size_t steps, std::uint64_t seed);

/// Well-conditioned random model for cross-checking estimators: contracting
/// dynamics, noise covariances bounded away from singular, nonzero biases.
Problem<double> random_test_problem(Index state_dim, Index obs_dim, std::size_t steps,
                                    std::uint64_t seed, Rep storage = Rep::Dense);

}  // namespace fixpoint::harness

#pragma once

// Discrete linear Gaussian state-space models
//
//   x_0 ~ N(m, C),   x_k = A_k x_{k-1} + b_k,   y_k = H_k x_k + r_k,
//
// with b_k ~ N(trans_bias_mean, B_k) and r_k ~ N(obs_bias_mean, R_k).

#include <cstdint>
#include <span>

#include "fixpoint/gaussian.hpp"

namespace fixpoint {

template <typename T>
struct StepModel {
  Matrix<T> transition;         ///< A_k, D x D
  Vector<T> transition_bias;    ///< mean of b_k
  Covariance<T> process_noise;  ///< B_k
  Matrix<T> observation;        ///< H_k, d x D
  Vector<T> observation_bias;   ///< mean of r_k
  Covariance<T> observation_noise;  ///< R_k

  template <typename U>
  StepModel<U> cast() const {
    return {transition.template cast<U>(),  transition_bias.template cast<U>(),
            process_noise.template cast<U>(), observation.template cast<U>(),
            observation_bias.template cast<U>(), observation_noise.template cast<U>()};
  }
};

template <typename T>
struct Lgssm {
  Gaussian<T> initial;
  std::vector<StepModel<T>> steps;
  Index obs_dim = 0;

  Index state_dim() const { return initial.dim(); }
  std::size_t step_count() const { return steps.size(); }

  /// Throws InvalidModel / DimensionMismatch on inconsistent shapes.
  void validate() const;

  template <typename U>
  Lgssm<U> cast() const {
    Lgssm<U> out{initial.template cast<U>(), {}, obs_dim};
    out.steps.reserve(steps.size());
    for (const auto& step : steps) {
      out.steps.push_back(step.template cast<U>());
    }
    return out;
  }
};

template <typename T>
struct Trajectory {
  std::vector<Vector<T>> states;  ///< x_0 .. x_K
  Observations<T> observations;   ///< y_1 .. y_K
  std::uint64_t seed = 0;
};

/// Draws a trajectory. Noise for component i of the draw at step k comes from
/// a fixed counter, so models that embed each other (see augment) see the
/// same noise sequence.
template <typename T>
Trajectory<T> sample(const Lgssm<T>& model, std::uint64_t seed);

/// The 2D-dimensional model tracking (x_k, x_0). Covariances keep the
/// representation of the input; the factor of the augmented initial
/// covariance is [[L, 0], [L, 0]], which is not triangular.
template <typename T>
Lgssm<T> augment(const Lgssm<T>& model);

/// Brute-force oracle: builds the joint Gaussian of (x_0..x_K, y_1..y_n) with
/// n = ys.size() <= K, conditions on the data with one dense solve and returns
/// the Dense marginal over the queried state indices (in query order).
/// Requires K * D <= 200.
template <typename T>
Gaussian<T> dense_posterior(const Lgssm<T>& model, const Observations<T>& ys,
                            std::span<const std::size_t> query);

inline constexpr std::size_t kDensePosteriorMaxSize = 200;

}  // namespace fixpoint

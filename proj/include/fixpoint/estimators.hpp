#pragma once

// Kalman filter and Rauch-Tung-Striebel smoother. The representation of the
// Gaussians passed in selects the arithmetic: Dense uses matrix products and
// differences, Factor uses QR decompositions of stacked factors. Step model
// covariances are converted to the matching representation on the fly.

#include "fixpoint/linear_ssm.hpp"

namespace fixpoint {

template <typename T>
struct FilterStepOutput {
  Gaussian<T> predicted;   ///< p(x_k | y_{1:k-1})
  Gaussian<T> filtered;    ///< p(x_k | y_{1:k})
  Gaussian<T> innovation;  ///< p(y_k | y_{1:k-1})
  Matrix<T> gain;          ///< Kalman gain, D x d
  T loglik_increment{};    ///< NaN when a Dense innovation covariance lost definiteness
};

/// Forward-pass output of the smoother for one step.
template <typename T>
struct SmoothingStep {
  Gaussian<T> predicted;             ///< p(x_k | y_{1:k-1})
  AffineConditional<T> conditional;  ///< p(x_{k-1} | x_k, y_{1:k-1})
};

template <typename T>
Gaussian<T> kf_predict(const Gaussian<T>& prev_filtered, const StepModel<T>& step);

/// Raises SingularInnovation when H C H^T + R cannot be inverted.
template <typename T>
FilterStepOutput<T> kf_update(const Gaussian<T>& predicted, const StepModel<T>& step,
                              const Vector<T>& y);

template <typename T>
struct FilterResult {
  Gaussian<T> filtered;  ///< p(x_K | y_{1:K})
  T loglik{};            ///< log p(y_{1:K})
  std::vector<FilterStepOutput<T>> steps;  ///< only with retain_steps
};

template <typename T>
FilterResult<T> run_filter(const Lgssm<T>& model, const Observations<T>& ys, Rep rep,
                           bool retain_steps = false);

/// Prediction plus the backward conditional. Raises SingularPrediction when
/// the predicted covariance cannot be inverted.
template <typename T>
SmoothingStep<T> rts_forward_step(const Gaussian<T>& prev_filtered, const StepModel<T>& step);

template <typename T>
struct RtsResult {
  std::vector<Gaussian<T>> marginals;               ///< p(x_k | y_{1:K}), k = 0..K
  std::vector<AffineConditional<T>> conditionals;   ///< p(x_{k-1} | x_k, y_{1:k-1}), k = 1..K
  T loglik{};
};

template <typename T>
RtsResult<T> run_rts(const Lgssm<T>& model, const Observations<T>& ys, Rep rep);

/// Checks len(ys) == K.
template <typename T>
void require_observations(const Lgssm<T>& model, const Observations<T>& ys);

}  // namespace fixpoint

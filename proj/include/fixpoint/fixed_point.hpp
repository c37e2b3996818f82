#pragma once

// Fixed-point smoothing: p(x_0 | y_{1:K}) in a single forward pass.
//
// The smoother carries the filtering marginal p(x_k | y_{1:k}) and the
// conditional p(x_0 | x_k, y_{1:k-1}). Each step folds the next backward
// conditional p(x_{k-1} | x_k, y_{1:k-1}) into the latter, so nothing scales
// with K. The Dense and Factor representations share the same recursion;
// only compose_conditionals differs between them.
//
// The baselines (smoothing via RTS, via a filter on the augmented state, and
// the classical mean/covariance recursion) live here as well so that all
// routes can be compared against each other.

#include "fixpoint/estimators.hpp"

namespace fixpoint {

template <typename T>
struct FixedPointState {
  Gaussian<T> filtered;         ///< p(x_k | y_{1:k})
  AffineConditional<T> fp_cond; ///< p(x_0 | x_k, y_{1:k-1})
  std::size_t step_index = 0;
};

template <typename T>
FixedPointState<T> fps_init(const Lgssm<T>& model, Rep rep);

template <typename T>
FixedPointState<T> fps_step(const FixedPointState<T>& state, const StepModel<T>& step,
                            const Vector<T>& y);

/// p(x_0 | y_{1:k}) for the current k.
template <typename T>
Gaussian<T> fps_marginal_at_k(const FixedPointState<T>& state);

/// p(x_0 | y_{1:K}); the state must have consumed all K observations.
template <typename T>
Gaussian<T> fps_finalize(const FixedPointState<T>& state, std::size_t step_count);

template <typename T>
Gaussian<T> run_fps(const Lgssm<T>& model, const Observations<T>& ys, Rep rep);

/// Filters the augmented model and returns the block of the final filtering
/// distribution that belongs to x_0. The factor of that block is
/// re-triangularized.
template <typename T>
Gaussian<T> run_fps_augmented(const Lgssm<T>& model, const Observations<T>& ys, Rep rep);

/// Element 0 of the RTS smoother; keeps all K backward conditionals.
template <typename T>
Gaussian<T> run_fps_via_rts(const Lgssm<T>& model, const Observations<T>& ys, Rep rep);

/// State of the classical covariance-only recursion for (m_{0|k}, C_{0|k}).
template <typename T>
struct MeditchState {
  Vector<T> mean;
  Matrix<T> cov;
  Matrix<T> gain;  ///< G_{0|k}
};

template <typename T>
MeditchState<T> meditch_init(const Lgssm<T>& model);

/// Dense-only. `filter_step` supplies m_{k|k}, m_{k|k-1}, C_{k|k}, C_{k|k-1}.
template <typename T>
MeditchState<T> meditch_step(const MeditchState<T>& state, const FilterStepOutput<T>& filter_step,
                             const Matrix<T>& smoothing_gain);

}  // namespace fixpoint

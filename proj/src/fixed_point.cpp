#include "fixpoint/fixed_point.hpp"

namespace fixpoint {

template <typename T>
FixedPointState<T> fps_init(const Lgssm<T>& model, Rep rep) {
  model.validate();
  return {to_rep(model.initial, rep), AffineConditional<T>::identity(model.state_dim(), rep), 0};
}

template <typename T>
FixedPointState<T> fps_step(const FixedPointState<T>& state, const StepModel<T>& step,
                            const Vector<T>& y) {
  // The backward conditional depends on the prediction, not on y_k, so it is
  // folded in before the update.
  SmoothingStep<T> fwd = rts_forward_step(state.filtered, step);
  AffineConditional<T> fp_cond = compose_conditionals(state.fp_cond, fwd.conditional);
  FilterStepOutput<T> out = kf_update(fwd.predicted, step, y);
  return {std::move(out.filtered), std::move(fp_cond), state.step_index + 1};
}

template <typename T>
Gaussian<T> fps_marginal_at_k(const FixedPointState<T>& state) {
  return marginalize(state.fp_cond, state.filtered);
}

template <typename T>
Gaussian<T> fps_finalize(const FixedPointState<T>& state, std::size_t step_count) {
  if (state.step_index != step_count) {
    throw Error(ErrorKind::DimensionMismatch,
                "fixed-point state is at step " + std::to_string(state.step_index) +
                    ", expected " + std::to_string(step_count));
  }
  return fps_marginal_at_k(state);
}

template <typename T>
Gaussian<T> run_fps(const Lgssm<T>& model, const Observations<T>& ys, Rep rep) {
  require_observations(model, ys);
  FixedPointState<T> state = fps_init(model, rep);
  for (std::size_t k = 1; k <= ys.size(); ++k) {
    try {
      state = fps_step(state, model.steps[k - 1], ys[k - 1]);
    } catch (const Error& e) {
      throw e.at_step(k);
    }
  }
  return fps_finalize(state, model.step_count());
}

template <typename T>
Gaussian<T> run_fps_augmented(const Lgssm<T>& model, const Observations<T>& ys, Rep rep) {
  const Index dim = model.state_dim();
  const FilterResult<T> result = run_filter(augment(model), ys, rep);
  Vector<T> mean = result.filtered.mean.tail(dim);
  const Matrix<T>& cov = result.filtered.cov.matrix();
  if (rep == Rep::Dense) {
    return {std::move(mean), Covariance<T>::dense(cov.bottomRightCorner(dim, dim))};
  }
  // Rows of the factor that belong to x_0: a D x 2D generalized factor.
  const Matrix<T> rows = cov.bottomRows(dim);
  return {std::move(mean), Covariance<T>::factor(qr_r_factor<T>(rows.transpose()))};
}

template <typename T>
Gaussian<T> run_fps_via_rts(const Lgssm<T>& model, const Observations<T>& ys, Rep rep) {
  return run_rts(model, ys, rep).marginals.front();
}

template <typename T>
MeditchState<T> meditch_init(const Lgssm<T>& model) {
  const Index dim = model.state_dim();
  return {model.initial.mean, model.initial.cov.covariance(), Matrix<T>::Identity(dim, dim)};
}

template <typename T>
MeditchState<T> meditch_step(const MeditchState<T>& state, const FilterStepOutput<T>& filter_step,
                             const Matrix<T>& smoothing_gain) {
  if (filter_step.filtered.cov.is_factor() || filter_step.predicted.cov.is_factor()) {
    throw Error(ErrorKind::RepresentationMismatch, "the mean/covariance recursion is Dense-only");
  }
  Matrix<T> gain = state.gain * smoothing_gain;
  Vector<T> mean =
      state.mean + gain * (filter_step.filtered.mean - filter_step.predicted.mean);
  Matrix<T> cov =
      state.cov + gain *
                      (filter_step.filtered.cov.matrix() - filter_step.predicted.cov.matrix()) *
                      gain.transpose();
  return {std::move(mean), std::move(cov), std::move(gain)};
}

#define FIXPOINT_INSTANTIATE(T)                                                                \
  template FixedPointState<T> fps_init<T>(const Lgssm<T>&, Rep);                               \
  template FixedPointState<T> fps_step<T>(const FixedPointState<T>&, const StepModel<T>&,      \
                                          const Vector<T>&);                                   \
  template Gaussian<T> fps_marginal_at_k<T>(const FixedPointState<T>&);                        \
  template Gaussian<T> fps_finalize<T>(const FixedPointState<T>&, std::size_t);                \
  template Gaussian<T> run_fps<T>(const Lgssm<T>&, const Observations<T>&, Rep);               \
  template Gaussian<T> run_fps_augmented<T>(const Lgssm<T>&, const Observations<T>&, Rep);     \
  template Gaussian<T> run_fps_via_rts<T>(const Lgssm<T>&, const Observations<T>&, Rep);       \
  template MeditchState<T> meditch_init<T>(const Lgssm<T>&);                                   \
  template MeditchState<T> meditch_step<T>(const MeditchState<T>&, const FilterStepOutput<T>&, \
                                           const Matrix<T>&);

FIXPOINT_INSTANTIATE(float)
FIXPOINT_INSTANTIATE(double)

#undef FIXPOINT_INSTANTIATE

}  // namespace fixpoint

#include "fixpoint/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fixpoint {

namespace {

template <typename T>
Eigen::PartialPivLU<Matrix<T>> checked_lu(const Matrix<T>& m, ErrorKind kind, const char* what) {
  Eigen::PartialPivLU<Matrix<T>> lu(m);
  const Vector<T> pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > Tolerance<T>::singular * pivots.maxCoeff())) {
    throw Error(kind, std::string(what) + " is numerically singular");
  }
  return lu;
}

// log N(residual; 0, S) from an LU decomposition of S^T; NaN if det S <= 0.
template <typename T>
T lu_log_density(const Eigen::PartialPivLU<Matrix<T>>& lu, const Vector<T>& residual) {
  const Vector<T> pivots = lu.matrixLU().diagonal();
  T sign = lu.permutationP().determinant();
  T log_det = 0;
  for (Index i = 0; i < pivots.size(); ++i) {
    sign *= pivots(i) < T(0) ? T(-1) : T(1);
    log_det += std::log(std::abs(pivots(i)));
  }
  if (sign <= T(0)) {
    return std::numeric_limits<T>::quiet_NaN();
  }
  const T quad = residual.dot(lu.solve(residual));
  const T log_two_pi = std::log(T(2) * std::numbers::pi_v<T>);
  return T(-0.5) * (quad + log_det + T(residual.size()) * log_two_pi);
}

template <typename T>
AffineConditional<T> transition_of(const StepModel<T>& step, Rep rep) {
  return {step.transition, step.transition_bias, to_rep(step.process_noise, rep)};
}

}  // namespace

template <typename T>
void require_observations(const Lgssm<T>& model, const Observations<T>& ys) {
  if (ys.size() != model.step_count()) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(model.step_count()) + " observations, got " +
                    std::to_string(ys.size()));
  }
}

template <typename T>
Gaussian<T> kf_predict(const Gaussian<T>& prev_filtered, const StepModel<T>& step) {
  return marginalize(transition_of(step, prev_filtered.cov.rep()), prev_filtered);
}

template <typename T>
FilterStepOutput<T> kf_update(const Gaussian<T>& predicted, const StepModel<T>& step,
                              const Vector<T>& y) {
  const Index dim = predicted.dim();
  const Index obs_dim = step.observation.rows();
  require_shape(step.observation, obs_dim, dim, "observation matrix");
  require_shape(y, obs_dim, 1, "observation");
  const Rep rep = predicted.cov.rep();
  const Covariance<T> noise = to_rep(step.observation_noise, rep);
  const Matrix<T>& h = step.observation;
  Vector<T> expected = h * predicted.mean + step.observation_bias;

  if (obs_dim == 0) {
    return {predicted, predicted, {expected, Covariance<T>::zero(0, rep)},
            Matrix<T>::Zero(dim, 0), T(0)};
  }

  if (rep == Rep::Dense) {
    const Matrix<T>& cov = predicted.cov.matrix();
    Matrix<T> innov_cov = h * cov * h.transpose() + noise.matrix();
    const auto lu = checked_lu<T>(innov_cov.transpose(), ErrorKind::SingularInnovation,
                                  "innovation covariance");
    Matrix<T> gain = lu.solve(h * cov.transpose()).transpose();
    const Vector<T> residual = y - expected;
    const T loglik = lu_log_density<T>(lu, residual);
    Vector<T> mean = predicted.mean + gain * residual;
    Matrix<T> posterior = cov - gain * innov_cov * gain.transpose();
    return {predicted,
            {std::move(mean), Covariance<T>::dense(std::move(posterior))},
            {std::move(expected), Covariance<T>::dense(std::move(innov_cov))},
            std::move(gain),
            loglik};
  }

  auto qr = condition_block_qr<T>(predicted.cov.matrix(), h, noise.matrix());
  Gaussian<T> innovation{std::move(expected), Covariance<T>::factor(std::move(qr.obs_cov_factor))};
  const T loglik = log_density(innovation, y);
  Vector<T> mean = predicted.mean + qr.gain * (y - innovation.mean);
  return {predicted,
          {std::move(mean), Covariance<T>::factor(std::move(qr.posterior_cov_factor))},
          std::move(innovation),
          std::move(qr.gain),
          loglik};
}

template <typename T>
FilterResult<T> run_filter(const Lgssm<T>& model, const Observations<T>& ys, Rep rep,
                           bool retain_steps) {
  require_observations(model, ys);
  FilterResult<T> result{to_rep(model.initial, rep), T(0), {}};
  if (retain_steps) {
    result.steps.reserve(ys.size());
  }
  for (std::size_t k = 1; k <= ys.size(); ++k) {
    try {
      const StepModel<T>& step = model.steps[k - 1];
      FilterStepOutput<T> out = kf_update(kf_predict(result.filtered, step), step, ys[k - 1]);
      result.loglik += out.loglik_increment;
      result.filtered = out.filtered;
      if (retain_steps) {
        result.steps.push_back(std::move(out));
      }
    } catch (const Error& e) {
      throw e.at_step(k);
    }
  }
  return result;
}

template <typename T>
SmoothingStep<T> rts_forward_step(const Gaussian<T>& prev_filtered, const StepModel<T>& step) {
  const Index dim = prev_filtered.dim();
  require_shape(step.transition, dim, dim, "transition matrix");
  const Matrix<T>& a = step.transition;
  Vector<T> pred_mean = a * prev_filtered.mean + step.transition_bias;

  if (!prev_filtered.cov.is_factor()) {
    const Matrix<T>& cov = prev_filtered.cov.matrix();
    Gaussian<T> predicted = kf_predict(prev_filtered, step);
    const Matrix<T>& pred_cov = predicted.cov.matrix();
    const auto lu = checked_lu<T>(pred_cov.transpose(), ErrorKind::SingularPrediction,
                                  "predicted covariance");
    Matrix<T> gain = lu.solve(a * cov.transpose()).transpose();
    Vector<T> offset = prev_filtered.mean - gain * predicted.mean;
    Matrix<T> noise = cov - gain * pred_cov * gain.transpose();
    return {std::move(predicted),
            {std::move(gain), std::move(offset), Covariance<T>::dense(std::move(noise))}};
  }

  const Covariance<T> process = to_factor(step.process_noise);
  auto qr = condition_block_qr<T>(prev_filtered.cov.matrix(), a, process.matrix(),
                                  ErrorKind::SingularPrediction);
  Vector<T> offset = prev_filtered.mean - qr.gain * pred_mean;
  return {{std::move(pred_mean), Covariance<T>::factor(std::move(qr.obs_cov_factor))},
          {std::move(qr.gain), std::move(offset),
           Covariance<T>::factor(std::move(qr.posterior_cov_factor))}};
}

template <typename T>
RtsResult<T> run_rts(const Lgssm<T>& model, const Observations<T>& ys, Rep rep) {
  require_observations(model, ys);
  RtsResult<T> result;
  result.conditionals.reserve(ys.size());
  result.marginals.reserve(ys.size() + 1);

  Gaussian<T> filtered = to_rep(model.initial, rep);
  for (std::size_t k = 1; k <= ys.size(); ++k) {
    try {
      const StepModel<T>& step = model.steps[k - 1];
      SmoothingStep<T> fwd = rts_forward_step(filtered, step);
      result.conditionals.push_back(std::move(fwd.conditional));
      FilterStepOutput<T> out = kf_update(fwd.predicted, step, ys[k - 1]);
      result.loglik += out.loglik_increment;
      filtered = std::move(out.filtered);
    } catch (const Error& e) {
      throw e.at_step(k);
    }
  }

  // Backward pass, filled from the end and reversed once.
  result.marginals.push_back(filtered);
  for (std::size_t k = ys.size(); k >= 1; --k) {
    result.marginals.push_back(marginalize(result.conditionals[k - 1], result.marginals.back()));
  }
  std::reverse(result.marginals.begin(), result.marginals.end());
  return result;
}

#define FIXPOINT_INSTANTIATE(T)                                                             \
  template void require_observations<T>(const Lgssm<T>&, const Observations<T>&);           \
  template Gaussian<T> kf_predict<T>(const Gaussian<T>&, const StepModel<T>&);              \
  template FilterStepOutput<T> kf_update<T>(const Gaussian<T>&, const StepModel<T>&,        \
                                            const Vector<T>&);                              \
  template FilterResult<T> run_filter<T>(const Lgssm<T>&, const Observations<T>&, Rep,      \
                                         bool);                                             \
  template SmoothingStep<T> rts_forward_step<T>(const Gaussian<T>&, const StepModel<T>&);   \
  template RtsResult<T> run_rts<T>(const Lgssm<T>&, const Observations<T>&, Rep);

FIXPOINT_INSTANTIATE(float)
FIXPOINT_INSTANTIATE(double)

#undef FIXPOINT_INSTANTIATE

}  // namespace fixpoint

#include "fixpoint/linear_ssm.hpp"

#include "fixpoint/random.hpp"

namespace fixpoint {

template <typename T>
void Lgssm<T>::validate() const {
  const Index dim = state_dim();
  require_shape(initial.cov.matrix(), dim, dim, "initial covariance");
  if (obs_dim < 0) {
    throw Error(ErrorKind::InvalidModel, "negative observation dimension");
  }
  if (!initial.mean.allFinite() || !initial.cov.matrix().allFinite()) {
    throw Error(ErrorKind::InvalidModel, "initial distribution has non-finite entries");
  }
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const StepModel<T>& step = steps[k];
    try {
      require_shape(step.transition, dim, dim, "transition matrix");
      require_shape(step.transition_bias, dim, 1, "transition bias");
      require_shape(step.process_noise.matrix(), dim, dim, "process noise");
      require_shape(step.observation, obs_dim, dim, "observation matrix");
      require_shape(step.observation_bias, obs_dim, 1, "observation bias");
      require_shape(step.observation_noise.matrix(), obs_dim, obs_dim, "observation noise");
    } catch (const Error& e) {
      throw e.at_step(k + 1);
    }
    if (!step.transition.allFinite() || !step.observation.allFinite() ||
        !step.process_noise.matrix().allFinite() || !step.observation_noise.matrix().allFinite() ||
        !step.transition_bias.allFinite() || !step.observation_bias.allFinite()) {
      throw Error(ErrorKind::InvalidModel, "non-finite model entry", k + 1);
    }
  }
}

namespace {

enum Channel : std::uint64_t { kInitial = 0, kProcess = 1, kObservation = 2 };

constexpr std::uint64_t stream_id(Channel channel, std::uint64_t step) {
  return (std::uint64_t(channel) << 48) | step;
}

template <typename T>
Vector<T> noise_draw(const Matrix<T>& factor, std::uint64_t seed, Channel channel,
                     std::uint64_t step) {
  Vector<T> z(factor.cols());
  for (Index i = 0; i < z.size(); ++i) {
    z(i) = T(counter_normal(seed, stream_id(channel, step), std::uint64_t(i)));
  }
  return factor * z;
}

template <typename T>
Matrix<T> block_diag(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out = Matrix<T>::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

template <typename T>
Trajectory<T> sample(const Lgssm<T>& model, std::uint64_t seed) {
  model.validate();
  Trajectory<T> out;
  out.seed = seed;
  out.states.reserve(model.step_count() + 1);
  out.observations.reserve(model.step_count());

  Vector<T> state = model.initial.mean +
                    noise_draw<T>(to_factor(model.initial.cov).matrix(), seed, kInitial, 0);
  out.states.push_back(state);
  for (std::size_t k = 1; k <= model.step_count(); ++k) {
    const StepModel<T>& step = model.steps[k - 1];
    state = step.transition * state + step.transition_bias +
            noise_draw<T>(to_factor(step.process_noise).matrix(), seed, kProcess, k);
    out.states.push_back(state);
    out.observations.push_back(
        step.observation * state + step.observation_bias +
        noise_draw<T>(to_factor(step.observation_noise).matrix(), seed, kObservation, k));
  }
  return out;
}

template <typename T>
Lgssm<T> augment(const Lgssm<T>& model) {
  model.validate();
  const Index dim = model.state_dim();

  Vector<T> mean(2 * dim);
  mean << model.initial.mean, model.initial.mean;
  const Matrix<T>& init = model.initial.cov.matrix();
  Covariance<T> init_cov = Covariance<T>::zero(2 * dim, model.initial.cov.rep());
  if (model.initial.cov.is_factor()) {
    Matrix<T> factor = Matrix<T>::Zero(2 * dim, 2 * dim);
    factor.topLeftCorner(dim, dim) = init;
    factor.bottomLeftCorner(dim, dim) = init;
    init_cov = Covariance<T>::factor(std::move(factor));
  } else {
    Matrix<T> sigma(2 * dim, 2 * dim);
    sigma << init, init, init, init;
    init_cov = Covariance<T>::dense(std::move(sigma));
  }

  Lgssm<T> out{{std::move(mean), std::move(init_cov)}, {}, model.obs_dim};
  out.steps.reserve(model.step_count());
  const Matrix<T> zero = Matrix<T>::Zero(dim, dim);
  for (const StepModel<T>& step : model.steps) {
    Vector<T> bias(2 * dim);
    bias << step.transition_bias, Vector<T>::Zero(dim);
    Matrix<T> noise = block_diag<T>(step.process_noise.matrix(), zero);
    Matrix<T> observation(model.obs_dim, 2 * dim);
    observation << step.observation, Matrix<T>::Zero(model.obs_dim, dim);
    out.steps.push_back(
        {block_diag<T>(step.transition, Matrix<T>::Identity(dim, dim)), std::move(bias),
         step.process_noise.is_factor() ? Covariance<T>::factor(std::move(noise))
                                        : Covariance<T>::dense(std::move(noise)),
         std::move(observation), step.observation_bias, step.observation_noise});
  }
  return out;
}

template <typename T>
Gaussian<T> dense_posterior(const Lgssm<T>& model, const Observations<T>& ys,
                            std::span<const std::size_t> query) {
  model.validate();
  const Index dim = model.state_dim();
  const Index obs_dim = model.obs_dim;
  const std::size_t steps = model.step_count();
  if (steps * std::size_t(dim) > kDensePosteriorMaxSize) {
    throw Error(ErrorKind::InvalidModel, "dense_posterior is limited to K * D <= 200");
  }
  if (ys.size() > steps) {
    throw Error(ErrorKind::DimensionMismatch, "more observations than model steps");
  }
  for (std::size_t q : query) {
    if (q > steps) {
      throw Error(ErrorKind::DimensionMismatch, "query index beyond the last state");
    }
  }

  // Joint moments of x_{0:K}.
  const Index total = Index(steps + 1) * dim;
  Vector<T> state_mean(total);
  Matrix<T> state_cov = Matrix<T>::Zero(total, total);
  state_mean.head(dim) = model.initial.mean;
  state_cov.topLeftCorner(dim, dim) = model.initial.cov.covariance();
  for (std::size_t k = 1; k <= steps; ++k) {
    const StepModel<T>& step = model.steps[k - 1];
    const Matrix<T>& a = step.transition;
    const Index cur = Index(k) * dim;
    const Index prev = cur - dim;
    state_mean.segment(cur, dim) = a * state_mean.segment(prev, dim) + step.transition_bias;
    for (Index j = 0; j < cur; j += dim) {
      state_cov.block(j, cur, dim, dim) = state_cov.block(j, prev, dim, dim) * a.transpose();
      state_cov.block(cur, j, dim, dim) = state_cov.block(j, cur, dim, dim).transpose();
    }
    state_cov.block(cur, cur, dim, dim) =
        a * state_cov.block(prev, prev, dim, dim) * a.transpose() +
        step.process_noise.covariance();
  }

  const Index n_query = Index(query.size()) * dim;
  Matrix<T> select = Matrix<T>::Zero(n_query, total);
  for (std::size_t i = 0; i < query.size(); ++i) {
    select.block(Index(i) * dim, Index(query[i]) * dim, dim, dim).setIdentity();
  }
  Vector<T> mean = select * state_mean;
  Matrix<T> cov = select * state_cov * select.transpose();

  const Index n_obs = Index(ys.size()) * obs_dim;
  if (n_obs > 0) {
    Matrix<T> obs_map = Matrix<T>::Zero(n_obs, total);
    Vector<T> obs_mean(n_obs);
    Vector<T> data(n_obs);
    Matrix<T> obs_noise = Matrix<T>::Zero(n_obs, n_obs);
    for (std::size_t k = 1; k <= ys.size(); ++k) {
      const StepModel<T>& step = model.steps[k - 1];
      require_shape(ys[k - 1], obs_dim, 1, "observation");
      const Index row = Index(k - 1) * obs_dim;
      obs_map.block(row, Index(k) * dim, obs_dim, dim) = step.observation;
      obs_mean.segment(row, obs_dim) =
          step.observation * state_mean.segment(Index(k) * dim, dim) + step.observation_bias;
      data.segment(row, obs_dim) = ys[k - 1];
      obs_noise.block(row, row, obs_dim, obs_dim) = step.observation_noise.covariance();
    }
    const Matrix<T> cross = state_cov * obs_map.transpose();
    Matrix<T> obs_cov = obs_map * cross + obs_noise;
    const T jitter = T(1e-12) * obs_cov.diagonal().cwiseAbs().maxCoeff();
    obs_cov.diagonal().array() += jitter;

    Eigen::LLT<Matrix<T>> llt(obs_cov);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::SingularCovariance, "joint observation covariance is singular");
    }
    const Matrix<T> query_cross = select * cross;
    mean += query_cross * llt.solve(data - obs_mean);
    cov -= query_cross * llt.solve(query_cross.transpose());
  }
  cov = T(0.5) * (cov + cov.transpose()).eval();
  return {std::move(mean), Covariance<T>::dense(std::move(cov))};
}

#define FIXPOINT_INSTANTIATE(T)                                                         \
  template struct Lgssm<T>;                                                             \
  template Trajectory<T> sample<T>(const Lgssm<T>&, std::uint64_t);                     \
  template Lgssm<T> augment<T>(const Lgssm<T>&);                                        \
  template Gaussian<T> dense_posterior<T>(const Lgssm<T>&, const Observations<T>&,      \
                                          std::span<const std::size_t>);

FIXPOINT_INSTANTIATE(float)
FIXPOINT_INSTANTIATE(double)

#undef FIXPOINT_INSTANTIATE

}  // namespace fixpoint

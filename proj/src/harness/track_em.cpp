#include "fixpoint/harness/track_em.hpp"

#include <cmath>
#include <limits>

#include "fixpoint/fixed_point.hpp"
#include "fixpoint/random.hpp"

namespace fixpoint::harness {

namespace {

constexpr std::uint64_t kEmStream = 0xB000000000000003ull;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Lgssm<double> wiener_velocity_model(std::size_t steps, double dt, double obs_stddev) {
  const Matrix<double> i2 = Matrix<double>::Identity(2, 2);
  Matrix<double> a = Matrix<double>::Identity(4, 4);
  a.topRightCorner(2, 2) = dt * i2;
  Matrix<double> b(4, 4);
  b << std::pow(dt, 3) / 3 * i2, dt * dt / 2 * i2,
       dt * dt / 2 * i2,         dt * i2;
  Matrix<double> h = Matrix<double>::Zero(2, 4);
  h.leftCols(2) = i2;
  const Covariance<double> process = to_factor(Covariance<double>::dense(b));
  const Covariance<double> noise = Covariance<double>::factor(obs_stddev * i2);

  Lgssm<double> model;
  model.obs_dim = 2;
  model.initial = {Vector<double>::Zero(4), Covariance<double>::factor(Matrix<double>::Identity(4, 4))};
  for (std::size_t k = 0; k < steps; ++k) {
    model.steps.push_back({a, Vector<double>::Zero(4), process, h, Vector<double>::Zero(2), noise});
  }
  return model;
}

TrackEmResult run_track_em(std::size_t iters, std::uint64_t seed) {
  if (iters < 1) {
    throw std::invalid_argument("expectation maximisation needs at least one iteration");
  }
  NormalStream normal(seed, kEmStream);
  Lgssm<double> model = wiener_velocity_model();
  Vector<double> mean(4);
  Matrix<double> chol(4, 4);
  Vector<double> guess(4);
  for (Index i = 0; i < 4; ++i) {
    mean(i) = normal();
  }
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) {
      chol(i, j) = normal();
    }
  }
  for (Index i = 0; i < 4; ++i) {
    guess(i) = 10.0 * normal();
  }
  model.initial = {mean, Covariance<double>::factor(chol)};
  const Trajectory<double> truth = sample(model, seed);

  TrackEmResult result;
  result.theta_true = truth.states.front();
  result.m_init = guess;
  result.report.metadata["model"] = "Wiener velocity, D=4, d=2, K=10, dt=0.1, R=0.01 I";
  result.report.metadata["seed"] = std::to_string(seed);
  result.report.metadata["update"] = "initial mean <- mean of p(x_0 | y_{1:K})";

  Vector<double> estimate = guess;
  for (std::size_t i = 0; i <= iters; ++i) {
    model.initial.mean = estimate;
    const double loglik = run_filter(model, truth.observations, Rep::Factor).loglik;
    const Gaussian<double> posterior = run_fps(model, truth.observations, Rep::Factor);
    const Vector<double> stddev = posterior.cov.covariance().diagonal().cwiseMax(0.0).cwiseSqrt();

    result.estimates.push_back(estimate);
    result.logliks.push_back(loglik);
    const double rmse = std::sqrt((estimate - result.theta_true).squaredNorm() / 4.0);
    result.report.rows.push_back({"track-em", "em-iter-" + std::to_string(i), "factor", 2,
                                  model.step_count(), "f64", kNaN, kNaN, rmse, loglik, false});
    for (Index c = 0; c < 4; ++c) {
      result.report.posterior.push_back({i, int(c), posterior.mean(c), stddev(c)});
    }
    estimate = posterior.mean;
  }
  return result;
}

}  // namespace fixpoint::harness

#include "fixpoint/harness/random_model.hpp"

#include <cstdlib>

#include "fixpoint/random.hpp"

namespace fixpoint::harness {

const char* to_string(Precision precision) {
  return precision == Precision::F32 ? "f32" : "f64";
}

Precision precision_from_string(const std::string& text) {
  if (text == "f32") {
    return Precision::F32;
  }
  if (text == "f64") {
    return Precision::F64;
  }
  throw std::invalid_argument("unknown precision '" + text + "' (expected f32 or f64)");
}

Precision precision_from_env(Precision fallback) {
  const char* value = std::getenv("FIXPOINT_PRECISION");
  if (value == nullptr || *value == '\0') {
    return fallback;
  }
  return precision_from_string(value);
}

namespace {

// Stream ids for model construction; trajectory sampling uses the low ids.
constexpr std::uint64_t kBenchStream = 0xB000000000000001ull;
constexpr std::uint64_t kTestStream = 0xB000000000000002ull;

Matrix<double> draw(NormalStream& normal, Index rows, Index cols, double scale) {
  Matrix<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = scale * normal();
    }
  }
  return m;
}

Vector<double> draw(NormalStream& normal, Index size, double scale) {
  return draw(normal, size, 1, scale);
}

Covariance<double> stored(const Matrix<double>& sigma, Rep storage) {
  return to_rep(Covariance<double>::dense(sigma), storage);
}

}  // namespace

Problem<double> gen_random_model(int d, std::size_t steps, std::uint64_t seed) {
  if (d < 1) {
    throw std::invalid_argument("gen_random_model needs d >= 1");
  }
  const Index obs_dim = d;
  const Index dim = 2 * obs_dim;
  const double scale = 1.0 / double(std::max<std::size_t>(steps, 1));
  NormalStream normal(seed, kBenchStream);

  Problem<double> out;
  out.model.obs_dim = obs_dim;
  out.model.initial.mean = draw(normal, dim, scale);
  out.model.initial.cov = Covariance<double>::factor(draw(normal, dim, dim, scale));
  out.model.steps.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    StepModel<double> step{draw(normal, dim, dim, scale),
                           draw(normal, dim, scale),
                           Covariance<double>::factor(draw(normal, dim, dim, scale)),
                           draw(normal, obs_dim, dim, scale),
                           draw(normal, obs_dim, scale),
                           Covariance<double>::factor(draw(normal, obs_dim, obs_dim, scale))};
    out.model.steps.push_back(std::move(step));
  }
  out.ys = sample(out.model, seed).observations;
  return out;
}

Problem<double> random_test_problem(Index state_dim, Index obs_dim, std::size_t steps,
                                    std::uint64_t seed, Rep storage) {
  NormalStream normal(seed, kTestStream);
  const auto spd = [&](Index n, double floor, double spread) {
    const Matrix<double> f = draw(normal, n, n, spread);
    return Matrix<double>(f * f.transpose() + floor * Matrix<double>::Identity(n, n));
  };

  Problem<double> out;
  out.model.obs_dim = obs_dim;
  out.model.initial.mean = draw(normal, state_dim, 1.0);
  out.model.initial.cov = stored(spd(state_dim, 0.5, 0.5), storage);
  for (std::size_t k = 0; k < steps; ++k) {
    Matrix<double> a = 0.6 * Matrix<double>::Identity(state_dim, state_dim) +
                       draw(normal, state_dim, state_dim, 0.3 / std::sqrt(double(state_dim)));
    StepModel<double> step{std::move(a),
                           draw(normal, state_dim, 0.2),
                           stored(spd(state_dim, 0.2, 0.3), storage),
                           draw(normal, obs_dim, state_dim, 1.0),
                           draw(normal, obs_dim, 0.2),
                           stored(spd(obs_dim, 0.3, 0.3), storage)};
    out.model.steps.push_back(std::move(step));
  }
  out.ys = sample(out.model, seed).observations;
  return out;
}

}  // namespace fixpoint::harness

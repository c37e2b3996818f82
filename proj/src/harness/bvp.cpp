#include "fixpoint/harness/bvp.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "fixpoint/fixed_point.hpp"
#include "fixpoint/harness/bench.hpp"

namespace fixpoint::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename T>
Gaussian<double> fps_in(const Problem<double>& problem, Rep rep) {
  if constexpr (std::is_same_v<T, double>) {
    return run_fps(problem.model, problem.ys, rep);
  } else {
    const Problem<T> cast = problem.cast<T>();
    return run_fps(cast.model, cast.ys, rep).template cast<double>();
  }
}

}  // namespace

BvpNoise bvp_noise_from_string(const std::string& text) {
  if (text == "as-printed") {
    return BvpNoise::AsPrinted;
  }
  if (text == "standard" || text == "standard-iwp2") {
    return BvpNoise::StandardIwp2;
  }
  throw std::invalid_argument("unknown noise mode '" + text + "' (expected as-printed or standard)");
}

BvpSpacing bvp_spacing_from_string(const std::string& text) {
  if (text == "printed") {
    return BvpSpacing::Printed;
  }
  if (text == "grid") {
    return BvpSpacing::Grid;
  }
  throw std::invalid_argument("unknown spacing '" + text + "' (expected printed or grid)");
}

const char* to_string(BvpNoise noise) {
  return noise == BvpNoise::AsPrinted ? "as-printed" : "standard-iwp2";
}

const char* to_string(BvpSpacing spacing) {
  return spacing == BvpSpacing::Printed ? "printed" : "grid";
}

Matrix<double> bvp_process_noise(double dt, BvpNoise noise) {
  const double corner = noise == BvpNoise::AsPrinted ? std::pow(dt, 3) / 3 : std::pow(dt, 3) / 6;
  Matrix<double> b(3, 3);
  b << std::pow(dt, 5) / 20, std::pow(dt, 4) / 8, corner,
       std::pow(dt, 4) / 8,  std::pow(dt, 3) / 3, dt * dt / 2,
       corner,               dt * dt / 2,         dt;
  return b;
}

Problem<double> build_bvp_model(std::size_t K, BvpNoise noise, BvpSpacing spacing) {
  if (K < 2) {
    throw std::invalid_argument("the boundary value problem needs K >= 2");
  }
  const double dt = spacing == BvpSpacing::Printed ? 1.0 / double(K) : 2.0 / double(K);
  Matrix<double> a(3, 3);
  a << 1, dt, dt * dt / 2,
       0, 1,  dt,
       0, 0,  1;
  const Matrix<double> b = bvp_process_noise(dt, noise);
  const Covariance<double> process = noise == BvpNoise::AsPrinted
                                         ? Covariance<double>::factor(psd_projection_factor(b))
                                         : to_factor(Covariance<double>::dense(b));

  Problem<double> out;
  out.model.obs_dim = 1;
  out.model.initial.mean = Vector<double>::Unit(3, 0);
  out.model.initial.cov =
      Covariance<double>::factor(Vector<double>(Eigen::Vector3d(0, 1, 1)).asDiagonal());
  for (std::size_t k = 1; k <= K; ++k) {
    const double t = -1.0 + 2.0 * double(k) / double(K);
    Matrix<double> h(1, 3);
    Vector<double> beta = Vector<double>::Zero(1);
    if (k < K) {
      h << -t, 0, 1e-3;
    } else {
      h << 1, 0, 0;
      beta(0) = -1;
    }
    out.model.steps.push_back({a, Vector<double>::Zero(3), process, std::move(h),
                               std::move(beta), Covariance<double>::factor(Matrix<double>::Zero(1, 1))});
    out.ys.push_back(Vector<double>::Zero(1));
  }
  return out;
}

ExperimentReport run_bvp(const BvpConfig& config) {
  ExperimentReport report;
  report.metadata["noise"] = to_string(config.noise);
  report.metadata["spacing"] = to_string(config.spacing);
  report.metadata["reference"] = "augmented filter, factor representation, f64";
  const char* precision = to_string(config.precision);

  for (Rep rep : config.reps) {
    for (std::size_t K : config.ks) {
      const Problem<double> problem = build_bvp_model(K, config.noise, config.spacing);
      const Vector<double> reference =
          run_fps_augmented(problem.model, problem.ys, Rep::Factor).mean;

      ReportRow row{"bvp", "fps", to_string(rep), 1, K, precision, kNaN,
                    double(4 * memory_floats(Method::Fps, 3, K)), kNaN, kNaN, false};
      try {
        const auto start = std::chrono::steady_clock::now();
        const Gaussian<double> result = config.precision == Precision::F32
                                            ? fps_in<float>(problem, rep)
                                            : fps_in<double>(problem, rep);
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        row.deviation_rmse = std::sqrt((result.mean - reference).squaredNorm() / 3.0);
        row.diverged = !std::isfinite(row.deviation_rmse);
      } catch (const Error&) {
        row.diverged = true;
      }
      if (row.diverged) {
        row.deviation_rmse = kNaN;
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace fixpoint::harness

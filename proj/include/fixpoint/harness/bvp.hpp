#pragma once

// Linear boundary value problem 1e-3 u'' = t u, u(-1) = u(1) = 1, posed as
// smoothing under a twice-integrated Wiener process prior. The state is
// (u, u', u'') on the grid t_k = -1 + 2k/K, k = 0..K; the ODE residual is
// observed as exactly zero at t_1..t_{K-1} and u(1) = 1 at t_K.

#include <vector>

#include "fixpoint/harness/random_model.hpp"
#include "fixpoint/harness/report.hpp"

namespace fixpoint::harness {

enum class BvpNoise {
  AsPrinted,     ///< (0,2) entry dt^3/3; the matrix is slightly indefinite and
                 ///< is projected onto the PSD cone before use
  StandardIwp2,  ///< (0,2) entry dt^3/6, the exact IWP(2) covariance
};

enum class BvpSpacing {
  Printed,  ///< dt = 1/K
  Grid,     ///< dt = 2/K, the actual grid spacing
};

BvpNoise bvp_noise_from_string(const std::string& text);
BvpSpacing bvp_spacing_from_string(const std::string& text);
const char* to_string(BvpNoise noise);
const char* to_string(BvpSpacing spacing);

/// Process noise covariance for one step of length dt.
Matrix<double> bvp_process_noise(double dt, BvpNoise noise);

/// Covariances are stored as factors; ys are all zero.
Problem<double> build_bvp_model(std::size_t K, BvpNoise noise = BvpNoise::AsPrinted,
                                BvpSpacing spacing = BvpSpacing::Printed);

struct BvpConfig {
  std::vector<std::size_t> ks{10, 20, 50, 100, 200, 500, 1000};
  std::vector<Rep> reps{Rep::Dense, Rep::Factor};
  Precision precision = Precision::F64;
  BvpNoise noise = BvpNoise::AsPrinted;
  BvpSpacing spacing = BvpSpacing::Printed;
};

/// One "bvp" row per (rep, K): RMSE between the fixed-point smoother mean of
/// x_0 and the augmented-filter reference (Factor, f64). Estimator errors
/// and non-finite results give diverged = true and a NaN deviation.
ExperimentReport run_bvp(const BvpConfig& config);

}  // namespace fixpoint::harness

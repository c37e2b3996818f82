#pragma once

// Estimating the initial mean of a Wiener-velocity car-tracking model by
// expectation maximisation; the E-step is the fixed-point smoother.

#include <vector>

#include "fixpoint/harness/random_model.hpp"
#include "fixpoint/harness/report.hpp"

namespace fixpoint::harness {

/// D = 4, d = 2 Wiener-velocity model on `steps` points with spacing `dt`.
/// The initial mean is left at zero; run_track_em overwrites it.
Lgssm<double> wiener_velocity_model(std::size_t steps = 10, double dt = 0.1,
                                    double obs_stddev = 0.1);

struct TrackEmResult {
  ExperimentReport report;
  Vector<double> theta_true;            ///< the sampled x_0
  Vector<double> m_init;                ///< initial guess, entries N(0, 100)
  std::vector<Vector<double>> estimates;  ///< m_0 .. m_iters, estimates[0] == m_init
  std::vector<double> logliks;          ///< log p(y_{1:K}) under each estimate
};

/// The true initial distribution has mean and factor entries drawn from a
/// standard normal; x_0 and the data are sampled from it. Each iteration
/// replaces the initial mean by the mean of p(x_0 | y_{1:K}) (fixed-point
/// smoother, factor representation). Row i of the report holds the evidence
/// of estimate i and its RMSE to x_0; the posterior rows hold the marginals
/// of p(x_0 | y_{1:K}) under each estimate.
TrackEmResult run_track_em(std::size_t iters, std::uint64_t seed);

}  // namespace fixpoint::harness

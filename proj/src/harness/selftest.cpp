#include "fixpoint/harness/selftest.hpp"

#include <array>
#include <cstdio>

#include "fixpoint/fixed_point.hpp"
#include "fixpoint/harness/random_model.hpp"

namespace fixpoint::harness {

namespace {

constexpr double kTolerance = 1e-8;

std::string scientific(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", value);
  return buf;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed, int models) {
  struct Route {
    const char* name;
    Gaussian<double> (*run)(const Lgssm<double>&, const Observations<double>&);
  };
  const std::array<Route, 5> routes{{
      {"fps dense", [](const Lgssm<double>& m, const Observations<double>& y) {
         return run_fps(m, y, Rep::Dense);
       }},
      {"fps factor", [](const Lgssm<double>& m, const Observations<double>& y) {
         return run_fps(m, y, Rep::Factor);
       }},
      {"augmented filter factor", [](const Lgssm<double>& m, const Observations<double>& y) {
         return run_fps_augmented(m, y, Rep::Factor);
       }},
      {"augmented filter dense", [](const Lgssm<double>& m, const Observations<double>& y) {
         return run_fps_augmented(m, y, Rep::Dense);
       }},
      {"rts factor", [](const Lgssm<double>& m, const Observations<double>& y) {
         return run_fps_via_rts(m, y, Rep::Factor);
       }},
  }};

  std::vector<SelftestCheck> checks;
  for (const Route& route : routes) {
    SelftestCheck check{route.name, true, ""};
    double worst = 0.0;
    for (int i = 0; i < models; ++i) {
      const Index dim = 1 + i % 4;
      const Problem<double> p = random_test_problem(dim, 1 + i % 2, 5 + 3 * i, seed + i);
      const std::array<std::size_t, 1> query{0};
      try {
        const Gaussian<double> oracle = dense_posterior(p.model, p.ys, query);
        const Gaussian<double> result = route.run(p.model, p.ys);
        worst = std::max({worst, (result.mean - oracle.mean).cwiseAbs().maxCoeff(),
                          (result.cov.covariance() - oracle.cov.matrix()).norm()});
      } catch (const std::exception& e) {
        check.passed = false;
        check.detail = e.what();
      }
    }
    if (check.detail.empty()) {
      check.passed = worst < kTolerance;
      check.detail = "max deviation " + scientific(worst);
    }
    checks.push_back(check);
  }
  return checks;
}

}  // namespace fixpoint::harness

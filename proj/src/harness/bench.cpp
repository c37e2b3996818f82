#include "fixpoint/harness/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#if defined(__SSE__) || defined(_M_X64)
#include <xmmintrin.h>
#define FIXPOINT_HAVE_MXCSR 1
#endif

namespace fixpoint::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename T>
bool finite(const Gaussian<T>& g) {
  return g.mean.allFinite() && g.cov.matrix().allFinite();
}

// Sets the flush-to-zero and denormals-are-zero bits for its lifetime.
class SubnormalFlush {
 public:
  explicit SubnormalFlush(bool enable) {
#ifdef FIXPOINT_HAVE_MXCSR
    saved_ = _mm_getcsr();
    if (enable) {
      _mm_setcsr(saved_ | 0x8040u);
    }
#else
    (void)enable;
#endif
  }
  ~SubnormalFlush() {
#ifdef FIXPOINT_HAVE_MXCSR
    _mm_setcsr(saved_);
#endif
  }
  SubnormalFlush(const SubnormalFlush&) = delete;
  SubnormalFlush& operator=(const SubnormalFlush&) = delete;

 private:
  unsigned saved_ = 0;
};

template <typename T>
Timing time_typed(const BenchConfig& config, const Problem<T>& problem) {
  Timing timing;
  const auto once = [&] {
    const auto start = std::chrono::steady_clock::now();
    const Gaussian<T> result = run_method(config.method, problem.model, problem.ys, config.rep);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    if (!finite(result)) {
      timing.diverged = true;
      timing.failure = "non-finite result";
    }
    return elapsed.count();
  };
  const SubnormalFlush flush(config.flush_subnormals);
  try {
    once();
    for (int i = 0; i < config.repeats; ++i) {
      timing.runs.push_back(once());
    }
  } catch (const Error& e) {
    timing.diverged = true;
    timing.failure = e.what();
  }
  timing.seconds = timing.runs.empty() ? kNaN : *std::min_element(timing.runs.begin(), timing.runs.end());
  return timing;
}

double rmse(const Vector<double>& a, const Vector<double>& b) {
  return std::sqrt((a - b).squaredNorm() / double(a.size()));
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::ViaRts:
      return "via-rts";
    case Method::ViaFilter:
      return "via-filter";
    case Method::Fps:
      return "fps";
  }
  return "?";
}

Method method_from_string(const std::string& text) {
  for (Method m : all_methods()) {
    if (text == to_string(m)) {
      return m;
    }
  }
  throw std::invalid_argument("unknown method '" + text + "' (expected via-rts, via-filter or fps)");
}

void BenchConfig::validate() const {
  if (d < 1 || K < 1 || repeats < 1) {
    throw std::invalid_argument("bench configuration needs d >= 1, K >= 1 and repeats >= 1");
  }
}

std::uint64_t memory_floats(Method method, std::uint64_t state_dim, std::uint64_t steps) {
  const std::uint64_t dd = state_dim * state_dim;
  switch (method) {
    case Method::Fps:
      return 3 * dd + 2 * state_dim;
    case Method::ViaFilter:
      return 4 * dd + 2 * state_dim;
    case Method::ViaRts:
      return steps * (3 * dd + 2 * state_dim);
  }
  throw std::invalid_argument("unknown method");
}

std::uint64_t memory_bytes(Method method, int d, std::uint64_t steps) {
  return 4 * memory_floats(method, 2 * std::uint64_t(d), steps);
}

template <typename T>
Gaussian<T> run_method(Method method, const Lgssm<T>& model, const Observations<T>& ys, Rep rep) {
  switch (method) {
    case Method::ViaRts:
      return run_fps_via_rts(model, ys, rep);
    case Method::ViaFilter:
      return run_fps_augmented(model, ys, rep);
    case Method::Fps:
      return run_fps(model, ys, rep);
  }
  throw std::invalid_argument("unknown method");
}

template Gaussian<float> run_method<float>(Method, const Lgssm<float>&, const Observations<float>&,
                                           Rep);
template Gaussian<double> run_method<double>(Method, const Lgssm<double>&,
                                             const Observations<double>&, Rep);

Timing time_method(const BenchConfig& config, const Problem<double>& problem) {
  config.validate();
  if (config.precision == Precision::F32) {
    return time_typed(config, problem.cast<float>());
  }
  return time_typed(config, problem);
}

Timing time_method(const BenchConfig& config) {
  config.validate();
  return time_method(config, gen_random_model(config.d, config.K, config.seed));
}

ExperimentReport run_bench(const BenchOptions& options) {
  ExperimentReport report;
  report.metadata["sampling"] =
      "model entries i.i.d. N(0, 1/K^2); data sampled from the generated model";
  report.metadata["memory"] = "closed-form float count x 4 bytes";
  report.metadata["timing"] = "one warm-up, minimum of " + std::to_string(options.repeats) + " runs" +
      (options.flush_subnormals ? ", subnormals flushed to zero" : "");

  const char* precision = to_string(options.precision);
  for (int d : options.ds) {
    for (Method m : all_methods()) {
      report.rows.push_back({"memory", to_string(m), to_string(options.rep), d, options.K,
                             precision, kNaN, double(memory_bytes(m, d, options.K)), kNaN, kNaN,
                             false});
    }
  }
  if (options.memory_only) {
    return report;
  }

  for (int d : options.ds) {
    const Problem<double> problem = gen_random_model(d, options.K, options.seed);
    Vector<double> reference;
    try {
      reference = run_fps_augmented(problem.model, problem.ys, Rep::Factor).mean;
    } catch (const Error&) {
      reference.resize(0);
    }
    for (Method m : all_methods()) {
      BenchConfig config{d,  options.K,       options.seed,
                         options.precision, options.rep, m,
                         options.repeats,   options.flush_subnormals};
      const Timing timing = time_method(config, problem);
      double deviation = kNaN;
      if (!timing.diverged && reference.size() > 0) {
        const Gaussian<double> result = options.precision == Precision::F32
                                            ? run_method(m, problem.model.cast<float>(),
                                                         problem.cast<float>().ys, options.rep)
                                                  .cast<double>()
                                            : run_method(m, problem.model, problem.ys, options.rep);
        deviation = rmse(result.mean, reference);
      }
      report.rows.push_back({"runtime", to_string(m), to_string(options.rep), d, options.K,
                             precision, timing.seconds, double(memory_bytes(m, d, options.K)),
                             deviation, kNaN, timing.diverged});
    }
  }
  return report;
}

}  // namespace fixpoint::harness

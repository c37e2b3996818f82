#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fixpoint/harness/bench.hpp"
#include "fixpoint/harness/bvp.hpp"
#include "fixpoint/harness/report.hpp"
#include "fixpoint/harness/selftest.hpp"
#include "fixpoint/harness/track_em.hpp"
#include "fixpoint/model_io.hpp"

namespace fh = fixpoint::harness;

namespace {

void deliver(const fh::ExperimentReport& report, const std::string& format,
             const std::string& out) {
  const fh::ReportFormat fmt = fh::report_format_from_string(format);
  if (!out.empty()) {
    fh::emit_report(report, fmt, out);
    return;
  }
  switch (fmt) {
    case fh::ReportFormat::Csv:
      std::cout << fh::render_csv(report);
      if (!report.posterior.empty()) {
        std::cout << "\n" << fh::render_posterior_csv(report);
      }
      break;
    case fh::ReportFormat::Json:
      std::cout << fh::to_json(report).dump(2) << "\n";
      break;
    case fh::ReportFormat::Markdown:
      std::cout << fh::render_markdown(report);
      break;
  }
}

fixpoint::Rep rep_from_string(const std::string& text) {
  return text == "dense" ? fixpoint::Rep::Dense : fixpoint::Rep::Factor;
}

const std::vector<std::string> kFormats{"csv", "json", "md"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-point smoothing for linear Gaussian state-space models"};
  app.require_subcommand(1);

  std::string precision_flag;
  app.add_option("--precision", precision_flag, "f32 or f64 (default: $FIXPOINT_PRECISION, else f64)")
      ->check(CLI::IsMember({"f32", "f64"}));
  const auto precision = [&] {
    return precision_flag.empty() ? fh::precision_from_env()
                                  : fh::precision_from_string(precision_flag);
  };

  // bench
  auto* bench = app.add_subcommand("bench", "runtime and memory of the three routes on random models");
  fh::BenchOptions bench_opts;
  std::string bench_out, bench_format = "csv", bench_rep = "factor";
  bench->add_option("--d", bench_opts.ds, "observation dimensions")->delimiter(',');
  bench->add_option("--K", bench_opts.K, "number of steps")->check(CLI::PositiveNumber);
  bench->add_option("--repeats", bench_opts.repeats, "timed runs per configuration")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_opts.seed, "model seed");
  bench->add_option("--rep", bench_rep)->check(CLI::IsMember({"dense", "factor"}));
  bench->add_flag("--memory-only", bench_opts.memory_only, "skip timing");
  bench->add_flag("!--keep-subnormals", bench_opts.flush_subnormals,
                  "time with gradual underflow instead of flushing subnormals to zero");
  bench->add_option("--out", bench_out, "output file (stdout if omitted)");
  bench->add_option("--format", bench_format)->check(CLI::IsMember(kFormats));

  // bvp
  auto* bvp = app.add_subcommand("bvp", "robustness on the boundary value problem");
  fh::BvpConfig bvp_config;
  std::string bvp_out, bvp_format = "csv", bvp_rep = "both", bvp_noise = "as-printed",
              bvp_spacing = "printed";
  bvp->add_option("--K-sweep", bvp_config.ks, "grid sizes")->delimiter(',');
  bvp->add_option("--rep", bvp_rep)->check(CLI::IsMember({"dense", "factor", "both"}));
  bvp->add_option("--noise", bvp_noise)->check(CLI::IsMember({"as-printed", "standard"}));
  bvp->add_option("--spacing", bvp_spacing, "step length: printed (1/K) or grid (2/K)")
      ->check(CLI::IsMember({"printed", "grid"}));
  bvp->add_option("--out", bvp_out);
  bvp->add_option("--format", bvp_format)->check(CLI::IsMember(kFormats));

  // track-em
  auto* em = app.add_subcommand("track-em", "estimate the initial mean of a tracking model by EM");
  std::size_t em_iters = 3;
  std::uint64_t em_seed = 0;
  std::string em_out, em_format = "csv";
  em->add_option("--iters", em_iters)->check(CLI::PositiveNumber);
  em->add_option("--seed", em_seed);
  em->add_option("--out", em_out);
  em->add_option("--format", em_format)->check(CLI::IsMember(kFormats));

  // selftest
  auto* selftest = app.add_subcommand("selftest", "cross-check all routes against a dense oracle");
  std::uint64_t selftest_seed = 0;
  selftest->add_option("--seed", selftest_seed);

  // smooth
  auto* smooth = app.add_subcommand("smooth", "p(x_0 | y_{1:K}) for a model file");
  std::string model_path, smooth_rep = "factor", smooth_method = "fps";
  std::uint64_t smooth_seed = 0;
  smooth->add_option("--model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
  smooth->add_option("--rep", smooth_rep)->check(CLI::IsMember({"dense", "factor"}));
  smooth->add_option("--method", smooth_method)
      ->check(CLI::IsMember({"fps", "via-filter", "via-rts"}));
  smooth->add_option("--seed", smooth_seed, "sampling seed when the file has no observations");

  // gen-model
  auto* gen = app.add_subcommand("gen-model", "write a model with sampled data as JSON");
  std::string gen_kind = "random", gen_out;
  int gen_d = 2;
  std::size_t gen_k = 100;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind)->check(CLI::IsMember({"random", "bvp", "tracking"}));
  gen->add_option("--d", gen_d)->check(CLI::PositiveNumber);
  gen->add_option("--K", gen_k)->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      bench_opts.precision = precision();
      bench_opts.rep = rep_from_string(bench_rep);
      deliver(fh::run_bench(bench_opts), bench_format, bench_out);
    } else if (*bvp) {
      bvp_config.precision = precision();
      bvp_config.noise = fh::bvp_noise_from_string(bvp_noise);
      bvp_config.spacing = fh::bvp_spacing_from_string(bvp_spacing);
      if (bvp_rep != "both") {
        bvp_config.reps = {rep_from_string(bvp_rep)};
      }
      deliver(fh::run_bvp(bvp_config), bvp_format, bvp_out);
    } else if (*em) {
      deliver(fh::run_track_em(em_iters, em_seed).report, em_format, em_out);
    } else if (*selftest) {
      bool ok = true;
      for (const auto& check : fh::run_selftest(selftest_seed)) {
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail
                  << "\n";
        ok = ok && check.passed;
      }
      return ok ? EXIT_SUCCESS : EXIT_FAILURE;
    } else if (*smooth) {
      const nlohmann::json doc = fixpoint::load_json(model_path);
      const fixpoint::Lgssm<double> model = fixpoint::model_from_json(doc);
      const auto stored = fixpoint::observations_from_json(doc);
      const fixpoint::Observations<double> ys =
          stored ? *stored : fixpoint::sample(model, smooth_seed).observations;
      const auto result = fh::run_method(fh::method_from_string(smooth_method), model, ys,
                                         rep_from_string(smooth_rep));
      const fixpoint::Matrix<double> cov = result.cov.covariance();
      nlohmann::json out{{"mean", std::vector<double>(result.mean.data(),
                                                      result.mean.data() + result.mean.size())}};
      nlohmann::json rows = nlohmann::json::array();
      for (fixpoint::Index i = 0; i < cov.rows(); ++i) {
        std::vector<double> row(cov.cols());
        for (fixpoint::Index j = 0; j < cov.cols(); ++j) {
          row[j] = cov(i, j);
        }
        rows.push_back(row);
      }
      out["cov"] = rows;
      std::cout << out.dump(2) << "\n";
    } else if (*gen) {
      fh::Problem<double> problem;
      if (gen_kind == "random") {
        problem = fh::gen_random_model(gen_d, gen_k, gen_seed);
      } else if (gen_kind == "bvp") {
        problem = fh::build_bvp_model(gen_k);
      } else {
        problem.model = fh::wiener_velocity_model();
        problem.ys = fixpoint::sample(problem.model, gen_seed).observations;
      }
      fixpoint::save_model(gen_out, problem.model, &problem.ys);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}

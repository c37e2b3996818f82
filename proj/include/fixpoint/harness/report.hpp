#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace fixpoint::harness {

/// One configuration of one experiment. Quantities that do not apply are NaN.
struct ReportRow {
  std::string experiment;
  std::string method;
  std::string rep;
  int d = 0;
  std::size_t K = 0;
  std::string precision = "f64";
  double wall_time_s = 0.0;
  double memory_bytes = 0.0;
  double deviation_rmse = 0.0;
  double loglik = 0.0;
  bool diverged = false;

  bool operator==(const ReportRow& other) const;
};

/// Marginal of one state component of p(x_0 | y_{1:K}) after an EM iteration.
struct PosteriorRow {
  std::size_t iteration = 0;
  int component = 0;
  double mean = 0.0;
  double stddev = 0.0;

  bool operator==(const PosteriorRow& other) const;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<PosteriorRow> posterior;
  std::map<std::string, std::string> metadata;

  bool operator==(const ExperimentReport& other) const = default;
};

enum class ReportFormat { Csv, Json, Markdown };

ReportFormat report_format_from_string(const std::string& text);

/// Column order shared by every tabular output.
const std::vector<std::string>& report_columns();

/// Locale-independent shortest round-trip formatting; "nan"/"inf" for
/// non-finite values.
std::string format_number(double value);

/// First two significant figures, truncated toward zero: 1680 -> "1.6e3".
std::string format_two_figures(double value);

std::string render_csv(const ExperimentReport& report);
std::string render_posterior_csv(const ExperimentReport& report);
std::string render_markdown(const ExperimentReport& report);

/// NaN and infinities are written as null and read back as NaN.
nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& json);

/// Writes the report. For CSV with posterior rows, a sibling file
/// "<stem>_posterior.csv" is written next to `path`. Throws
/// std::runtime_error naming the path on I/O failure.
void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& path);

}  // namespace fixpoint::harness

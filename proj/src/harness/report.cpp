#include "fixpoint/harness/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fixpoint::harness {

namespace {

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) {
    return text;
  }
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

// Rounded scientific notation with two significant figures: 0.0182 -> "1.8e-2".
std::string format_sci(double value) {
  if (!std::isfinite(value)) {
    return std::isnan(value) ? "NaN" : format_number(value);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", value);
  std::string text(buf);
  const auto e = text.find('e');
  const int exponent = std::stoi(text.substr(e + 1));
  return text.substr(0, e) + "e" + std::to_string(exponent);
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& cell : cells) {
    out += " " + cell + " |";
  }
  return out + "\n";
}

std::string md_header(const std::vector<std::string>& cells) {
  std::string out = md_row(cells) + "|";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out += i == 0 ? " --- |" : " ---: |";
  }
  return out + "\n";
}

// Rows keyed by `row_key` in order of appearance, columns by ascending
// `col_key`, cells from `cell`; missing combinations stay blank.
std::string md_grid(const std::vector<const ReportRow*>& rows, const std::string& corner,
                    const std::function<std::string(const ReportRow&)>& row_key,
                    const std::function<double(const ReportRow&)>& col_key,
                    const std::function<std::string(double)>& col_label,
                    const std::function<std::string(const ReportRow&)>& cell) {
  std::vector<std::string> row_keys;
  std::vector<double> col_keys;
  for (const ReportRow* row : rows) {
    if (std::find(row_keys.begin(), row_keys.end(), row_key(*row)) == row_keys.end()) {
      row_keys.push_back(row_key(*row));
    }
    if (std::find(col_keys.begin(), col_keys.end(), col_key(*row)) == col_keys.end()) {
      col_keys.push_back(col_key(*row));
    }
  }
  std::sort(col_keys.begin(), col_keys.end());

  std::vector<std::string> header{corner};
  for (double c : col_keys) {
    header.push_back(col_label(c));
  }
  std::string out = md_header(header);
  for (const auto& key : row_keys) {
    std::vector<std::string> cells{key};
    for (double c : col_keys) {
      std::string value;
      for (const ReportRow* row : rows) {
        if (row_key(*row) == key && col_key(*row) == c) {
          value = cell(*row);
        }
      }
      cells.push_back(value);
    }
    out += md_row(cells);
  }
  return out;
}

std::string label_d(double d) { return "d=" + std::to_string(static_cast<long>(d)); }
std::string label_k(double k) { return "K=" + std::to_string(static_cast<long>(k)); }

std::string md_generic(const std::vector<const ReportRow*>& rows) {
  std::string out = md_header(report_columns());
  for (const ReportRow* r : rows) {
    out += md_row({r->experiment, r->method, r->rep, std::to_string(r->d), std::to_string(r->K),
                   r->precision, format_number(r->wall_time_s), format_number(r->memory_bytes),
                   format_number(r->deviation_rmse), format_number(r->loglik),
                   r->diverged ? "true" : "false"});
  }
  return out;
}

std::string md_experiment(const std::string& name, const std::vector<const ReportRow*>& rows) {
  const auto method = [](const ReportRow& r) { return r.method; };
  const auto rep = [](const ReportRow& r) { return r.rep; };
  const auto by_d = [](const ReportRow& r) { return double(r.d); };
  const auto by_k = [](const ReportRow& r) { return double(r.K); };

  if (name == "memory") {
    return md_grid(rows, "bytes", method, by_d, label_d,
                   [](const ReportRow& r) { return format_two_figures(r.memory_bytes); });
  }
  if (name == "runtime") {
    return md_grid(rows, "seconds", method, by_d, label_d, [](const ReportRow& r) {
      return r.diverged ? std::string("NaN") : format_sci(r.wall_time_s);
    });
  }
  if (name == "bvp") {
    return md_grid(rows, "rep", rep, by_k, label_k, [](const ReportRow& r) {
      return r.diverged ? std::string("NaN") : format_sci(r.deviation_rmse);
    });
  }
  if (name == "track-em") {
    std::string out = md_header({"iteration", "loglik", "rmse to truth"});
    for (const ReportRow* r : rows) {
      out += md_row({r->method, format_number(r->loglik), format_sci(r->deviation_rmse)});
    }
    return out;
  }
  return md_generic(rows);
}

std::string md_posterior(const std::vector<PosteriorRow>& rows) {
  std::string out = md_header({"iteration", "component", "mean", "stddev"});
  for (const auto& p : rows) {
    out += md_row({std::to_string(p.iteration), std::to_string(p.component),
                   format_number(p.mean), format_number(p.stddev)});
  }
  return out;
}

nlohmann::json number_or_null(double value) {
  return std::isfinite(value) ? nlohmann::json(value) : nlohmann::json(nullptr);
}

double number_from(const nlohmann::json& json, const char* key) {
  const auto& value = json.at(key);
  return value.is_null() ? kNaN : value.get<double>();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << contents;
  out.flush();
  if (!out) {
    throw std::runtime_error("failed to write '" + path + "'");
  }
}

}  // namespace

bool ReportRow::operator==(const ReportRow& o) const {
  return experiment == o.experiment && method == o.method && rep == o.rep && d == o.d &&
         K == o.K && precision == o.precision && same(wall_time_s, o.wall_time_s) &&
         same(memory_bytes, o.memory_bytes) && same(deviation_rmse, o.deviation_rmse) &&
         same(loglik, o.loglik) && diverged == o.diverged;
}

bool PosteriorRow::operator==(const PosteriorRow& o) const {
  return iteration == o.iteration && component == o.component && same(mean, o.mean) &&
         same(stddev, o.stddev);
}

ReportFormat report_format_from_string(const std::string& text) {
  if (text == "csv") {
    return ReportFormat::Csv;
  }
  if (text == "json") {
    return ReportFormat::Json;
  }
  if (text == "md") {
    return ReportFormat::Markdown;
  }
  throw std::invalid_argument("unknown report format '" + text + "' (expected csv, json or md)");
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> columns{
      "experiment", "method",         "rep",          "d",      "K",       "precision",
      "wall_time_s", "memory_bytes", "deviation_rmse", "loglik", "diverged"};
  return columns;
}

std::string format_number(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

std::string format_two_figures(double value) {
  if (!std::isfinite(value)) {
    return format_number(value);
  }
  if (value == 0.0) {
    return "0.0e0";
  }
  // The shortest round-trip digits are exact enough to truncate from.
  char buf[64];
  const auto result =
      std::to_chars(buf, buf + sizeof buf, std::abs(value), std::chars_format::scientific);
  const std::string text(buf, result.ptr);
  const auto e = text.find('e');
  const std::string digits = text.substr(0, e);
  const char second = digits.size() > 2 ? digits[2] : '0';
  const int exponent = std::stoi(text.substr(e + 1));
  return std::string(value < 0 ? "-" : "") + digits[0] + "." + second + "e" +
         std::to_string(exponent);
}

std::string render_csv(const ExperimentReport& report) {
  std::string out;
  const auto& columns = report_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out += (i ? "," : "") + columns[i];
  }
  out += "\n";
  for (const auto& r : report.rows) {
    out += csv_field(r.experiment) + "," + csv_field(r.method) + "," + csv_field(r.rep) + "," +
           std::to_string(r.d) + "," + std::to_string(r.K) + "," + csv_field(r.precision) + "," +
           format_number(r.wall_time_s) + "," + format_number(r.memory_bytes) + "," +
           format_number(r.deviation_rmse) + "," + format_number(r.loglik) + "," +
           (r.diverged ? "true" : "false") + "\n";
  }
  return out;
}

std::string render_posterior_csv(const ExperimentReport& report) {
  std::string out = "iteration,component,mean,stddev\n";
  for (const auto& p : report.posterior) {
    out += std::to_string(p.iteration) + "," + std::to_string(p.component) + "," +
           format_number(p.mean) + "," + format_number(p.stddev) + "\n";
  }
  return out;
}

std::string render_markdown(const ExperimentReport& report) {
  std::string out;
  for (const auto& [key, value] : report.metadata) {
    out += "- " + key + ": " + value + "\n";
  }
  std::vector<std::string> experiments;
  for (const auto& row : report.rows) {
    if (std::find(experiments.begin(), experiments.end(), row.experiment) == experiments.end()) {
      experiments.push_back(row.experiment);
    }
  }
  for (const auto& name : experiments) {
    std::vector<const ReportRow*> rows;
    for (const auto& row : report.rows) {
      if (row.experiment == name) {
        rows.push_back(&row);
      }
    }
    out += (out.empty() ? "" : "\n") + std::string("## ") + name + "\n\n" +
           md_experiment(name, rows);
  }
  if (!report.posterior.empty()) {
    out += (out.empty() ? "" : "\n") + std::string("## posterior of x_0\n\n") +
           md_posterior(report.posterior);
  }
  return out;
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"experiment", r.experiment},
                    {"method", r.method},
                    {"rep", r.rep},
                    {"d", r.d},
                    {"K", r.K},
                    {"precision", r.precision},
                    {"wall_time_s", number_or_null(r.wall_time_s)},
                    {"memory_bytes", number_or_null(r.memory_bytes)},
                    {"deviation_rmse", number_or_null(r.deviation_rmse)},
                    {"loglik", number_or_null(r.loglik)},
                    {"diverged", r.diverged}});
  }
  nlohmann::json posterior = nlohmann::json::array();
  for (const auto& p : report.posterior) {
    posterior.push_back({{"iteration", p.iteration},
                         {"component", p.component},
                         {"mean", number_or_null(p.mean)},
                         {"stddev", number_or_null(p.stddev)}});
  }
  return {{"metadata", report.metadata}, {"rows", rows}, {"posterior", posterior}};
}

ExperimentReport report_from_json(const nlohmann::json& json) {
  ExperimentReport report;
  if (json.contains("metadata")) {
    report.metadata = json.at("metadata").get<std::map<std::string, std::string>>();
  }
  for (const auto& r : json.at("rows")) {
    report.rows.push_back({r.at("experiment").get<std::string>(),
                           r.at("method").get<std::string>(),
                           r.at("rep").get<std::string>(),
                           r.at("d").get<int>(),
                           r.at("K").get<std::size_t>(),
                           r.at("precision").get<std::string>(),
                           number_from(r, "wall_time_s"),
                           number_from(r, "memory_bytes"),
                           number_from(r, "deviation_rmse"),
                           number_from(r, "loglik"),
                           r.at("diverged").get<bool>()});
  }
  if (json.contains("posterior")) {
    for (const auto& p : json.at("posterior")) {
      report.posterior.push_back({p.at("iteration").get<std::size_t>(),
                                  p.at("component").get<int>(), number_from(p, "mean"),
                                  number_from(p, "stddev")});
    }
  }
  return report;
}

void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& path) {
  switch (format) {
    case ReportFormat::Csv: {
      write_file(path, render_csv(report));
      if (!report.posterior.empty()) {
        const std::filesystem::path p(path);
        const auto sibling = p.parent_path() / (p.stem().string() + "_posterior.csv");
        write_file(sibling.string(), render_posterior_csv(report));
      }
      return;
    }
    case ReportFormat::Json:
      write_file(path, to_json(report).dump(2) + "\n");
      return;
    case ReportFormat::Markdown:
      write_file(path, render_markdown(report));
      return;
  }
}

}  // namespace fixpoint::harness

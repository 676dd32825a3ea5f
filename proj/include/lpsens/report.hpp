#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lpsens/matrix.hpp"

namespace lpsens {

using NamedValues = std::vector<std::pair<std::string, double>>;

struct ErrorMetrics {
  double mean_abs_log_ratio = 0.0;
  double max_abs_log_ratio = 0.0;
  std::size_t compared = 0;  // rows where both values are positive and finite
};

struct ReportTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SensitivityReport {
  std::string command;
  std::string input;
  std::size_t n = 0;
  std::size_t d = 0;
  double p = 1.0;
  std::string method;
  std::uint64_t seed = 0;
  NamedValues config;
  std::optional<Vector> estimates;
  std::optional<double> total;
  std::optional<double> max;
  std::optional<Vector> oracle;
  std::optional<double> oracle_total;
  std::optional<double> oracle_max;
  std::optional<ErrorMetrics> metrics;
  NamedValues diagnostics;
  NamedValues timings;  // wall-clock seconds per phase
  ReportTable table;
};

// Mean and max of |log(approx_i / truth_i)|.
ErrorMetrics log_ratio_metrics(const Vector& approx, const Vector& truth);

std::string to_json(const SensitivityReport& report);
SensitivityReport report_from_json(const std::string& text);

// Long format with header section,key,index,value.
std::string to_csv(const SensitivityReport& report);
SensitivityReport report_from_csv(const std::string& text);

// Format chosen by extension: .json or .csv.
void save_report(const std::string& path, const SensitivityReport& report);
SensitivityReport load_report(const std::string& path);

// Human-readable summary for stdout.
void print_report(std::ostream& out, const SensitivityReport& report);

// Field-by-field equality; doubles compare bit for bit. With
// ignore_timings the timings block is skipped.
bool same_report(const SensitivityReport& a, const SensitivityReport& b,
                 bool ignore_timings = false);

}  // namespace lpsens

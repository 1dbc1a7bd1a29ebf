#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sagplace/topology.hpp"

namespace sagplace {

/// One solver run on one sampled instance.
struct TrialRow {
  std::string topology;
  std::size_t nodes = 0;
  std::size_t trial = 0;
  std::string method;  // "approx" | "exact"
  double objective = 0.0;
  double avg_latency_ms = 0.0;
  double avg_reliability = 0.0;
  std::size_t facilities = 0;
  std::optional<double> time_ms;
  std::optional<double> approx_ratio;
  std::string sweep_key;  // empty without a sweep
  double sweep_value = 0.0;
  int failure_case = 1;
  std::optional<double> sync_cost;        // controller latency/overhead runs only
  std::vector<NodeId> open;

  friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t n = 0;

  friend bool operator==(const Stat&, const Stat&) = default;
};

Stat summarize(const std::vector<double>& values);

/// Mean and standard deviation per (topology, method, sweep point).
struct AggregateRow {
  std::string topology;
  std::size_t nodes = 0;
  std::string method;
  std::string sweep_key;
  double sweep_value = 0.0;
  std::size_t trials = 0;
  Stat objective;
  Stat avg_latency_ms;
  Stat avg_reliability;
  Stat facilities;
  std::optional<Stat> time_ms;
  std::optional<Stat> approx_ratio;
  std::optional<Stat> sync_cost;
};

struct ExperimentReport {
  char experiment = 'A';
  std::string sweep_key;
  std::vector<TrialRow> rows;
  std::vector<AggregateRow> aggregates;

  /// Rows of a single sweep point (all rows without a sweep).
  ExperimentReport slice(double sweep_value) const;
  /// Distinct sweep values in first-appearance order.
  std::vector<double> sweep_values() const;
};

/// Groups rows in first-appearance order.
std::vector<AggregateRow> aggregate(const std::vector<TrialRow>& rows);

inline constexpr const char* kReportCsvHeader =
    "topology,trial,method,objective,avg_latency_ms,avg_reliability,facilities,time_ms,approx_ratio";

enum class ReportFormat { csv, json };

std::string report_csv(const ExperimentReport& report);
nlohmann::json report_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& doc);

/// Writes the report; throws InvalidInput when the path cannot be written.
void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::filesystem::path& path);

/// 9 significant digits, the precision every emitted float uses.
std::string format_real(double x);

/// Columnar x/y data for one figure, one row per point.
struct PlotPoint {
  std::string series;
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

struct PlotSeries {
  std::string figure;
  std::string x_name;
  std::string y_name;
  std::vector<PlotPoint> points;
};

/// Figures: lat_gw, gw_tradeoff, rel_cases, rel_vs_budget, sync_tradeoff,
/// runtime. Throws InvalidInput naming the missing sweep dimension or
/// experiment when the report cannot feed the figure.
PlotSeries plot_data(const ExperimentReport& report, const std::string& figure);

std::string plot_csv(const PlotSeries& series);

}  // namespace sagplace

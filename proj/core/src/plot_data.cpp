#include <sstream>

#include <fmt/format.h>

#include "sagplace/errors.hpp"
#include "sagplace/report.hpp"

namespace sagplace {

namespace {

void require_experiment(const ExperimentReport& report, const std::string& figure,
                        const std::string& allowed) {
  if (allowed.find(report.experiment) == std::string::npos) {
    throw InvalidInput(fmt::format("figure {} needs experiment {}, report is experiment {}", figure,
                                   allowed, report.experiment));
  }
}

void require_sweep(const ExperimentReport& report, const std::string& figure,
                   std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (report.sweep_key == k) return;
  }
  std::string names;
  for (const char* k : keys) names += names.empty() ? k : std::string(" or ") + k;
  throw InvalidInput(fmt::format("figure {} needs a sweep over {}, report has {}", figure, names,
                                 report.sweep_key.empty() ? "none" : report.sweep_key));
}

std::string series_name(const AggregateRow& a) { return a.topology + " " + a.method; }

}  // namespace

PlotSeries plot_data(const ExperimentReport& report, const std::string& figure) {
  PlotSeries out;
  out.figure = figure;
  const auto& aggs = report.aggregates;

  if (figure == "lat_gw") {
    require_experiment(report, figure, "A");
    out.x_name = "nodes";
    out.y_name = "value";
    for (const AggregateRow& a : aggs) {
      const double x = static_cast<double>(a.nodes);
      out.points.push_back({a.method + " latency", a.topology, x, a.avg_latency_ms.mean});
      out.points.push_back({a.method + " gateways", a.topology, x, a.facilities.mean});
      out.points.push_back({a.method + " objective", a.topology, x, a.objective.mean});
    }
  } else if (figure == "gw_tradeoff") {
    require_experiment(report, figure, "A");
    require_sweep(report, figure, {"alpha"});
    out.x_name = "alpha";
    out.y_name = "value";
    for (const AggregateRow& a : aggs) {
      out.points.push_back({series_name(a) + " gateways", a.topology, a.sweep_value,
                            a.facilities.mean});
      out.points.push_back({series_name(a) + " latency", a.topology, a.sweep_value,
                            a.avg_latency_ms.mean});
    }
  } else if (figure == "rel_cases") {
    require_sweep(report, figure, {"case"});
    out.x_name = "case";
    out.y_name = "avg_reliability";
    for (const AggregateRow& a : aggs) {
      out.points.push_back({series_name(a), a.topology, a.sweep_value, a.avg_reliability.mean});
    }
  } else if (figure == "rel_vs_budget") {
    require_experiment(report, figure, "BD");
    require_sweep(report, figure, {"gmax", "kmax"});
    out.x_name = report.sweep_key;
    out.y_name = "avg_reliability";
    for (const AggregateRow& a : aggs) {
      out.points.push_back({series_name(a), a.topology, a.sweep_value, a.avg_reliability.mean});
    }
  } else if (figure == "sync_tradeoff") {
    require_experiment(report, figure, "C");
    require_sweep(report, figure, {"beta"});
    out.x_name = "avg_latency_ms";
    out.y_name = "sync_cost";
    for (const AggregateRow& a : aggs) {
      if (!a.sync_cost) continue;
      out.points.push_back({series_name(a), fmt::format("beta={}", format_real(a.sweep_value)),
                            a.avg_latency_ms.mean, a.sync_cost->mean});
    }
  } else if (figure == "runtime") {
    out.x_name = "nodes";
    out.y_name = "time_ms";
    for (const AggregateRow& a : aggs) {
      if (!a.time_ms) {
        throw InvalidInput("figure runtime needs solver times; rerun the bench with --timing");
      }
      out.points.push_back({a.method, a.topology, static_cast<double>(a.nodes), a.time_ms->mean});
    }
  } else {
    throw InvalidInput(fmt::format(
        "unknown figure '{}' (expected lat_gw, gw_tradeoff, rel_cases, rel_vs_budget, "
        "sync_tradeoff or runtime)",
        figure));
  }
  return out;
}

std::string plot_csv(const PlotSeries& series) {
  std::ostringstream out;
  out << "series,label," << series.x_name << ',' << series.y_name << '\n';
  for (const PlotPoint& p : series.points) {
    out << p.series << ',' << p.label << ',' << format_real(p.x) << ',' << format_real(p.y) << '\n';
  }
  return out.str();
}

}  // namespace sagplace

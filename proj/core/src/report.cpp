#include "sagplace/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sagplace/errors.hpp"

namespace sagplace {

namespace {

using nlohmann::json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

double round9(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_real(x));
}

json optional_real(const std::optional<double>& x) {
  return x ? json(round9(*x)) : json(nullptr);
}

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json stat_json(const Stat& s) {
  return {{"mean", round9(s.mean)}, {"std", round9(s.stddev)}, {"n", s.n}};
}

json optional_stat(const std::optional<Stat>& s) { return s ? stat_json(*s) : json(nullptr); }

Stat read_stat(const json& j) {
  return {j.at("mean").get<double>(), j.at("std").get<double>(), j.at("n").get<std::size_t>()};
}

std::optional<Stat> read_optional_stat(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return read_stat(j.at(key));
}

std::string stat_cells(const Stat& s) {
  return fmt::format("{},{}", format_real(s.mean), format_real(s.stddev));
}

std::string stat_cells(const std::optional<Stat>& s) { return s ? stat_cells(*s) : ","; }

}  // namespace

std::string format_real(double x) { return fmt::format("{:.9g}", x); }

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRow>& rows) {
  using Key = std::tuple<std::string, std::string, std::string, double>;
  std::map<Key, std::size_t> slot;
  std::vector<std::vector<const TrialRow*>> groups;
  for (const TrialRow& r : rows) {
    Key key{r.topology, r.method, r.sweep_key, r.sweep_value};
    auto [it, inserted] = slot.emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }

  std::vector<AggregateRow> out;
  for (const auto& g : groups) {
    const TrialRow& first = *g.front();
    AggregateRow a;
    a.topology = first.topology;
    a.nodes = first.nodes;
    a.method = first.method;
    a.sweep_key = first.sweep_key;
    a.sweep_value = first.sweep_value;
    a.trials = g.size();
    std::vector<double> obj, lat, rel, fac, time, ratio, sync;
    for (const TrialRow* r : g) {
      obj.push_back(r->objective);
      lat.push_back(r->avg_latency_ms);
      rel.push_back(r->avg_reliability);
      fac.push_back(static_cast<double>(r->facilities));
      if (r->time_ms) time.push_back(*r->time_ms);
      if (r->approx_ratio) ratio.push_back(*r->approx_ratio);
      if (r->sync_cost) sync.push_back(*r->sync_cost);
    }
    a.objective = summarize(obj);
    a.avg_latency_ms = summarize(lat);
    a.avg_reliability = summarize(rel);
    a.facilities = summarize(fac);
    if (!time.empty()) a.time_ms = summarize(time);
    if (!ratio.empty()) a.approx_ratio = summarize(ratio);
    if (!sync.empty()) a.sync_cost = summarize(sync);
    out.push_back(std::move(a));
  }
  return out;
}

ExperimentReport ExperimentReport::slice(double sweep_value) const {
  ExperimentReport out;
  out.experiment = experiment;
  out.sweep_key = sweep_key;
  for (const TrialRow& r : rows) {
    if (sweep_key.empty() || r.sweep_value == sweep_value) out.rows.push_back(r);
  }
  out.aggregates = aggregate(out.rows);
  return out;
}

std::vector<double> ExperimentReport::sweep_values() const {
  std::vector<double> out;
  for (const TrialRow& r : rows) {
    if (std::find(out.begin(), out.end(), r.sweep_value) == out.end()) out.push_back(r.sweep_value);
  }
  return out;
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << kReportCsvHeader << '\n';
  for (const TrialRow& r : report.rows) {
    out << csv_field(r.topology) << ',' << r.trial << ',' << r.method << ','
        << format_real(r.objective) << ',' << format_real(r.avg_latency_ms) << ','
        << format_real(r.avg_reliability) << ',' << r.facilities << ','
        << (r.time_ms ? format_real(*r.time_ms) : "") << ','
        << (r.approx_ratio ? format_real(*r.approx_ratio) : "") << '\n';
  }
  out << '\n'
      << "aggregate,method,sweep,sweep_value,trials,objective_mean,objective_std,"
         "avg_latency_ms_mean,avg_latency_ms_std,avg_reliability_mean,avg_reliability_std,"
         "facilities_mean,facilities_std,time_ms_mean,time_ms_std,approx_ratio_mean,"
         "approx_ratio_std\n";
  for (const AggregateRow& a : report.aggregates) {
    out << csv_field(a.topology) << ',' << a.method << ',' << a.sweep_key << ','
        << (a.sweep_key.empty() ? "" : format_real(a.sweep_value)) << ',' << a.trials << ','
        << stat_cells(a.objective) << ',' << stat_cells(a.avg_latency_ms) << ','
        << stat_cells(a.avg_reliability) << ',' << stat_cells(a.facilities) << ','
        << stat_cells(a.time_ms) << ',' << stat_cells(a.approx_ratio) << '\n';
  }
  return out.str();
}

nlohmann::json report_json(const ExperimentReport& report) {
  json rows = json::array();
  for (const TrialRow& r : report.rows) {
    rows.push_back({{"topology", r.topology},
                    {"nodes", r.nodes},
                    {"trial", r.trial},
                    {"method", r.method},
                    {"objective", round9(r.objective)},
                    {"avg_latency_ms", round9(r.avg_latency_ms)},
                    {"avg_reliability", round9(r.avg_reliability)},
                    {"facilities", r.facilities},
                    {"time_ms", optional_real(r.time_ms)},
                    {"approx_ratio", optional_real(r.approx_ratio)},
                    {"sweep_key", r.sweep_key},
                    {"sweep_value", round9(r.sweep_value)},
                    {"case", r.failure_case},
                    {"sync_cost", optional_real(r.sync_cost)},
                    {"open", r.open}});
  }
  json aggs = json::array();
  for (const AggregateRow& a : report.aggregates) {
    aggs.push_back({{"topology", a.topology},
                    {"nodes", a.nodes},
                    {"method", a.method},
                    {"sweep_key", a.sweep_key},
                    {"sweep_value", round9(a.sweep_value)},
                    {"trials", a.trials},
                    {"objective", stat_json(a.objective)},
                    {"avg_latency_ms", stat_json(a.avg_latency_ms)},
                    {"avg_reliability", stat_json(a.avg_reliability)},
                    {"facilities", stat_json(a.facilities)},
                    {"time_ms", optional_stat(a.time_ms)},
                    {"approx_ratio", optional_stat(a.approx_ratio)},
                    {"sync_cost", optional_stat(a.sync_cost)}});
  }
  return {{"experiment", std::string(1, report.experiment)},
          {"sweep_key", report.sweep_key},
          {"rows", std::move(rows)},
          {"aggregates", std::move(aggs)}};
}

ExperimentReport report_from_json(const nlohmann::json& doc) {
  ExperimentReport rep;
  try {
    const std::string exp = doc.at("experiment").get<std::string>();
    if (exp.size() != 1) throw InvalidInput("experiment must be a single letter");
    rep.experiment = exp[0];
    rep.sweep_key = doc.value("sweep_key", std::string{});
    for (const json& j : doc.at("rows")) {
      TrialRow r;
      r.topology = j.at("topology").get<std::string>();
      r.nodes = j.at("nodes").get<std::size_t>();
      r.trial = j.at("trial").get<std::size_t>();
      r.method = j.at("method").get<std::string>();
      r.objective = j.at("objective").get<double>();
      r.avg_latency_ms = j.at("avg_latency_ms").get<double>();
      r.avg_reliability = j.at("avg_reliability").get<double>();
      r.facilities = j.at("facilities").get<std::size_t>();
      r.time_ms = read_optional(j, "time_ms");
      r.approx_ratio = read_optional(j, "approx_ratio");
      r.sweep_key = j.value("sweep_key", std::string{});
      r.sweep_value = j.value("sweep_value", 0.0);
      r.failure_case = j.value("case", 1);
      r.sync_cost = read_optional(j, "sync_cost");
      r.open = j.value("open", std::vector<NodeId>{});
      rep.rows.push_back(std::move(r));
    }
    for (const json& j : doc.at("aggregates")) {
      AggregateRow a;
      a.topology = j.at("topology").get<std::string>();
      a.nodes = j.at("nodes").get<std::size_t>();
      a.method = j.at("method").get<std::string>();
      a.sweep_key = j.value("sweep_key", std::string{});
      a.sweep_value = j.value("sweep_value", 0.0);
      a.trials = j.at("trials").get<std::size_t>();
      a.objective = read_stat(j.at("objective"));
      a.avg_latency_ms = read_stat(j.at("avg_latency_ms"));
      a.avg_reliability = read_stat(j.at("avg_reliability"));
      a.facilities = read_stat(j.at("facilities"));
      a.time_ms = read_optional_stat(j, "time_ms");
      a.approx_ratio = read_optional_stat(j, "approx_ratio");
      a.sync_cost = read_optional_stat(j, "sync_cost");
      rep.aggregates.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(fmt::format("malformed report JSON: {}", e.what()));
  }
  return rep;
}

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput(fmt::format("cannot write {}", path.string()));
  if (format == ReportFormat::csv) {
    out << report_csv(report);
  } else {
    out << report_json(report).dump(2) << '\n';
  }
  if (!out) throw InvalidInput(fmt::format("write to {} failed", path.string()));
}

}  // namespace sagplace

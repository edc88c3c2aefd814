#include <cstdio>
#include <sstream>

#include "urt/experiments.hpp"

namespace urt {

const ReportRow* ExperimentReport::find(std::string_view metric,
                                        const nlohmann::ordered_json& match) const {
  for (const auto& row : rows) {
    if (row.point.value("metric", std::string{}) != metric) continue;
    bool ok = true;
    for (const auto& [key, value] : match.items()) {
      if (!row.point.contains(key) || row.point.at(key) != value) {
        ok = false;
        break;
      }
    }
    if (ok) return &row;
  }
  return nullptr;
}

namespace {

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

// key=value pairs joined by ';', without the metric.
std::string flatten_point(const nlohmann::ordered_json& point) {
  std::string out;
  for (const auto& [key, value] : point.items()) {
    if (key == "metric") continue;
    if (!out.empty()) out += ';';
    out += key + '=' + (value.is_string() ? value.get<std::string>() : value.dump());
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

std::string to_json(const ExperimentReport& report, bool include_runtime) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"point", row.point},
                    {"estimate", row.estimate},
                    {"se", optional_json(row.se)},
                    {"exact", optional_json(row.exact)},
                    {"limit", optional_json(row.limit)},
                    {"seed", report.seed}});
  }
  nlohmann::ordered_json j{{"schema", kReportSchema},
                           {"experiment", report.experiment},
                           {"config", report.config},
                           {"seed", report.seed},
                           {"rows", rows},
                           {"notes", report.notes}};
  if (include_runtime) j["runtime_ms"] = report.runtime_ms;
  return j.dump(2) + "\n";
}

std::string to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "experiment,metric,point,estimate,se,exact,limit,seed\n";
  for (const auto& row : report.rows) {
    out << report.experiment << ',' << csv_field(row.point.value("metric", std::string{})) << ','
        << csv_field(flatten_point(row.point)) << ',' << format_double(row.estimate) << ','
        << format_optional(row.se) << ',' << format_optional(row.exact) << ','
        << format_optional(row.limit) << ',' << report.seed << '\n';
  }
  return out.str();
}

}  // namespace urt

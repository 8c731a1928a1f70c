#pragma once

#include <string>

#include <json.hpp>

#include "zspace/intent.hpp"
#include "zspace/orchestrator.hpp"

namespace zspace {

enum class ReportFormat { markdown_table, json_summary, text };

inline nlohmann::json report_summary_json(const ExecutionReport& report,
                                          const ParsedIntent& intent) {
  nlohmann::ordered_json j;
  j["query"] = intent.query_text;
  j["category"] = intent.category;
  j["operation"] = to_string(intent.operation);
  j["target"] = intent.target_object;
  j["success"] = report.success;
  j["makespan"] = report.makespan;
  j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : report.steps) {
    nlohmann::ordered_json step;
    step["step_id"] = s.step_id;
    step["tool"] = s.tool_name;
    step["status"] = to_string(s.status);
    step["attempts"] = s.attempts;
    step["start"] = s.start_time;
    step["end"] = s.end_time;
    step["outputs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.staged_outputs) step["outputs"][k] = v;
    if (!s.error.empty()) step["error"] = s.error;
    j["steps"].push_back(std::move(step));
  }
  return j;
}

namespace detail {

inline std::string join_outputs(const KvMap& m) {
  std::string out;
  for (const auto& [k, v] : m) {
    if (!out.empty()) out += "; ";
    out += k + "=" + v;
  }
  return out;
}

}  // namespace detail

// Deterministic rendering of a finished run. The json-summary form
// round-trips through a JSON parser.
inline std::string synthesize_report(const ExecutionReport& report,
                                     const ParsedIntent& intent, ReportFormat format) {
  switch (format) {
    case ReportFormat::json_summary:
      return report_summary_json(report, intent).dump(2) + "\n";

    case ReportFormat::markdown_table: {
      std::string out = "# Execution report\n\n";
      out += "- query: " + intent.query_text + "\n";
      out += "- operation: " + to_string(intent.operation);
      if (!intent.target_object.empty()) out += " " + intent.target_object;
      out += "\n- outcome: " + std::string(report.success ? "success" : "failure");
      out += " (makespan " + std::to_string(report.makespan) + ")\n\n";
      out += "| step | tool | status | attempts | outputs |\n";
      out += "|---|---|---|---|---|\n";
      for (const auto& s : report.steps) {
        out += "| " + s.step_id + " | " + s.tool_name + " | " + to_string(s.status) +
               " | " + std::to_string(s.attempts) + " | " +
               detail::join_outputs(s.staged_outputs) + " |\n";
      }
      return out;
    }

    case ReportFormat::text: {
      std::string out = "execution " + std::string(report.success ? "succeeded" : "failed") +
                        ", makespan " + std::to_string(report.makespan) + "\n";
      for (const auto& s : report.steps) {
        out += "  " + s.step_id + ": " + to_string(s.status) + " tool=" + s.tool_name +
               " attempts=" + std::to_string(s.attempts);
        if (!s.error.empty()) out += " error=" + s.error;
        out += "\n";
      }
      return out;
    }
  }
  return {};
}

}  // namespace zspace

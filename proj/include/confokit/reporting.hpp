#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "confokit/dependency_miner.hpp"
#include "confokit/task_analytics.hpp"
#include "confokit/taxonomy.hpp"

namespace confokit {

inline constexpr std::string_view k_tool_name = "confokit";
inline constexpr std::string_view k_tool_version = "0.1.0";

// Fitness values are serialized with six decimal places.
double round6(double value);

// FNV-1a 64 content hash, "fnv1a64:" + 16 hex digits.
std::string content_digest(std::string_view bytes);

// Whole-file atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct ChevronPalette {
  std::string conforming = "green";
  std::string missing = "purple";
  std::string wrong = "yellow";
};

// One horizontal chevron band per row, cells colored by status.
std::string render_chevron_svg(const std::vector<ChevronRow>& rows, const ChevronPalette& palette = {});

// One bar per bin with edge and count labels.
std::string render_histogram_svg(const DistributionBuckets& buckets);

// The net as a graph; transitions with violations are red and carry counts,
// violation activities unknown to the net land in a legend.
std::string annotate_model_dot(const PetriNet& net,
                               const std::map<std::string, std::int64_t>& violations_per_activity);

struct ReportInput {
  std::string name;    // "log", "model", ...
  std::string path;
  std::string digest;

  friend bool operator==(const ReportInput&, const ReportInput&) = default;
};

struct ReportDocument {
  std::string generated_at;  // ISO 8601; empty means reproducible mode
  std::vector<ReportInput> inputs;
  nlohmann::ordered_json sections;  // task name -> payload

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

// Serializes with stable key order; section keys must name an operation of
// the analytics or dependency-mining surface.
std::string emit_report(const ReportDocument& document);
ReportDocument parse_report(std::string_view text);

// Section payload builders shared by the CLI and the report tests.
nlohmann::ordered_json conformance_section(const ConformanceReport& report);
nlohmann::ordered_json chevron_section(const std::vector<ChevronRow>& rows);
nlohmann::ordered_json distribution_section(const DistributionBuckets& buckets);
nlohmann::ordered_json violation_items_section(const std::vector<ViolationItem>& items);
nlohmann::ordered_json comparison_section(const std::vector<std::pair<std::string, double>>& rows);
nlohmann::ordered_json violation_summary_section(
    const std::vector<std::pair<std::string, std::int64_t>>& ranked);
nlohmann::ordered_json over_time_section(const std::vector<TimeWindowPoint>& series);
nlohmann::ordered_json per_rule_section(const std::map<std::string, double>& rates);
nlohmann::ordered_json patterns_section(const std::vector<ViolationPattern>& patterns);
nlohmann::ordered_json reason_tree_section(const ReasonTree& tree);
nlohmann::ordered_json outcome_section(const OutcomeImpact& impact);
nlohmann::ordered_json dfg_section(const DfgModel& model);
nlohmann::ordered_json marginals_section(const Marginals& marginals);
nlohmann::ordered_json sankey_section(const std::vector<SankeyLink>& links);

}  // namespace confokit

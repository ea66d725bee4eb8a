#include "confokit/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "confokit/errors.hpp"

namespace confokit {

double round6(double value) { return std::round(value * 1e6) / 1e6; }

std::string content_digest(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  }
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "fnv1a64:%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw argument_error("cannot write file: " + temp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw argument_error("short write: " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string format2(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", value);
  return buffer;
}

}  // namespace

std::string render_chevron_svg(const std::vector<ChevronRow>& rows, const ChevronPalette& palette) {
  if (rows.empty()) throw argument_error("chevron rendering needs at least one row");

  constexpr int cell_w = 96, cell_h = 28, gap = 4, notch = 12, left = 90, top = 10, row_gap = 12;
  std::size_t max_cells = 0;
  for (const ChevronRow& row : rows) max_cells = std::max(max_cells, row.cells.size());
  int width = left + static_cast<int>(max_cells) * (cell_w + gap) + 10;
  int height = top + static_cast<int>(rows.size()) * (cell_h + row_gap);

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                    "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const ChevronRow& row = rows[r];
    int y = top + static_cast<int>(r) * (cell_h + row_gap);
    svg += "  <text x=\"4\" y=\"" + std::to_string(y + cell_h / 2 + 4) + "\">" + xml_escape(row.case_id) +
           "</text>\n";
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      const ChevronCell& cell = row.cells[c];
      int x = left + static_cast<int>(c) * (cell_w + gap);
      const std::string* fill = &palette.conforming;
      if (cell.status == ChevronCell::Status::missing) fill = &palette.missing;
      if (cell.status == ChevronCell::Status::wrong) fill = &palette.wrong;
      // Right-pointing chevron band.
      std::string points = std::to_string(x) + "," + std::to_string(y) + " " +
                           std::to_string(x + cell_w - notch) + "," + std::to_string(y) + " " +
                           std::to_string(x + cell_w) + "," + std::to_string(y + cell_h / 2) + " " +
                           std::to_string(x + cell_w - notch) + "," + std::to_string(y + cell_h) + " " +
                           std::to_string(x) + "," + std::to_string(y + cell_h) + " " +
                           std::to_string(x + notch) + "," + std::to_string(y + cell_h / 2);
      svg += "  <polygon points=\"" + points + "\" fill=\"" + xml_escape(*fill) +
             "\" stroke=\"black\"/>\n";
      svg += "  <text x=\"" + std::to_string(x + cell_w / 2) + "\" y=\"" +
             std::to_string(y + cell_h / 2 + 4) + "\" text-anchor=\"middle\">" + xml_escape(cell.label) +
             "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_histogram_svg(const DistributionBuckets& buckets) {
  if (buckets.counts.empty() || buckets.edges.size() != buckets.counts.size() + 1)
    throw argument_error("histogram needs bins with matching edges");

  constexpr int bar_w = 72, gap = 8, plot_h = 160, left = 40, top = 20, bottom = 36;
  int width = left + static_cast<int>(buckets.counts.size()) * (bar_w + gap) + 10;
  int height = top + plot_h + bottom;
  std::int64_t max_count = 1;
  for (std::int64_t count : buckets.counts) max_count = std::max(max_count, count);

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                    "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "  <line x1=\"" + std::to_string(left) + "\" y1=\"" + std::to_string(top + plot_h) + "\" x2=\"" +
         std::to_string(width - 6) + "\" y2=\"" + std::to_string(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < buckets.counts.size(); ++i) {
    int x = left + static_cast<int>(i) * (bar_w + gap);
    int bar_h = static_cast<int>(buckets.counts[i] * plot_h / max_count);
    int y = top + plot_h - bar_h;
    svg += "  <rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
           std::to_string(bar_w) + "\" height=\"" + std::to_string(bar_h) + "\" fill=\"steelblue\" stroke=\"black\"/>\n";
    svg += "  <text x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" + std::to_string(y - 4) +
           "\" text-anchor=\"middle\">" + std::to_string(buckets.counts[i]) + "</text>\n";
    std::string range = "[" + format2(buckets.edges[i]) + "," + format2(buckets.edges[i + 1]) +
                        (i + 1 == buckets.counts.size() ? "]" : ")");
    svg += "  <text x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" + std::to_string(top + plot_h + 16) +
           "\" text-anchor=\"middle\">" + range + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string annotate_model_dot(const PetriNet& net,
                               const std::map<std::string, std::int64_t>& violations_per_activity) {
  std::set<std::string> known_labels;
  for (const TransitionDef& t : net.transitions())
    if (t.label) known_labels.insert(*t.label);

  std::string dot = "digraph net {\n  rankdir=LR;\n";
  for (const std::string& place : net.places()) {
    std::string label = place;
    std::int64_t initial = net.initial_marking().count(place);
    if (initial > 0) label += " [" + std::to_string(initial) + "]";
    dot += "  \"" + place + "\" [shape=circle, label=\"" + label + "\"];\n";
  }
  for (const TransitionDef& t : net.transitions()) {
    std::string label = t.label.value_or(t.id);
    std::string extra;
    if (t.label) {
      auto hit = violations_per_activity.find(*t.label);
      if (hit != violations_per_activity.end() && hit->second > 0) {
        label += " (" + std::to_string(hit->second) + ")";
        extra = ", style=filled, fillcolor=red";
      }
    }
    if (!t.label) extra = ", style=filled, fillcolor=black";
    dot += "  \"" + t.id + "\" [shape=box, label=\"" + label + "\"" + extra + "];\n";
  }
  for (const auto& [from, to] : net.arcs()) dot += "  \"" + from + "\" -> \"" + to + "\";\n";

  std::string legend;
  for (const auto& [activity, count] : violations_per_activity) {
    if (known_labels.count(activity)) continue;
    if (!legend.empty()) legend += "\\n";
    legend += activity + " (" + std::to_string(count) + ")";
  }
  if (!legend.empty())
    dot += "  legend [shape=note, label=\"not in model:\\n" + legend + "\"];\n";
  dot += "}\n";
  return dot;
}

namespace {

// Section keys are operation names: the analytics and dependency-mining
// surface, plus the engine operations the dedicated subcommands expose.
const std::set<std::string>& known_section_names() {
  static const std::set<std::string> names = {
      "derive_process_conformance", "summarize_process_conformance", "present_guideline_violations",
      "identify_guideline_violations", "compare_process_conformance", "summarize_guideline_violations",
      "conformance_distribution", "conformance_over_time", "conformance_per_rule", "violation_patterns",
      "discover_reasons", "impact_on_outcome", "build_session_log", "discover_dfg",
      "rule_fitness", "replay_log", "align_log", "catalog_stats", "sankey_links",
      "validate_descriptor"};
  return names;
}

}  // namespace

std::string emit_report(const ReportDocument& document) {
  nlohmann::ordered_json root;
  nlohmann::ordered_json metadata;
  metadata["tool"] = std::string(k_tool_name);
  metadata["version"] = std::string(k_tool_version);
  metadata["generated_at"] = document.generated_at;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const ReportInput& input : document.inputs) {
    nlohmann::ordered_json item;
    item["name"] = input.name;
    item["path"] = input.path;
    item["digest"] = input.digest;
    inputs.push_back(std::move(item));
  }
  metadata["inputs"] = std::move(inputs);
  root["metadata"] = std::move(metadata);

  std::vector<std::string> keys;
  for (const auto& [key, payload] : document.sections.items()) {
    if (!known_section_names().count(key))
      throw validation_error("unknown report section: " + key);
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  nlohmann::ordered_json sections;
  for (const std::string& key : keys) sections[key] = document.sections.at(key);
  root["sections"] = std::move(sections);
  return root.dump(2) + "\n";
}

ReportDocument parse_report(std::string_view text) {
  nlohmann::ordered_json root;
  try {
    root = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("report is not valid JSON: ") + e.what(), e.byte);
  }
  ReportDocument document;
  const auto& metadata = root.at("metadata");
  document.generated_at = metadata.at("generated_at").get<std::string>();
  for (const auto& input : metadata.at("inputs"))
    document.inputs.push_back({input.at("name").get<std::string>(), input.at("path").get<std::string>(),
                               input.at("digest").get<std::string>()});
  document.sections = root.at("sections");
  return document;
}

nlohmann::ordered_json conformance_section(const ConformanceReport& report) {
  nlohmann::ordered_json section;
  section["technique"] = to_string(report.technique);
  section["log_fitness"] = round6(report.log_fitness);
  nlohmann::ordered_json per_trace;
  for (const auto& [case_id, fitness] : report.per_trace) per_trace[case_id] = round6(fitness);
  section["per_trace"] = std::move(per_trace);
  nlohmann::ordered_json violations = nlohmann::ordered_json::array();
  for (const ReportViolation& violation : report.violations) {
    nlohmann::ordered_json item;
    item["case"] = violation.case_id;
    item["kind"] = violation.kind;
    item["activity"] = violation.activity;
    item["position"] = violation.position;
    item["detail"] = violation.detail;
    violations.push_back(std::move(item));
  }
  section["violations"] = std::move(violations);
  return section;
}

nlohmann::ordered_json chevron_section(const std::vector<ChevronRow>& rows) {
  nlohmann::ordered_json section = nlohmann::ordered_json::array();
  for (const ChevronRow& row : rows) {
    nlohmann::ordered_json item;
    item["case"] = row.case_id;
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const ChevronCell& cell : row.cells) {
      nlohmann::ordered_json c;
      c["label"] = cell.label;
      c["status"] = cell.status == ChevronCell::Status::conforming
                        ? "conforming"
                        : (cell.status == ChevronCell::Status::missing ? "missing" : "wrong");
      cells.push_back(std::move(c));
    }
    item["cells"] = std::move(cells);
    section.push_back(std::move(item));
  }
  return section;
}

nlohmann::ordered_json distribution_section(const DistributionBuckets& buckets) {
  nlohmann::ordered_json section;
  section["edges"] = buckets.edges;
  section["counts"] = buckets.counts;
  return section;
}

nlohmann::ordered_json violation_items_section(const std::vector<ViolationItem>& items) {
  nlohmann::ordered_json section = nlohmann::ordered_json::array();
  for (const ViolationItem& item : items) {
    nlohmann::ordered_json entry;
    entry["case"] = item.case_id;
    entry["position"] = item.position;
    entry["kind"] = item.kind;
    entry["activity"] = item.activity;
    entry["before"] = item.context_before;
    entry["after"] = item.context_after;
    entry["description"] = item.description;
    section.push_back(std::move(entry));
  }
  return section;
}

nlohmann::ordered_json comparison_section(const std::vector<std::pair<std::string, double>>& rows) {
  nlohmann::ordered_json section = nlohmann::ordered_json::array();
  for (const auto& [name, fitness] : rows) {
    nlohmann::ordered_json row;
    row["name"] = name;
    row["fitness"] = round6(fitness);
    section.push_back(std::move(row));
  }
  return section;
}

nlohmann::ordered_json violation_summary_section(
    const std::vector<std::pair<std::string, std::int64_t>>& ranked) {
  nlohmann::ordered_json section = nlohmann::ordered_json::array();
  for (const auto& [type, count] : ranked) {
    nlohmann::ordered_json row;
    row["type"] = type;
    row["count"] = count;
    section.push_back(std::move(row));
  }
  return section;
}

nlohmann::ordered_json over_time_section(const std::vector<TimeWindowPoint>& series) {
  nlohmann::ordered_json section = nlohmann::ordered_json::array();
  for (const TimeWindowPoint& point : series) {
    nlohmann::ordered_json row;
    row["window_start"] = format_iso8601(point.window_start);
    row["traces"] = point.trace_count;
    row["non_conformant"] = point.non_conformant;
    if (point.fitness)
      row["log_fitness"] = round6(*point.fitness);
    else
      row["log_fitness"] = nullptr;
    section.push_back(std::move(row));
  }
  return section;
}

nlohmann::ordered_json per_rule_section(const std::map<std::string, double>& rates) {
  nlohmann::ordered_json section;
  for (const auto& [rule, rate] : rates) section[rule] = round6(rate);
  return section;
}

nlohmann::ordered_json patterns_section(const std::vector<ViolationPattern>& patterns) {
  nlohmann::ordered_json section = nlohmann::ordered_json::array();
  for (const ViolationPattern& pattern : patterns) {
    nlohmann::ordered_json row;
    row["types"] = pattern.types;
    row["support"] = pattern.support;
    section.push_back(std::move(row));
  }
  return section;
}

namespace {

nlohmann::ordered_json reason_node_json(const ReasonNode& node) {
  nlohmann::ordered_json out;
  if (node.is_leaf()) {
    out["conformant"] = node.conformant;
    out["non_conformant"] = node.non_conformant;
    out["samples"] = node.samples();
    return out;
  }
  out["attribute"] = *node.attribute;
  if (node.numeric_split)
    out["predicate"] = *node.attribute + " <= " + format2(node.threshold);
  else
    out["predicate"] = *node.attribute + " == " + node.category;
  out["pass"] = reason_node_json(*node.pass);
  out["fail"] = reason_node_json(*node.fail);
  return out;
}

}  // namespace

nlohmann::ordered_json reason_tree_section(const ReasonTree& tree) {
  nlohmann::ordered_json section;
  section["training_size"] = tree.training_size;
  section["root"] = reason_node_json(*tree.root);
  return section;
}

nlohmann::ordered_json outcome_section(const OutcomeImpact& impact) {
  nlohmann::ordered_json section;
  section["outcome_kind"] = impact.boolean_outcome ? "rate" : "mean";
  section["conformant_count"] = impact.conformant_count;
  section["non_conformant_count"] = impact.non_conformant_count;
  section["conformant_value"] =
      impact.conformant_mean ? nlohmann::ordered_json(round6(*impact.conformant_mean)) : nullptr;
  section["non_conformant_value"] =
      impact.non_conformant_mean ? nlohmann::ordered_json(round6(*impact.non_conformant_mean)) : nullptr;
  section["difference"] = impact.difference ? nlohmann::ordered_json(round6(*impact.difference)) : nullptr;
  return section;
}

nlohmann::ordered_json dfg_section(const DfgModel& model) {
  nlohmann::ordered_json section;
  nlohmann::ordered_json nodes;
  for (const auto& [node, freq] : model.nodes) nodes[node] = freq;
  section["nodes"] = std::move(nodes);
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& [edge, freq] : model.edges) {
    nlohmann::ordered_json row;
    row["from"] = edge.first;
    row["to"] = edge.second;
    row["frequency"] = freq;
    edges.push_back(std::move(row));
  }
  section["edges"] = std::move(edges);
  nlohmann::ordered_json starts;
  for (const auto& [node, count] : model.start_counts) starts[node] = count;
  section["start_counts"] = std::move(starts);
  nlohmann::ordered_json ends;
  for (const auto& [node, count] : model.end_counts) ends[node] = count;
  section["end_counts"] = std::move(ends);
  return section;
}

nlohmann::ordered_json marginals_section(const Marginals& marginals) {
  nlohmann::ordered_json section;
  for (const auto& [dimension, counts] : marginals) {
    nlohmann::ordered_json values;
    for (const auto& [value, count] : counts) values[value] = count;
    section[to_string(dimension)] = std::move(values);
  }
  return section;
}

nlohmann::ordered_json sankey_section(const std::vector<SankeyLink>& links) {
  nlohmann::ordered_json section = nlohmann::ordered_json::array();
  for (const SankeyLink& link : links) {
    nlohmann::ordered_json row;
    row["stage"] = link.stage;
    row["from"] = link.from;
    row["to"] = link.to;
    row["weight"] = round6(link.weight);
    section.push_back(std::move(row));
  }
  return section;
}

}  // namespace confokit

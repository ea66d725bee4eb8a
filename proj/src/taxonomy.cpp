#include "confokit/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <tuple>

#include "confokit/errors.hpp"
#include "csv.hpp"

namespace confokit {

const std::set<std::string>& goal_vocabulary() {
  static const std::set<std::string> vocab = {"explore", "describe", "explain", "confirm", "present"};
  return vocab;
}

const std::set<std::string>& means_vocabulary() {
  static const std::set<std::string> vocab = {"identify", "present",  "compare", "derive", "summarize",
                                              "discover", "annotate", "explore", "unknown"};
  return vocab;
}

const std::set<std::string>& characteristic_vocabulary() {
  static const std::set<std::string> vocab = {
      "guideline violations",
      "process conformance",
      "reasons for guideline violations",
      "guideline violations in model",
      "conformance distribution",
      "conformant and non-conformant traces",
      "impact of conformance on process outcome",
      "reasons for process conformance",
      "severity of guideline violations",
      "violation patterns",
      "effects of goal deviations",
      "process conformance per rule",
      "process conformance over time",
      "most frequent guideline violations",
  };
  return vocab;
}

const std::set<std::string>& constraint_vocabulary() {
  static const std::set<std::string> vocab = {"control-flow", "data", "resource", "time"};
  return vocab;
}

const std::set<std::string>& target_vocabulary() {
  static const std::set<std::string> vocab = {"log", "trace", "event"};
  return vocab;
}

const std::set<std::string>& cardinality_vocabulary() {
  static const std::set<std::string> vocab = {"single", "multiple", "all"};
  return vocab;
}

namespace {

std::string lowered(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trimmed(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t");
  std::size_t end = text.find_last_not_of(" \t");
  if (begin == std::string::npos) return {};
  return text.substr(begin, end - begin + 1);
}

}  // namespace

std::vector<std::string> validate_descriptor(const TaskDescriptor& d,
                                             const std::set<std::string>& extra_characteristics) {
  std::vector<std::string> violations;
  if (!goal_vocabulary().count(d.goal))
    violations.push_back("'" + d.goal + "' is not a goal characteristic");
  if (!means_vocabulary().count(d.means))
    violations.push_back("'" + d.means + "' is not a means characteristic");
  if (!characteristic_vocabulary().count(d.data_characteristic) &&
      !extra_characteristics.count(d.data_characteristic))
    violations.push_back("'" + d.data_characteristic + "' is not a data characteristic");
  if (d.constraint_type.empty()) {
    violations.push_back("constraint_type empty");
  } else {
    std::set<std::string> seen;
    for (const std::string& c : d.constraint_type) {
      if (!constraint_vocabulary().count(c))
        violations.push_back("'" + c + "' is not a process perspective");
      if (!seen.insert(c).second) violations.push_back("duplicate perspective '" + c + "'");
    }
  }
  if (!target_vocabulary().count(d.data_target))
    violations.push_back("'" + d.data_target + "' is not a data target");
  if (!cardinality_vocabulary().count(d.cardinality))
    violations.push_back("'" + d.cardinality + "' is not a data cardinality");
  return violations;
}

namespace {

TaskDescriptor descriptor_from_row(const std::map<std::string, std::string>& fields) {
  TaskDescriptor d;
  d.goal = lowered(trimmed(fields.at("goal")));
  d.means = lowered(trimmed(fields.at("means")));
  d.data_characteristic = lowered(trimmed(fields.at("characteristic")));
  d.data_target = lowered(trimmed(fields.at("target")));
  d.cardinality = lowered(trimmed(fields.at("cardinality")));
  std::stringstream subset(fields.at("constraint_type"));
  std::string part;
  while (std::getline(subset, part, ';')) {
    part = lowered(trimmed(part));
    if (!part.empty()) d.constraint_type.push_back(part);
  }
  return d;
}

std::map<std::string, std::size_t> header_index(const detail::CsvTable& table,
                                                const std::vector<std::string>& required) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < table.header.size(); ++i) index[lowered(trimmed(table.header[i]))] = i;
  for (const std::string& name : required)
    if (!index.count(name)) throw schema_error("catalog is missing required column: " + name);
  return index;
}

}  // namespace

TaskCatalog load_catalog_csv(std::string_view text) {
  detail::CsvTable table = detail::parse_csv_table(text);
  TaskCatalog catalog;
  for (const std::string& comment : table.leading_comments) {
    // "#vocab: characteristic=<name>" extends the characteristic vocabulary.
    constexpr std::string_view prefix = "#vocab:";
    if (comment.rfind(prefix, 0) != 0) continue;
    std::string body = trimmed(comment.substr(prefix.size()));
    constexpr std::string_view key = "characteristic=";
    if (body.rfind(key, 0) == 0) catalog.extra_characteristics.insert(lowered(trimmed(body.substr(key.size()))));
  }
  if (table.header.empty()) return catalog;

  auto index = header_index(
      table, {"goal", "means", "characteristic", "constraint_type", "target", "cardinality", "count"});
  bool has_source = index.count("source") > 0;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::map<std::string, std::string> fields;
    for (const auto& [name, col] : index) fields[name] = row[col];
    CatalogEntry entry;
    entry.descriptor = descriptor_from_row(fields);
    try {
      entry.count = std::stoll(fields.at("count"));
    } catch (const std::exception&) {
      throw validation_error("catalog row at line " + std::to_string(table.row_lines[r]) +
                             " has a non-numeric count");
    }
    if (entry.count < 1)
      throw validation_error("catalog row at line " + std::to_string(table.row_lines[r]) +
                             " has a non-positive count");
    if (has_source) entry.source = fields.at("source");
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

TaskCatalog load_catalog_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw argument_error("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_catalog_csv(buffer.str());
}

std::string to_string(Dimension dimension) {
  switch (dimension) {
    case Dimension::goal: return "goal";
    case Dimension::means: return "means";
    case Dimension::characteristic: return "characteristic";
    case Dimension::constraint_type: return "constraint_type";
    case Dimension::target: return "target";
    case Dimension::cardinality: return "cardinality";
  }
  return "goal";
}

namespace {

void ensure_catalog_valid(const TaskCatalog& catalog) {
  std::string offenders;
  for (std::size_t i = 0; i < catalog.entries.size(); ++i) {
    auto violations = validate_descriptor(catalog.entries[i].descriptor, catalog.extra_characteristics);
    for (const std::string& v : violations) {
      if (!offenders.empty()) offenders += "; ";
      offenders += "entry " + std::to_string(i) + ": " + v;
    }
  }
  if (!offenders.empty()) throw validation_error("invalid catalog: " + offenders);
}

std::vector<std::string> values_of(const TaskDescriptor& d, Dimension dimension) {
  switch (dimension) {
    case Dimension::goal: return {d.goal};
    case Dimension::means: return {d.means};
    case Dimension::characteristic: return {d.data_characteristic};
    case Dimension::constraint_type: return d.constraint_type;
    case Dimension::target: return {d.data_target};
    case Dimension::cardinality: return {d.cardinality};
  }
  return {};
}

}  // namespace

Marginals catalog_stats(const TaskCatalog& catalog) {
  ensure_catalog_valid(catalog);
  Marginals marginals;
  for (Dimension dimension : {Dimension::goal, Dimension::means, Dimension::characteristic,
                              Dimension::constraint_type, Dimension::target, Dimension::cardinality}) {
    auto& counts = marginals[dimension];
    for (const CatalogEntry& entry : catalog.entries)
      for (const std::string& value : values_of(entry.descriptor, dimension)) counts[value] += entry.count;
  }
  return marginals;
}

std::vector<SankeyLink> sankey_links(const TaskCatalog& catalog, const std::vector<Dimension>& order) {
  ensure_catalog_valid(catalog);
  if (order.size() < 2) throw argument_error("sankey needs at least two dimensions");

  std::map<std::tuple<std::size_t, std::string, std::string>, double> weights;
  for (const CatalogEntry& entry : catalog.entries) {
    for (std::size_t stage = 0; stage + 1 < order.size(); ++stage) {
      std::vector<std::string> from = values_of(entry.descriptor, order[stage]);
      std::vector<std::string> to = values_of(entry.descriptor, order[stage + 1]);
      // A subset dimension splits the entry's weight equally over its members.
      double weight = static_cast<double>(entry.count) /
                      (static_cast<double>(from.size()) * static_cast<double>(to.size()));
      for (const std::string& f : from)
        for (const std::string& t : to) weights[{stage, f, t}] += weight;
    }
  }

  std::vector<SankeyLink> links;
  links.reserve(weights.size());
  for (const auto& [key, weight] : weights)
    links.push_back(SankeyLink{std::get<0>(key), std::get<1>(key), std::get<2>(key), weight});
  return links;
}

std::vector<AnalysisSession> load_sessions_csv(std::string_view text) {
  detail::CsvTable table = detail::parse_csv_table(text);
  if (table.header.empty()) return {};
  auto index = header_index(table, {"session_id", "step_index", "goal", "means", "characteristic",
                                    "constraint_type", "target", "cardinality"});

  struct Step {
    std::int64_t order;
    TaskDescriptor descriptor;
  };
  std::map<std::string, std::vector<Step>> steps_by_session;
  std::vector<std::string> session_order;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::map<std::string, std::string> fields;
    for (const auto& [name, col] : index) fields[name] = row[col];
    std::string session_id = trimmed(fields.at("session_id"));
    if (session_id.empty())
      throw validation_error("session row at line " + std::to_string(table.row_lines[r]) +
                             " lacks a session_id");
    std::int64_t order = 0;
    try {
      order = std::stoll(fields.at("step_index"));
    } catch (const std::exception&) {
      throw validation_error("session row at line " + std::to_string(table.row_lines[r]) +
                             " has a non-numeric step_index");
    }
    if (!steps_by_session.count(session_id)) session_order.push_back(session_id);
    steps_by_session[session_id].push_back({order, descriptor_from_row(fields)});
  }

  std::vector<AnalysisSession> sessions;
  sessions.reserve(session_order.size());
  for (const std::string& session_id : session_order) {
    auto& steps = steps_by_session[session_id];
    std::stable_sort(steps.begin(), steps.end(),
                     [](const Step& a, const Step& b) { return a.order < b.order; });
    AnalysisSession session;
    session.session_id = session_id;
    for (Step& step : steps) session.steps.push_back(std::move(step.descriptor));
    sessions.push_back(std::move(session));
  }
  return sessions;
}

std::vector<AnalysisSession> load_sessions_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw argument_error("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_sessions_csv(buffer.str());
}

}  // namespace confokit

#include "confokit/event_log.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "confokit/errors.hpp"
#include "csv.hpp"
#include "xml.hpp"

namespace confokit {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw argument_error("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool parse_bool(std::string_view text, bool& out) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true") {
    out = true;
    return true;
  }
  if (lower == "false") {
    out = false;
    return true;
  }
  return false;
}

bool parse_int(std::string_view text, std::int64_t& out) {
  if (text.empty()) return false;
  std::size_t i = text[0] == '-' || text[0] == '+' ? 1 : 0;
  if (i == text.size()) return false;
  for (std::size_t k = i; k < text.size(); ++k)
    if (text[k] < '0' || text[k] > '9') return false;
  errno = 0;
  char* end = nullptr;
  std::string owned(text);
  long long value = std::strtoll(owned.c_str(), &end, 10);
  if (errno != 0 || end != owned.c_str() + owned.size()) return false;
  out = value;
  return true;
}

bool parse_real(std::string_view text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  std::string owned(text);
  double value = std::strtod(owned.c_str(), &end);
  if (end != owned.c_str() + owned.size()) return false;
  out = value;
  return true;
}

// Inference order: boolean, integer, real, instant, text.
AttributeValue infer_value(const std::string& text, AttrType type) {
  switch (type) {
    case AttrType::boolean: {
      bool b = false;
      parse_bool(text, b);
      return b;
    }
    case AttrType::integer: {
      std::int64_t i = 0;
      parse_int(text, i);
      return i;
    }
    case AttrType::real: {
      double d = 0;
      parse_real(text, d);
      return d;
    }
    case AttrType::instant:
      return *parse_iso8601(text);
    case AttrType::text:
      return text;
  }
  return text;
}

AttrType infer_column_type(const std::vector<std::string>& values) {
  bool all_bool = true, all_int = true, all_real = true, all_instant = true;
  bool any = false;
  for (const std::string& v : values) {
    if (v.empty()) continue;
    any = true;
    bool b;
    std::int64_t i;
    double d;
    if (all_bool && !parse_bool(v, b)) all_bool = false;
    if (all_int && !parse_int(v, i)) all_int = false;
    if (all_real && !parse_real(v, d)) all_real = false;
    if (all_instant && !parse_iso8601(v)) all_instant = false;
  }
  if (!any) return AttrType::text;
  if (all_bool) return AttrType::boolean;
  if (all_int) return AttrType::integer;
  if (all_real) return AttrType::real;
  if (all_instant) return AttrType::instant;
  return AttrType::text;
}

Timestamp parse_event_timestamp(const std::string& text, const CsvMapping& mapping, std::size_t line) {
  if (auto ts = parse_iso8601(text)) return *ts;
  if (!mapping.timestamp_format.empty()) {
    if (auto ts = parse_timestamp_pattern(text, mapping.timestamp_format)) return *ts;
  }
  throw parse_error("unparseable timestamp '" + text + "' at line " + std::to_string(line));
}

// Groups rows into traces by case id (first-appearance order), sorts each
// trace by timestamp keeping source order on ties.
EventLog assemble_log(std::vector<Event> events, std::map<std::string, AttrType> schema) {
  EventLog log;
  log.attribute_schema = std::move(schema);
  std::map<std::string, std::size_t> index_of_case;
  for (Event& event : events) {
    auto [it, inserted] = index_of_case.try_emplace(event.case_id, log.traces.size());
    if (inserted) log.traces.push_back(Trace{event.case_id, {}});
    log.traces[it->second].events.push_back(std::move(event));
  }
  for (Trace& trace : log.traces) {
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
  }
  return log;
}

}  // namespace

std::string to_string(AttrType type) {
  switch (type) {
    case AttrType::text: return "text";
    case AttrType::integer: return "integer";
    case AttrType::real: return "real";
    case AttrType::boolean: return "boolean";
    case AttrType::instant: return "instant";
  }
  return "text";
}

AttrType attr_type_of(const AttributeValue& value) {
  switch (value.index()) {
    case 0: return AttrType::text;
    case 1: return AttrType::integer;
    case 2: return AttrType::real;
    case 3: return AttrType::boolean;
    default: return AttrType::instant;
  }
}

std::string attr_to_string(const AttributeValue& value) {
  switch (value.index()) {
    case 0:
      return std::get<std::string>(value);
    case 1:
      return std::to_string(std::get<std::int64_t>(value));
    case 2: {
      char buffer[40];
      std::snprintf(buffer, sizeof buffer, "%.17g", std::get<double>(value));
      std::string out = buffer;
      // Keep real-typed values distinguishable from integers when re-read.
      if (out.find_first_of(".eE") == std::string::npos) out += ".0";
      return out;
    }
    case 3:
      return std::get<bool>(value) ? "true" : "false";
    default:
      return format_iso8601(std::get<Timestamp>(value));
  }
}

EventLog parse_csv(std::string_view text, const CsvMapping& mapping) {
  detail::CsvTable table = detail::parse_csv_table(text);
  if (table.header.empty() && table.rows.empty())
    return EventLog{};

  auto column_index = [&](const std::string& name) -> std::size_t {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw schema_error("mapped column not found: " + name);
    return static_cast<std::size_t>(it - table.header.begin());
  };
  std::size_t case_col = column_index(mapping.case_column);
  std::size_t activity_col = column_index(mapping.activity_column);
  std::size_t timestamp_col = column_index(mapping.timestamp_column);

  std::vector<std::size_t> extra_columns;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    if (i != case_col && i != activity_col && i != timestamp_col) extra_columns.push_back(i);

  std::map<std::string, AttrType> schema;
  std::map<std::size_t, AttrType> column_types;
  for (std::size_t col : extra_columns) {
    std::vector<std::string> values;
    values.reserve(table.rows.size());
    for (const auto& row : table.rows) values.push_back(row[col]);
    AttrType type = infer_column_type(values);
    column_types[col] = type;
    schema[table.header[col]] = type;
  }

  std::vector<Event> events;
  events.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::size_t line = table.row_lines[r];
    Event event;
    event.case_id = row[case_col];
    event.activity = row[activity_col];
    if (event.case_id.empty())
      throw validation_error("event without case identifier at line " + std::to_string(line));
    if (event.activity.empty())
      throw validation_error("event with empty activity at line " + std::to_string(line));
    event.timestamp = parse_event_timestamp(row[timestamp_col], mapping, line);
    for (std::size_t col : extra_columns) {
      if (row[col].empty()) continue;
      event.attributes[table.header[col]] = infer_value(row[col], column_types[col]);
    }
    events.push_back(std::move(event));
  }
  return assemble_log(std::move(events), std::move(schema));
}

EventLog parse_csv_file(const std::filesystem::path& path, const CsvMapping& mapping) {
  return parse_csv(read_file(path), mapping);
}

std::string write_csv(const EventLog& log, const CsvMapping& mapping) {
  std::vector<std::string> header = {mapping.case_column, mapping.activity_column,
                                     mapping.timestamp_column};
  for (const auto& [name, type] : log.attribute_schema) header.push_back(name);

  std::string out;
  detail::append_csv_row(out, header);
  for (const Trace& trace : log.traces) {
    for (const Event& event : trace.events) {
      std::vector<std::string> row = {event.case_id, event.activity, format_iso8601(event.timestamp)};
      for (const auto& [name, type] : log.attribute_schema) {
        auto it = event.attributes.find(name);
        row.push_back(it == event.attributes.end() ? std::string{} : attr_to_string(it->second));
      }
      detail::append_csv_row(out, row);
    }
  }
  return out;
}

namespace {

AttributeValue xes_value(const detail::XmlNode& node, const std::string& value) {
  if (node.name == "int") {
    std::int64_t i = 0;
    if (parse_int(value, i)) return i;
  } else if (node.name == "float") {
    double d = 0;
    if (parse_real(value, d)) return d;
  } else if (node.name == "boolean") {
    bool b = false;
    if (parse_bool(value, b)) return b;
  } else if (node.name == "date") {
    if (auto ts = parse_iso8601(value)) return *ts;
  }
  return value;  // string and anything unrecognized stay text
}

}  // namespace

EventLog parse_xes_subset(std::string_view text) {
  detail::XmlNode root = detail::parse_xml(text);
  if (root.name != "log") throw parse_error("root element is <" + root.name + ">, expected <log>", root.byte_offset);

  std::vector<Event> events;
  std::map<std::string, AttrType> schema;
  std::size_t trace_index = 0;
  for (const detail::XmlNode& trace_node : root.children) {
    if (trace_node.name != "trace") continue;
    std::string case_id;
    for (const detail::XmlNode& attr : trace_node.children) {
      const std::string* key = attr.attribute("key");
      const std::string* value = attr.attribute("value");
      if (key && value && *key == "concept:name") case_id = *value;
    }
    if (case_id.empty())
      throw validation_error("trace " + std::to_string(trace_index) + " lacks concept:name");

    std::size_t event_index = 0;
    for (const detail::XmlNode& event_node : trace_node.children) {
      if (event_node.name != "event") continue;
      Event event;
      event.case_id = case_id;
      bool have_timestamp = false;
      for (const detail::XmlNode& attr : event_node.children) {
        const std::string* key = attr.attribute("key");
        const std::string* value = attr.attribute("value");
        if (!key || !value) continue;
        if (*key == "concept:name") {
          event.activity = *value;
        } else if (*key == "time:timestamp") {
          auto ts = parse_iso8601(*value);
          if (!ts)
            throw validation_error("trace " + case_id + " event " + std::to_string(event_index) +
                                   ": unparseable time:timestamp '" + *value + "'");
          event.timestamp = *ts;
          have_timestamp = true;
        } else {
          AttributeValue parsed = xes_value(attr, *value);
          AttrType type = attr_type_of(parsed);
          auto [it, inserted] = schema.emplace(*key, type);
          if (!inserted && it->second != type)
            throw validation_error("attribute '" + *key + "' mixes types " + to_string(it->second) +
                                   " and " + to_string(type));
          event.attributes[*key] = std::move(parsed);
        }
      }
      if (event.activity.empty())
        throw validation_error("trace " + case_id + " event " + std::to_string(event_index) +
                               " lacks concept:name");
      if (!have_timestamp)
        throw validation_error("trace " + case_id + " event " + std::to_string(event_index) +
                               " lacks time:timestamp");
      events.push_back(std::move(event));
      ++event_index;
    }
    ++trace_index;
  }
  return assemble_log(std::move(events), std::move(schema));
}

EventLog parse_xes_file(const std::filesystem::path& path) { return parse_xes_subset(read_file(path)); }

std::vector<std::string> activity_sequence(const Trace& trace) {
  std::vector<std::string> sequence;
  sequence.reserve(trace.events.size());
  for (const Event& event : trace.events) sequence.push_back(event.activity);
  return sequence;
}

std::vector<Variant> variants(const EventLog& log) {
  std::map<std::vector<std::string>, Variant> by_sequence;
  for (const Trace& trace : log.traces) {
    std::vector<std::string> sequence = activity_sequence(trace);
    Variant& variant = by_sequence[sequence];
    if (variant.frequency == 0) variant.sequence = sequence;
    ++variant.frequency;
    variant.member_cases.push_back(trace.case_id);
  }
  std::vector<Variant> out;
  out.reserve(by_sequence.size());
  for (auto& [sequence, variant] : by_sequence) out.push_back(std::move(variant));
  std::sort(out.begin(), out.end(), [](const Variant& a, const Variant& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.sequence < b.sequence;
  });
  return out;
}

namespace {

bool numeric(const AttributeValue& v) { return v.index() == 1 || v.index() == 2; }

double as_double(const AttributeValue& v) {
  return v.index() == 1 ? static_cast<double>(std::get<std::int64_t>(v)) : std::get<double>(v);
}

bool compare_values(const AttributeValue& lhs, AttributeComparison::Op op, const AttributeValue& rhs) {
  int cmp;
  if (numeric(lhs) && numeric(rhs)) {
    double a = as_double(lhs), b = as_double(rhs);
    cmp = a < b ? -1 : (a > b ? 1 : 0);
  } else if (lhs.index() != rhs.index()) {
    return op == AttributeComparison::Op::ne;
  } else if (lhs.index() == 4) {
    auto a = std::get<Timestamp>(lhs), b = std::get<Timestamp>(rhs);
    cmp = a < b ? -1 : (b < a ? 1 : 0);
  } else {
    std::string a = attr_to_string(lhs), b = attr_to_string(rhs);
    cmp = a < b ? -1 : (a > b ? 1 : 0);
  }
  using Op = AttributeComparison::Op;
  switch (op) {
    case Op::eq: return cmp == 0;
    case Op::ne: return cmp != 0;
    case Op::lt: return cmp < 0;
    case Op::le: return cmp <= 0;
    case Op::gt: return cmp > 0;
    case Op::ge: return cmp >= 0;
  }
  return false;
}

}  // namespace

EventLog filter_log(const EventLog& log, const TracePredicate& predicate) {
  if (const auto* comparison = std::get_if<AttributeComparison>(&predicate)) {
    if (!log.attribute_schema.count(comparison->attribute))
      throw schema_error("filter references undeclared attribute: " + comparison->attribute);
  }

  auto matches = [&](const Trace& trace) -> bool {
    if (const auto* comparison = std::get_if<AttributeComparison>(&predicate)) {
      for (const Event& event : trace.events) {
        auto it = event.attributes.find(comparison->attribute);
        if (it != event.attributes.end() && compare_values(it->second, comparison->op, comparison->value))
          return true;
      }
      return false;
    }
    if (const auto* contains = std::get_if<ActivityContains>(&predicate)) {
      for (const Event& event : trace.events)
        if (event.activity == contains->activity) return true;
      return false;
    }
    const auto& window = std::get<TimestampWindow>(predicate);
    for (const Event& event : trace.events)
      if (window.from <= event.timestamp && event.timestamp <= window.to) return true;
    return false;
  };

  EventLog out;
  out.attribute_schema = log.attribute_schema;
  for (const Trace& trace : log.traces)
    if (matches(trace)) out.traces.push_back(trace);
  return out;
}

}  // namespace confokit

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "confokit/timestamp.hpp"

namespace confokit {

enum class AttrType { text, integer, real, boolean, instant };

std::string to_string(AttrType type);

using AttributeValue = std::variant<std::string, std::int64_t, double, bool, Timestamp>;

AttrType attr_type_of(const AttributeValue& value);
std::string attr_to_string(const AttributeValue& value);

struct Event {
  std::string case_id;
  std::string activity;
  Timestamp timestamp;
  std::map<std::string, AttributeValue> attributes;

  friend bool operator==(const Event&, const Event&) = default;
};

// All events of one case, ordered by timestamp (ties keep source order).
struct Trace {
  std::string case_id;
  std::vector<Event> events;

  friend bool operator==(const Trace&, const Trace&) = default;
};

struct EventLog {
  std::vector<Trace> traces;
  std::map<std::string, AttrType> attribute_schema;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

// Equivalence class of traces with the same activity sequence.
struct Variant {
  std::vector<std::string> sequence;
  std::size_t frequency = 0;
  std::vector<std::string> member_cases;

  friend bool operator==(const Variant&, const Variant&) = default;
};

struct CsvMapping {
  std::string case_column = "case";
  std::string activity_column = "activity";
  std::string timestamp_column = "timestamp";
  std::string timestamp_format;  // empty = ISO 8601, otherwise a %-pattern fallback
};

EventLog parse_csv(std::string_view text, const CsvMapping& mapping);
EventLog parse_csv_file(const std::filesystem::path& path, const CsvMapping& mapping);

// Inverse of parse_csv for the same mapping: the three mapped columns plus
// one column per schema attribute, timestamps in ISO 8601.
std::string write_csv(const EventLog& log, const CsvMapping& mapping);

EventLog parse_xes_subset(std::string_view text);
EventLog parse_xes_file(const std::filesystem::path& path);

std::vector<std::string> activity_sequence(const Trace& trace);

// Sorted by frequency descending, then sequence lexicographically.
std::vector<Variant> variants(const EventLog& log);

struct AttributeComparison {
  enum class Op { eq, ne, lt, le, gt, ge };
  std::string attribute;
  Op op = Op::eq;
  AttributeValue value;
};

struct ActivityContains {
  std::string activity;
};

// Inclusive bounds; a trace qualifies when at least one event falls inside.
struct TimestampWindow {
  Timestamp from;
  Timestamp to;
};

using TracePredicate = std::variant<AttributeComparison, ActivityContains, TimestampWindow>;

EventLog filter_log(const EventLog& log, const TracePredicate& predicate);

}  // namespace confokit

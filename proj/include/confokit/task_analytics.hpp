#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "confokit/alignment.hpp"
#include "confokit/event_log.hpp"
#include "confokit/process_model.hpp"
#include "confokit/rule_engine.hpp"
#include "confokit/token_replay.hpp"

namespace confokit {

enum class Technique { rules, replay, alignment };

std::string to_string(Technique technique);
Technique technique_from_string(std::string_view text);

// Violation record unified across the three techniques.
struct ReportViolation {
  std::string case_id;
  std::string kind;      // "rule", "missing_token", "remaining_token", "model_move", "log_move"
  std::string activity;  // rule text, attributed activity, or move label
  std::int64_t position = -1;
  std::string detail;
};

struct ConformanceReport {
  Technique technique = Technique::alignment;
  std::map<std::string, double> per_trace;
  double log_fitness = 0.0;
  std::vector<ReportViolation> violations;
};

ConformanceReport derive_process_conformance(const EventLog& log, const PetriNet& net,
                                             Technique technique);

// Fraction of traces whose optimal alignment is free of log/model moves.
double summarize_process_conformance(const EventLog& log, const PetriNet& net);

struct ChevronCell {
  enum class Status { conforming, missing, wrong };
  std::string label;
  Status status = Status::conforming;

  friend bool operator==(const ChevronCell&, const ChevronCell&) = default;
};

struct ChevronRow {
  std::string case_id;
  std::vector<ChevronCell> cells;

  friend bool operator==(const ChevronRow&, const ChevronRow&) = default;
};

// One row per trace: synchronous moves conform, visible model moves insert a
// "missing" cell, log moves mark the event as wrongly executed.
std::vector<ChevronRow> present_guideline_violations(const EventLog& log, const PetriNet& net);

struct ViolationQuery {
  std::optional<std::string> activity;
  std::optional<Perspective> perspective;
  std::optional<std::string> target;  // "log", "trace" or "event" (default)
  std::optional<AttributeComparison> trace_filter;
};

struct ViolationItem {
  std::string case_id;
  std::int64_t position = -1;  // -1 on aggregated items
  std::string kind;            // "missing" or "inserted" (or "summary")
  std::string activity;
  std::vector<std::string> context_before;  // up to two preceding activities
  std::vector<std::string> context_after;   // up to two following activities
  std::string description;
};

std::vector<ViolationItem> identify_guideline_violations(const EventLog& log, const PetriNet& net,
                                                         const ViolationQuery& query = {});

struct NamedUnit {
  std::string name;
  EventLog log;
};

// One (name, fitness) row per unit, sorted by fitness descending, name ascending.
std::vector<std::pair<std::string, double>> compare_process_conformance(
    const std::vector<NamedUnit>& units, const PetriNet& net, Technique technique);

// Violation-type counts ("missing D", "inserted X"), ranked by count then name.
std::vector<std::pair<std::string, std::int64_t>> summarize_guideline_violations(const EventLog& log,
                                                                                 const PetriNet& net);

struct DistributionBuckets {
  std::vector<double> edges;        // ascending, size counts.size() + 1
  std::vector<std::int64_t> counts;  // per bin; top bin closed at the last edge
};

DistributionBuckets conformance_distribution(const EventLog& log, const PetriNet& net, std::size_t bins);

enum class CalendarUnit { day, week, month };

struct TimeWindowPoint {
  Timestamp window_start;
  std::int64_t trace_count = 0;
  std::int64_t non_conformant = 0;
  std::optional<double> fitness;  // absent for empty windows
};

// A trace belongs to the window of its first event; empty windows inside the
// observed span are emitted with zero counts.
std::vector<TimeWindowPoint> conformance_over_time(const EventLog& log, const PetriNet& net,
                                                   CalendarUnit unit);

// Per-rule satisfaction rate: traces without a violation of the rule / traces.
std::map<std::string, double> conformance_per_rule(const EventLog& log, const RuleSet& rules);

struct ViolationPattern {
  std::vector<std::string> types;  // sorted violation-type set
  std::int64_t support = 0;
};

// Frequent co-occurring violation-type sets (apriori); the result contains
// every frequent subset.
std::vector<ViolationPattern> violation_patterns(const EventLog& log, const PetriNet& net,
                                                 std::int64_t min_support);

// Binary decision tree over trace attributes, grown by Gini impurity
// reduction, predicting conformant vs non-conformant.
struct ReasonNode {
  // Internal nodes: the split; pass = predicate holds.
  std::optional<std::string> attribute;
  bool numeric_split = false;
  double threshold = 0.0;    // numeric: attribute <= threshold
  std::string category;      // categorical: attribute == category
  std::unique_ptr<ReasonNode> pass;
  std::unique_ptr<ReasonNode> fail;
  // Leaves: the label distribution.
  std::int64_t conformant = 0;
  std::int64_t non_conformant = 0;

  bool is_leaf() const { return !attribute.has_value(); }
  std::int64_t samples() const;
};

struct ReasonTreeConfig {
  std::size_t max_depth = 4;
  std::size_t min_leaf = 1;
};

struct ReasonTree {
  std::unique_ptr<ReasonNode> root;
  std::size_t training_size = 0;
};

ReasonTree discover_reasons(const EventLog& log, const PetriNet& net,
                            const std::vector<std::string>& attributes, const ReasonTreeConfig& config = {});

struct OutcomeImpact {
  bool boolean_outcome = false;
  std::int64_t conformant_count = 0;
  std::int64_t non_conformant_count = 0;
  std::optional<double> conformant_mean;      // mean, or rate of true for booleans
  std::optional<double> non_conformant_mean;
  std::optional<double> difference;  // conformant - non-conformant
};

OutcomeImpact impact_on_outcome(const EventLog& log, const PetriNet& net,
                                const std::string& outcome_attribute);

}  // namespace confokit
